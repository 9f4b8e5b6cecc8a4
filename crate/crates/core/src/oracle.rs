//! Brute-force checks that share no code path with the solver: random
//! feasible perturbations, closed-form one-variable reductions of planar
//! instances, dense sign sweeps of `φ`, and feasible grid search.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{GtrsError, Result};
use crate::instance::{check_len, GtrsInstance, Sense};
use crate::poly::Polynomial;
use crate::secular::SecularFunction;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeighborhoodReport {
    pub passed: bool,
    /// Samples drawn.
    pub samples: usize,
    /// Samples whose projection onto the constraint did not converge.
    pub skipped: usize,
    /// Most negative `f(x′) − f(x)` over feasible samples (zero if none).
    pub worst_violation: f64,
}

/// Moves `y` onto `g = 0` by Newton steps along `∇g`.
fn project(inst: &GtrsInstance, mut y: DVector<f64>) -> Option<DVector<f64>> {
    for _ in 0..20 {
        let g = inst.eval_constraint(&y).ok()?;
        if g.abs() <= 1e-14 * inst.constraint_scale(&y) {
            return Some(y);
        }
        let grad = inst.constraint_gradient(&y);
        let gg = grad.dot(&grad);
        if gg == 0.0 || !gg.is_finite() {
            return None;
        }
        y -= grad * (g / gg);
    }
    let g = inst.eval_constraint(&y).ok()?;
    (g.abs() <= 1e-12 * inst.constraint_scale(&y)).then_some(y)
}

/// Samples feasible points within `radius` of `x` and reports the largest
/// objective decrease.
///
/// Steps are random directions with uniformly drawn lengths up to
/// `radius`. For equalities each trial point is projected onto `g = 0`;
/// for inequalities feasible trial points are kept as they are and
/// infeasible ones are projected onto the boundary.
pub fn neighborhood_test(
    inst: &GtrsInstance,
    x: &DVector<f64>,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<NeighborhoodReport> {
    let n = inst.dim();
    check_len("x", x, n)?;
    let f0 = inst.eval_objective(x)?;
    let slope = (inst.obj_matrix() * x + inst.obj_linear()) * 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut skipped = 0;
    for _ in 0..samples {
        let mut d = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let dn = d.norm();
        if dn == 0.0 {
            skipped += 1;
            continue;
        }
        let len = radius * rng.random_range(f64::EPSILON..=1.0);
        d *= len / dn;
        let y = x + &d;
        let keep = match inst.sense() {
            Sense::Inequality => inst.eval_constraint(&y)? <= 0.0,
            Sense::Equality => false,
        };
        let y = if keep { Some(y) } else { project(inst, y) };
        let Some(y) = y else {
            skipped += 1;
            continue;
        };
        let step = &y - x;
        // f(x + s) − f(x) without cancellation against f(x)
        let delta = slope.dot(&step) + step.dot(&(inst.obj_matrix() * &step));
        worst = worst.min(delta);
    }
    Ok(NeighborhoodReport {
        passed: worst >= -1e-9 * (1.0 + f0.abs()),
        samples,
        skipped,
        worst_violation: worst,
    })
}

/// Which closed form eliminated a variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionKind {
    /// `x₁x₂ = k`, parametrized by `x₁ = y`, `x₂ = k/y`.
    Hyperbola { k: f64 },
    /// The constraint is linear in coordinate `solved`, parametrized by
    /// the other coordinate.
    Graph { solved: usize },
}

/// A critical point of the reduced one-variable objective.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedCritical {
    pub parameter: f64,
    pub x: DVector<f64>,
    pub value: f64,
    pub second_derivative: f64,
}

#[derive(Debug, Clone)]
pub struct UnivariateReduction {
    pub kind: ReductionKind,
    /// Polynomial whose real roots are the critical parameters.
    pub critical_polynomial: Polynomial,
    pub critical_points: Vec<ReducedCritical>,
}

impl UnivariateReduction {
    /// Critical points with a clearly positive second derivative.
    pub fn local_minimizers(&self) -> Vec<&ReducedCritical> {
        self.critical_points
            .iter()
            .filter(|c| c.second_derivative > 1e-9 * (1.0 + c.value.abs()))
            .collect()
    }
}

/// Eliminates one variable of a planar equality instance in closed form.
///
/// Handles `B = [[0, s], [s, 0]]` with `b = 0` (a hyperbola `x₁x₂ = k`),
/// and diagonal `B` with exactly one zero entry whose coordinate appears
/// linearly in the constraint (a parabola-like graph).
pub fn univariate_reduce_2d(inst: &GtrsInstance) -> Result<UnivariateReduction> {
    if inst.dim() != 2 {
        return Err(GtrsError::NotReducible("dimension is not 2"));
    }
    if inst.sense() != Sense::Equality {
        return Err(GtrsError::NotReducible("constraint is not an equality"));
    }
    let (a, av) = (inst.obj_matrix(), inst.obj_linear());
    let (b, bv, c) = (inst.con_matrix(), inst.con_linear(), inst.con_constant());

    if b[(0, 0)] == 0.0 && b[(1, 1)] == 0.0 && bv.iter().all(|&v| v == 0.0) {
        let k = -c / (2.0 * b[(0, 1)]);
        if k == 0.0 {
            return Err(GtrsError::NotReducible("degenerate hyperbola"));
        }
        let (a11, a12, a22) = (a[(0, 0)], a[(0, 1)], a[(1, 1)]);
        let (a1, a2) = (av[0], av[1]);
        // F(y) = a11 y² + 2a12 k + a22 k²/y² + 2a1 y + 2a2 k/y; F′(y)·y³/2
        let crit = Polynomial::new(vec![-a22 * k * k, -a2 * k, 0.0, a1, a11]);
        let f = |y: f64| a11 * y * y + 2.0 * a12 * k + a22 * k * k / (y * y) + 2.0 * a1 * y
            + 2.0 * a2 * k / y;
        let f2 = |y: f64| {
            2.0 * a11 + 6.0 * a22 * k * k / y.powi(4) + 4.0 * a2 * k / y.powi(3)
        };
        let critical_points = real_roots(&crit)
            .into_iter()
            .filter(|&y| y != 0.0)
            .map(|y| ReducedCritical {
                parameter: y,
                x: DVector::from_row_slice(&[y, k / y]),
                value: f(y),
                second_derivative: f2(y),
            })
            .collect();
        return Ok(UnivariateReduction {
            kind: ReductionKind::Hyperbola { k },
            critical_polynomial: crit,
            critical_points,
        });
    }

    if b[(0, 1)] == 0.0 {
        let zero: Vec<usize> = (0..2).filter(|&i| b[(i, i)] == 0.0).collect();
        if let [j] = zero[..] {
            if bv[j] != 0.0 {
                let i = 1 - j;
                // x_j = −(βᵢt² + 2bᵢt + c)/(2b_j)
                let xi = Polynomial::linear(0.0, 1.0);
                let xj = Polynomial::new(vec![c, 2.0 * bv[i], b[(i, i)]]).scale(-0.5 / bv[j]);
                let obj = &(&(&(&xi * &xi).scale(a[(i, i)])
                    + &(&xi * &xj).scale(2.0 * a[(i, j)]))
                    + &(&xj * &xj).scale(a[(j, j)]))
                    + &(&xi.scale(2.0 * av[i]) + &xj.scale(2.0 * av[j]));
                let d1 = obj.derivative();
                let d2 = d1.derivative();
                let critical_points = real_roots(&d1)
                    .into_iter()
                    .map(|t| {
                        let mut x = DVector::zeros(2);
                        x[i] = t;
                        x[j] = xj.eval(t);
                        ReducedCritical {
                            parameter: t,
                            x,
                            value: obj.eval(t),
                            second_derivative: d2.eval(t),
                        }
                    })
                    .collect();
                return Ok(UnivariateReduction {
                    kind: ReductionKind::Graph { solved: j },
                    critical_polynomial: d1,
                    critical_points,
                });
            }
        }
    }
    Err(GtrsError::NotReducible(
        "constraint is neither a hyperbola nor a graph over one axis",
    ))
}

/// Real roots by recursive isolation between the critical points of `p`
/// and bisection; intended for low degrees.
pub fn real_roots(p: &Polynomial) -> Vec<f64> {
    let Some(deg) = p.degree() else {
        return Vec::new();
    };
    let c = p.coeffs();
    match deg {
        0 => return Vec::new(),
        1 => return vec![-c[0] / c[1]],
        _ => {}
    }
    let bound = 1.0 + c[..deg].iter().map(|v| (v / c[deg]).abs()).fold(0.0, f64::max);
    let crit = real_roots(&p.derivative());
    let mut pts = vec![-bound];
    pts.extend(crit.iter().copied().filter(|x| x.abs() < bound));
    pts.push(bound);
    let mut roots = Vec::new();
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (p.eval(a), p.eval(b));
        if fa == 0.0 {
            roots.push(a);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..200 {
                let m = 0.5 * (lo + hi);
                if m <= lo || m >= hi {
                    break;
                }
                if p.eval(m).signum() == fa.signum() {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }
    // even-multiplicity roots touch zero at a critical point
    for &x in &crit {
        if p.eval(x).abs() <= 1e-12 * p.magnitude(x) {
            roots.push(x);
        }
    }
    if p.eval(bound) == 0.0 {
        roots.push(bound);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + b.abs()));
    roots
}

/// Brackets `[a, b]` of sign changes of `φ` on an even grid, skipping
/// samples within `1e-6·(1 + |p|)` of a pole `p` and intervals that
/// contain a pole.
pub fn phi_sweep(sf: &SecularFunction, lo: f64, hi: f64, npts: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    let npts = npts.max(2);
    for k in 0..npts {
        let l = lo + (hi - lo) * k as f64 / (npts - 1) as f64;
        if sf
            .poles
            .iter()
            .any(|p| (l - p).abs() <= 1e-6 * (1.0 + p.abs()))
        {
            prev = None;
            continue;
        }
        let Ok(v) = sf.eval_phi(l) else {
            prev = None;
            continue;
        };
        if let Some((pl, pv)) = prev {
            let pole_between = sf.poles.iter().any(|p| *p > pl && *p < l);
            if !pole_between && (v == 0.0 || pv.signum() != v.signum()) && pv != 0.0 {
                out.push((pl, l));
            }
        }
        prev = Some((l, v));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub best_value: f64,
    pub best_point: DVector<f64>,
    pub feasible_samples: usize,
}

/// Smallest objective over feasible points derived from a uniform grid of
/// about `points` nodes on the box `center ± half_width`.
///
/// Nodes feasible for the inequality sense count directly; any other node
/// is moved along the coordinate axis with the steepest constraint slope
/// to both roots of the resulting scalar quadratic. Intended for `n ≤ 3`.
pub fn grid_best_feasible(
    inst: &GtrsInstance,
    center: &DVector<f64>,
    half_width: f64,
    points: usize,
) -> Option<GridResult> {
    let n = inst.dim();
    let per_axis = ((points as f64).powf(1.0 / n as f64).round() as usize).max(2);
    let (a, av) = (inst.obj_matrix(), inst.obj_linear());
    let (b, bv, c) = (inst.con_matrix(), inst.con_linear(), inst.con_constant());
    let f = |x: &[f64]| {
        let mut s = 0.0;
        for i in 0..n {
            let mut r = 2.0 * av[i];
            for j in 0..n {
                r += a[(i, j)] * x[j];
            }
            s += r * x[i];
        }
        s
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut count = 0;
    let mut consider = |x: &[f64], best: &mut Option<(f64, Vec<f64>)>| {
        count += 1;
        let v = f(x);
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            *best = Some((v, x.to_vec()));
        }
    };
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    let mut bx = vec![0.0; n];
    loop {
        for i in 0..n {
            x[i] = center[i] - half_width + 2.0 * half_width * idx[i] as f64 / (per_axis - 1) as f64;
        }
        let mut g = c;
        for i in 0..n {
            bx[i] = bv[i];
            for j in 0..n {
                bx[i] += b[(i, j)] * x[j];
            }
            g += (bx[i] + bv[i]) * x[i];
        }
        if inst.sense() == Sense::Inequality && g <= 0.0 {
            consider(&x, &mut best);
        } else {
            let k = (0..n)
                .max_by(|&p, &q| bx[p].abs().total_cmp(&bx[q].abs()))
                .unwrap_or(0);
            // g(x + t e_k) = B_kk t² + 2(Bx + b)_k t + g
            let (qa, qb) = (b[(k, k)], bx[k]);
            let ts: Vec<f64> = if qa == 0.0 {
                if qb != 0.0 {
                    vec![-g / (2.0 * qb)]
                } else {
                    vec![]
                }
            } else {
                let disc = qb * qb - qa * g;
                if disc < 0.0 {
                    vec![]
                } else {
                    let s = disc.sqrt();
                    let q = -(qb + qb.signum() * s);
                    if q == 0.0 {
                        vec![0.0]
                    } else {
                        vec![q / qa, g / q]
                    }
                }
            };
            for t in ts {
                let old = x[k];
                x[k] += t;
                consider(&x, &mut best);
                x[k] = old;
            }
        }
        let mut d = 0;
        loop {
            if d == n {
                let (best_value, p) = best?;
                return Some(GridResult {
                    best_value,
                    best_point: DVector::from_vec(p),
                    feasible_samples: count,
                });
            }
            idx[d] += 1;
            if idx[d] < per_axis {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}
