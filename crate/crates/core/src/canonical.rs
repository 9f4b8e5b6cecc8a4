//! Reduction of an instance to diagonal standard form.
//!
//! Both matrices are diagonalized by one congruence `T`, coordinates with a
//! nonzero constraint curvature are moved to the front, the linear
//! constraint term on that block is removed by a shift `s`, and the
//! constraint is rescaled by `σ > 0` so its constant lands in `{-1, 0, 1}`:
//!
//! ```text
//! x = T x̂ + s
//! f(x) = Σ αᵢ x̂ᵢ² + 2 âᵀx̂ + f_offset
//! g(x) = σ (Σ βᵢ x̂ᵢ² + 2 b̂ᵀx̂ + ĉ),     b̂ᵢ = 0 for i < n₁,  βᵢ = 0 for i ≥ n₁
//! ```
//!
//! A canonical multiplier `λ̂` corresponds to `λ = λ̂ / σ` in the original
//! problem.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{GtrsError, Result};
use crate::instance::{GtrsInstance, Sense};
use crate::tolerances::Tolerances;

const SWEEP_SAMPLES: usize = 2048;
const THETA_RESOLUTION: f64 = 1e-10;

/// A positive definite combination `μ₁A + μ₂B` with `μ₁² + μ₂² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefiniteCombination {
    pub mu1: f64,
    pub mu2: f64,
    /// Smallest eigenvalue of `μ₁A + μ₂B`.
    pub witness_mineig: f64,
}

/// How the congruence was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pathway {
    /// Both matrices were diagonal on input; `T` is a permutation.
    AlreadyDiagonal,
    /// Built from a definite combination of the pair.
    DefinitePencil,
}

#[derive(Debug, Clone)]
pub struct Diagonalization {
    pub transform: DMatrix<f64>,
    pub alpha: DVector<f64>,
    pub beta: DVector<f64>,
    pub pathway: Pathway,
    /// Present whenever the pair admits a definite combination, on either
    /// pathway.
    pub combination: Option<DefiniteCombination>,
}

fn is_diagonal(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == 0.0))
}

struct Pair<'a> {
    a: &'a DMatrix<f64>,
    b: &'a DMatrix<f64>,
    diagonal: bool,
}

impl Pair<'_> {
    fn combination(&self, theta: f64) -> DMatrix<f64> {
        self.a * theta.cos() + self.b * theta.sin()
    }

    fn min_eig(&self, theta: f64) -> f64 {
        let (c, s) = (theta.cos(), theta.sin());
        if self.diagonal {
            (0..self.a.nrows())
                .map(|i| c * self.a[(i, i)] + s * self.b[(i, i)])
                .fold(f64::INFINITY, f64::min)
        } else {
            self.combination(theta)
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min)
        }
    }

    fn is_definite(&self, theta: f64) -> bool {
        self.combination(theta).cholesky().is_some()
    }
}

/// Golden-section maximization of `f` on `[lo, hi]`.
fn golden_max(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > THETA_RESOLUTION {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// Maximizes `θ ↦ λ_min(cos θ·A + sin θ·B)` over the circle.
///
/// The angles `θ` with a positive definite combination form a single arc,
/// on which the objective is unimodal (`λ_min` is concave and positively
/// homogeneous in the coefficients). A grid of 2048 angles, visited coarse
/// to fine, looks for one point of that arc by Cholesky tests; the arc ends
/// are then bisected and golden-section search finds the maximum to
/// `1e-10` in `θ`. Diagonal pairs are swept exhaustively since each
/// evaluation is only `O(n)`. Returns `None` when the maximum does not
/// exceed `tol.definiteness · (‖A‖_F + ‖B‖_F)`.
pub fn find_definite_combination(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    tol: &Tolerances,
) -> Option<DefiniteCombination> {
    let scale = a.norm() + b.norm();
    if scale == 0.0 {
        return None;
    }
    let pair = Pair {
        a,
        b,
        diagonal: is_diagonal(a) && is_diagonal(b),
    };
    let step = 2.0 * PI / SWEEP_SAMPLES as f64;
    let (theta, best) = if pair.diagonal {
        let (mut best_theta, mut best) = (0.0, f64::NEG_INFINITY);
        for k in 0..SWEEP_SAMPLES {
            let theta = k as f64 * step;
            let v = pair.min_eig(theta);
            if v > best {
                best = v;
                best_theta = theta;
            }
        }
        let (t, v) = golden_max(best_theta - step, best_theta + step, |t| pair.min_eig(t));
        if v > best {
            (t, v)
        } else {
            (best_theta, best)
        }
    } else {
        let bits = SWEEP_SAMPLES.trailing_zeros();
        let inside = (0..SWEEP_SAMPLES)
            .map(|k| (k.reverse_bits() >> (usize::BITS - bits)) as f64 * step)
            .find(|&t| pair.is_definite(t))?;
        // C(θ − π) = −C(θ) is never definite, so each half-turn brackets an end
        let bisect = |mut good: f64, mut bad: f64| {
            for _ in 0..60 {
                let mid = 0.5 * (good + bad);
                if pair.is_definite(mid) {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            good
        };
        let lo = bisect(inside, inside - PI);
        let hi = bisect(inside, inside + PI);
        let (t, v) = golden_max(lo, hi, |t| pair.min_eig(t));
        let at_inside = pair.min_eig(inside);
        if v >= at_inside {
            (t, v)
        } else {
            (inside, at_inside)
        }
    };

    (best > tol.definiteness * scale).then(|| DefiniteCombination {
        mu1: theta.cos(),
        mu2: theta.sin(),
        witness_mineig: best,
    })
}

/// Finds `T` with `TᵀAT` and `TᵀBT` diagonal.
///
/// Diagonal input is returned as is. Otherwise, with `C = μ₁A + μ₂B = LLᵀ`
/// positive definite and `D = -μ₂A + μ₁B`, the eigenvectors `Q` of
/// `L⁻¹DL⁻ᵀ` give `T = L⁻ᵀQ`; since `A` and `B` are both combinations of
/// `C` and `D`, both become diagonal.
pub fn simultaneous_diagonalize(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<Diagonalization> {
    let n = a.nrows();
    let combination = find_definite_combination(a, b, tol);
    if is_diagonal(a) && is_diagonal(b) {
        return Ok(Diagonalization {
            transform: DMatrix::identity(n, n),
            alpha: a.diagonal(),
            beta: b.diagonal(),
            pathway: Pathway::AlreadyDiagonal,
            combination,
        });
    }
    let comb = combination.ok_or(GtrsError::NotSimultaneouslyDiagonalizable)?;
    let c = a * comb.mu1 + b * comb.mu2;
    let d = a * (-comb.mu2) + b * comb.mu1;
    let chol = c
        .cholesky()
        .ok_or(GtrsError::NotSimultaneouslyDiagonalizable)?;
    let l = chol.l();
    let y = l
        .solve_lower_triangular(&d)
        .ok_or(GtrsError::NotSimultaneouslyDiagonalizable)?;
    let mut m = l
        .solve_lower_triangular(&y.transpose())
        .ok_or(GtrsError::NotSimultaneouslyDiagonalizable)?;
    m = (&m + m.transpose()) * 0.5;
    let eig = m.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mut q = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(i).into_owned();
        let pivot = col.iamax();
        if col[pivot] < 0.0 {
            col = -col;
        }
        q.set_column(k, &col);
    }
    let t = l
        .transpose()
        .solve_upper_triangular(&q)
        .ok_or(GtrsError::NotSimultaneouslyDiagonalizable)?;
    let ta = t.transpose() * a * &t;
    let tb = t.transpose() * b * &t;
    Ok(Diagonalization {
        transform: t,
        alpha: ta.diagonal(),
        beta: tb.diagonal(),
        pathway: Pathway::DefinitePencil,
        combination: Some(comb),
    })
}

/// Diagonal standard form of an instance plus the affine map back.
#[derive(Debug, Clone, Serialize)]
pub struct CanonicalForm {
    #[serde(skip)]
    pub transform: DMatrix<f64>,
    #[serde(skip)]
    pub shift: DVector<f64>,
    /// Constraint scale `σ > 0`.
    pub scale: f64,
    #[serde(skip)]
    pub alpha: DVector<f64>,
    /// Canonical constraint curvatures; nonzero exactly on the first `n1`.
    #[serde(skip)]
    pub beta: DVector<f64>,
    #[serde(skip)]
    pub a_hat: DVector<f64>,
    /// Canonical constraint linear term; zero on the first `n1` entries.
    #[serde(skip)]
    pub b_hat: DVector<f64>,
    pub c_hat: f64,
    pub n1: usize,
    pub n2: usize,
    pub f_offset: f64,
    pub pathway: Pathway,
    pub combination: Option<DefiniteCombination>,
    pub sense: Sense,
}

impl CanonicalForm {
    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// `x = T x̂ + s`, `λ = λ̂ / σ`.
    pub fn map_back(&self, x_hat: &DVector<f64>, lambda_hat: f64) -> (DVector<f64>, f64) {
        (&self.transform * x_hat + &self.shift, lambda_hat / self.scale)
    }

    /// `x̂ = T⁻¹(x − s)`.
    pub fn to_canonical(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        self.transform.clone().lu().solve(&(x - &self.shift))
    }

    /// `f̂(x̂) = Σ αᵢx̂ᵢ² + 2âᵀx̂`; the original objective is `f̂ + f_offset`.
    pub fn eval_objective(&self, x_hat: &DVector<f64>) -> f64 {
        x_hat
            .iter()
            .zip(self.alpha.iter())
            .map(|(x, a)| a * x * x)
            .sum::<f64>()
            + 2.0 * self.a_hat.dot(x_hat)
    }

    /// `ĝ(x̂) = Σ βᵢx̂ᵢ² + 2b̂ᵀx̂ + ĉ`; the original constraint is `σ ĝ`.
    pub fn eval_constraint(&self, x_hat: &DVector<f64>) -> f64 {
        x_hat
            .iter()
            .zip(self.beta.iter())
            .map(|(x, b)| b * x * x)
            .sum::<f64>()
            + 2.0 * self.b_hat.dot(x_hat)
            + self.c_hat
    }

    /// Magnitude used for relative comparisons of diagonal pivots.
    pub fn pencil_scale(&self, lambda_hat: f64) -> f64 {
        self.alpha
            .iter()
            .zip(self.beta.iter())
            .map(|(a, b)| a.abs() + lambda_hat.abs() * b.abs())
            .fold(0.0, f64::max)
    }
}

/// Canonicalizes an instance.
pub fn reduce_to_standard_form(inst: &GtrsInstance, tol: &Tolerances) -> Result<CanonicalForm> {
    let n = inst.dim();
    let diag = simultaneous_diagonalize(inst.obj_matrix(), inst.con_matrix(), tol)?;

    let beta_cut = tol.beta_zero * diag.beta.norm();
    let is_curved = |i: usize| diag.beta[i].abs() > beta_cut;
    let order: Vec<usize> = (0..n)
        .filter(|&i| is_curved(i))
        .chain((0..n).filter(|&i| !is_curved(i)))
        .collect();
    let n1 = order.iter().filter(|&&i| is_curved(i)).count();
    if n1 == 0 {
        return Err(GtrsError::LinearConstraint);
    }

    let mut t = DMatrix::zeros(n, n);
    let mut alpha = DVector::zeros(n);
    let mut beta = DVector::zeros(n);
    for (k, &i) in order.iter().enumerate() {
        t.set_column(k, &diag.transform.column(i));
        alpha[k] = diag.alpha[i];
        if k < n1 {
            beta[k] = diag.beta[i];
        }
    }

    let a_t = t.transpose() * inst.obj_linear();
    let b_t = t.transpose() * inst.con_linear();

    // complete the square on the curved block
    let mut shift_hat = DVector::zeros(n);
    let mut removed = 0.0;
    let mut removed_abs = 0.0;
    for i in 0..n1 {
        shift_hat[i] = -b_t[i] / beta[i];
        removed += b_t[i] * b_t[i] / beta[i];
        removed_abs += b_t[i] * b_t[i] / beta[i].abs();
    }
    let shift = &t * &shift_hat;
    let mut a_hat = DVector::zeros(n);
    let mut b_lin = DVector::zeros(n);
    for i in 0..n {
        a_hat[i] = alpha[i] * shift_hat[i] + a_t[i];
        if i >= n1 {
            b_lin[i] = b_t[i];
        }
    }
    let c = inst.con_constant();
    let mut c_shift = c - removed;
    if c_shift.abs() <= tol.constant_zero * (1.0 + c.abs() + removed_abs) {
        c_shift = 0.0;
    }
    let (scale, c_hat) = if c_shift == 0.0 {
        (1.0, 0.0)
    } else {
        (c_shift.abs(), c_shift.signum())
    };
    let f_offset = inst
        .eval_objective(&shift)
        .expect("shift has instance dimension");

    Ok(CanonicalForm {
        transform: t,
        shift,
        scale,
        alpha,
        beta: beta / scale,
        a_hat,
        b_hat: b_lin / scale,
        c_hat,
        n1,
        n2: n - n1,
        f_offset,
        pathway: diag.pathway,
        combination: diag.combination,
        sense: inst.sense(),
    })
}
