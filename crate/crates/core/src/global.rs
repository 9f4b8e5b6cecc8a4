//! Global minimization through the semidefinite multiplier certificate.
//!
//! A feasible `x` is a global minimizer exactly when some `λ` (with `λ ≥ 0`
//! and `λ·g(x) = 0` for the inequality sense) makes `(A + λB)x + a + λb = 0`
//! and `A + λB ⪰ 0`. Candidates for `λ` are the secular roots inside the
//! semidefinite interval, its finite endpoints (where the null space of
//! `A + λB` may be needed to reach the constraint), and `λ = 0` for
//! inequalities.

use nalgebra::DVector;
use serde::Serialize;

use crate::canonical::{reduce_to_standard_form, CanonicalForm};
use crate::error::{GtrsError, Result};
use crate::instance::{GtrsInstance, Sense};
use crate::secular::{build_secular, SecularRoot};
use crate::serde_util;
use crate::spectral::{psd_interval, spectrum, PsdInterval};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GlobalStatus {
    /// Certified minimizer on the constraint boundary, or at `λ = 0`.
    Optimal,
    /// Inequality sense, `λ = 0`, constraint strictly inactive.
    InteriorOptimal,
    /// Certified minimizer at a singular `A + λB`, completed along a null
    /// direction; the minimizer need not be unique.
    HardCase,
    /// No multiplier certifies a minimizer: the semidefinite interval is
    /// empty, or no candidate in it yields a feasible stationary point.
    NoPsdCertificate,
}

impl std::fmt::Display for GlobalStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Optimal => "optimal",
            Self::InteriorOptimal => "interior_optimal",
            Self::HardCase => "hard_case",
            Self::NoPsdCertificate => "no_psd_certificate",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GlobalResult {
    pub status: GlobalStatus,
    #[serde(with = "serde_util::opt_vector")]
    pub x: Option<DVector<f64>>,
    pub lambda: Option<f64>,
    pub value: Option<f64>,
    pub constraint_value: Option<f64>,
    /// `‖(A+λB)x + a + λb‖` and the scale it is judged against.
    pub kkt_residual: Option<f64>,
    pub kkt_scale: Option<f64>,
    /// `λ_min(A + λB)` and `‖A + λB‖₂`.
    pub min_eig: Option<f64>,
    pub pencil_norm: Option<f64>,
    /// For the hard case, a null direction of `A + λB` along which the
    /// minimizer was completed.
    #[serde(with = "serde_util::opt_vector")]
    pub null_direction: Option<DVector<f64>>,
    /// Semidefinite interval in original multipliers.
    pub psd_interval: Option<PsdInterval>,
}

impl GlobalResult {
    pub(crate) fn uncertified(psd: Option<PsdInterval>) -> Self {
        Self {
            status: GlobalStatus::NoPsdCertificate,
            x: None,
            lambda: None,
            value: None,
            constraint_value: None,
            kkt_residual: None,
            kkt_scale: None,
            min_eig: None,
            pencil_norm: None,
            null_direction: None,
            psd_interval: psd,
        }
    }

    /// Objective value when a minimizer was certified.
    pub fn certified_value(&self) -> Option<f64> {
        match self.status {
            GlobalStatus::NoPsdCertificate => None,
            _ => self.value,
        }
    }
}

enum Attempt {
    Success {
        x_hat: DVector<f64>,
        status: GlobalStatus,
        null: Option<usize>,
    },
    /// A null-space completion was needed and none reached the constraint.
    Incomplete,
    Fail,
}

/// Tries to build a feasible stationary point at canonical multiplier `l`.
fn attempt(cf: &CanonicalForm, l: f64, tol: &Tolerances) -> Attempt {
    let n = cf.dim();
    let pscale = cf.pencil_scale(l).max(f64::MIN_POSITIVE);
    let consistency = tol.kkt_residual * (1.0 + cf.a_hat.amax() + l.abs() * cf.b_hat.amax());
    let mut x = DVector::zeros(n);
    let mut null = Vec::new();
    for i in 0..n {
        let pivot = cf.alpha[i] + l * cf.beta[i];
        let rhs = cf.a_hat[i] + l * cf.b_hat[i];
        if pivot.abs() <= tol.singular * pscale {
            if rhs.abs() > consistency {
                return Attempt::Fail;
            }
            if cf.beta[i] != 0.0 || cf.b_hat[i] != 0.0 {
                null.push(i);
            }
        } else {
            x[i] = -rhs / pivot;
        }
    }
    let r = cf.eval_constraint(&x);
    let gscale = 1.0
        + x.iter()
            .zip(cf.beta.iter().zip(cf.b_hat.iter()))
            .map(|(xi, (b, bl))| (b * xi * xi).abs() + 2.0 * (bl * xi).abs())
            .sum::<f64>()
        + cf.c_hat.abs();
    let hard = if null.is_empty() {
        GlobalStatus::Optimal
    } else {
        GlobalStatus::HardCase
    };
    if r.abs() <= tol.active * gscale {
        return Attempt::Success {
            x_hat: x,
            status: hard,
            null: null.first().copied(),
        };
    }
    if cf.sense == Sense::Inequality && l == 0.0 && r < 0.0 {
        let status = if null.is_empty() {
            GlobalStatus::InteriorOptimal
        } else {
            GlobalStatus::HardCase
        };
        return Attempt::Success {
            x_hat: x,
            status,
            null: null.first().copied(),
        };
    }
    if null.is_empty() {
        return Attempt::Fail;
    }
    for &j in &null {
        if let Some(tau) = completion_step(cf.beta[j], cf.b_hat[j], r) {
            x[j] = tau;
            return Attempt::Success {
                x_hat: x,
                status: GlobalStatus::HardCase,
                null: Some(j),
            };
        }
    }
    Attempt::Incomplete
}

/// Root of `βτ² + 2b̂τ + r = 0` with the smaller `|τ|`, ties toward `τ > 0`.
fn completion_step(beta: f64, b_hat: f64, r: f64) -> Option<f64> {
    if beta == 0.0 {
        return (b_hat != 0.0).then(|| -r / (2.0 * b_hat));
    }
    let disc = b_hat * b_hat - beta * r;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let t1 = (-b_hat + sq) / beta;
    let t2 = (-b_hat - sq) / beta;
    Some(if t1.abs() < t2.abs() || (t1.abs() == t2.abs() && t1 >= t2) {
        t1
    } else {
        t2
    })
}

/// Global solve from an already canonicalized instance and its secular
/// roots (canonical multipliers).
pub fn solve_global_with(
    inst: &GtrsInstance,
    cf: &CanonicalForm,
    roots: &[SecularRoot],
    forced: Option<f64>,
    tol: &Tolerances,
) -> Result<GlobalResult> {
    let sense = inst.sense();
    let Some(iv) = psd_interval(cf, sense, tol) else {
        return Ok(GlobalResult::uncertified(None));
    };
    let mut candidates = Vec::new();
    if sense == Sense::Inequality && iv.lo == 0.0 {
        candidates.push(0.0);
    }
    for r in roots {
        if iv.contains(r.lambda, 1e-12) {
            candidates.push(r.lambda.clamp(iv.lo, iv.hi));
        }
    }
    candidates.extend(iv.finite_ends());
    if let Some(l) = forced {
        if iv.contains(l, 1e-12) {
            candidates.push(l);
        }
    }

    let mut best: Option<GlobalResult> = None;
    let mut incomplete = None;
    for &l in &candidates {
        let (x_hat, status, null) = match attempt(cf, l, tol) {
            Attempt::Success {
                x_hat,
                status,
                null,
            } => (x_hat, status, null),
            Attempt::Incomplete => {
                incomplete.get_or_insert(l / cf.scale);
                continue;
            }
            Attempt::Fail => continue,
        };
        let (x, lambda) = cf.map_back(&x_hat, l);
        let Some(res) = certify(inst, x, lambda, status, tol) else {
            log::debug!("candidate multiplier {lambda} failed certification");
            continue;
        };
        let res = GlobalResult {
            null_direction: null.map(|j| {
                let u = cf.transform.column(j).into_owned();
                let s = u.norm();
                u / s
            }),
            psd_interval: Some(iv.unscaled(cf.scale)),
            ..res
        };
        if best
            .as_ref()
            .is_none_or(|b| res.value.unwrap() < b.value.unwrap())
        {
            best = Some(res);
        }
    }
    match (best, incomplete) {
        (Some(b), _) => Ok(b),
        (None, Some(l)) => Err(GtrsError::HardCaseIncomplete { lambda: l }),
        (None, None) => Ok(GlobalResult::uncertified(Some(iv.unscaled(cf.scale)))),
    }
}

/// Checks stationarity, semidefiniteness, feasibility and complementarity
/// in original coordinates.
fn certify(
    inst: &GtrsInstance,
    x: DVector<f64>,
    lambda: f64,
    status: GlobalStatus,
    tol: &Tolerances,
) -> Option<GlobalResult> {
    let g = inst.eval_constraint(&x).ok()?;
    let value = inst.eval_objective(&x).ok()?;
    let res = inst.kkt_residual(&x, lambda);
    let kscale = inst.kkt_scale(&x, lambda);
    let spec = spectrum(&inst.pencil(lambda), tol.inertia_zero);
    let active = g.abs() <= tol.active * inst.constraint_scale(&x);
    let feasible = match inst.sense() {
        Sense::Equality => active,
        Sense::Inequality => active || (lambda == 0.0 && g < 0.0),
    };
    let ok = feasible
        && res <= tol.kkt_residual * kscale
        && spec.min_eig >= -tol.psd * spec.norm.max(f64::MIN_POSITIVE)
        && (inst.sense() == Sense::Equality || lambda >= 0.0);
    ok.then_some(GlobalResult {
        status,
        x: Some(x),
        lambda: Some(lambda),
        value: Some(value),
        constraint_value: Some(g),
        kkt_residual: Some(res),
        kkt_scale: Some(kscale),
        min_eig: Some(spec.min_eig),
        pencil_norm: Some(spec.norm),
        null_direction: None,
        psd_interval: None,
    })
}

/// The multiplier forced by a free coordinate with `αᵢ = 0` and `b̂ᵢ ≠ 0`.
pub(crate) fn forced_multiplier(cf: &CanonicalForm, tol: &Tolerances) -> Option<f64> {
    let alpha_scale = cf.alpha.amax().max(f64::MIN_POSITIVE);
    (cf.n1..cf.dim())
        .find(|&i| cf.alpha[i].abs() <= tol.singular * alpha_scale && cf.b_hat[i] != 0.0)
        .map(|i| -cf.a_hat[i] / cf.b_hat[i])
}

/// Canonicalizes `inst` and computes a certified global minimizer.
pub fn solve_global(inst: &GtrsInstance, tol: &Tolerances) -> Result<GlobalResult> {
    let cf = reduce_to_standard_form(inst, tol)?;
    let roots = match build_secular(&cf, tol) {
        Ok(sf) => sf.find_real_roots(tol)?,
        Err(GtrsError::SingularFreeBlock { .. }) => Vec::new(),
        Err(e) => return Err(e),
    };
    solve_global_with(inst, &cf, &roots, forced_multiplier(&cf, tol), tol)
}
