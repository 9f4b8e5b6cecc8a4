//! Inertia, the semidefinite multiplier interval, and curvature on the
//! tangent hyperplane of the constraint.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::canonical::CanonicalForm;
use crate::error::{GtrsError, Result};
use crate::instance::Sense;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Inertia {
    pub n_plus: usize,
    pub n_zero: usize,
    pub n_minus: usize,
}

impl Inertia {
    /// Eigenvalues with `|ev| ≤ tol·max|ev|` count as zero.
    pub fn from_eigenvalues(eigs: &[f64], tol: f64) -> Self {
        let norm = eigs.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        let cut = tol * norm;
        let mut out = Self {
            n_plus: 0,
            n_zero: 0,
            n_minus: 0,
        };
        for &e in eigs {
            if e.abs() <= cut {
                out.n_zero += 1;
            } else if e > 0.0 {
                out.n_plus += 1;
            } else {
                out.n_minus += 1;
            }
        }
        out
    }
}

impl std::fmt::Display for Inertia {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.n_plus, self.n_zero, self.n_minus)
    }
}

/// Sign counts of the eigenvalues of a symmetric matrix.
pub fn inertia(m: &DMatrix<f64>, tol: f64) -> Inertia {
    let eigs = m.symmetric_eigenvalues();
    Inertia::from_eigenvalues(eigs.as_slice(), tol)
}

/// Eigenvalue summary of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spectrum {
    pub inertia: Inertia,
    pub min_eig: f64,
    /// Spectral norm.
    pub norm: f64,
}

pub fn spectrum(m: &DMatrix<f64>, tol: f64) -> Spectrum {
    let eigs = m.symmetric_eigenvalues();
    Spectrum {
        inertia: Inertia::from_eigenvalues(eigs.as_slice(), tol),
        min_eig: eigs.iter().copied().fold(f64::INFINITY, f64::min),
        norm: eigs.iter().fold(0.0f64, |m, e| m.max(e.abs())),
    }
}

/// A closed interval of multipliers; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdInterval {
    pub lo: f64,
    pub hi: f64,
}

impl PsdInterval {
    pub fn contains(&self, l: f64, slack: f64) -> bool {
        l >= self.lo - slack * (1.0 + self.lo.abs()) && l <= self.hi + slack * (1.0 + self.hi.abs())
    }

    /// The interval in original multipliers, `λ = λ̂/σ`.
    pub fn unscaled(&self, sigma: f64) -> Self {
        Self {
            lo: self.lo / sigma,
            hi: self.hi / sigma,
        }
    }

    /// Finite endpoints, low first.
    pub fn finite_ends(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if self.lo.is_finite() {
            out.push(self.lo);
        }
        if self.hi.is_finite() && self.hi != self.lo {
            out.push(self.hi);
        }
        out
    }
}

/// Canonical multipliers `λ̂` with `A + λB ⪰ 0` (and `λ̂ ≥ 0` for the
/// inequality sense), or `None` when there are none.
///
/// With diagonal data the condition reads `αᵢ + λβᵢ ≥ 0` on the curved block
/// and `αᵢ ≥ 0` on the free block.
pub fn psd_interval(cf: &CanonicalForm, sense: Sense, tol: &Tolerances) -> Option<PsdInterval> {
    let scale = cf.alpha.amax().max(cf.beta.amax());
    for i in cf.n1..cf.dim() {
        if cf.alpha[i] < -tol.psd * scale {
            return None;
        }
    }
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for i in 0..cf.n1 {
        let r = -cf.alpha[i] / cf.beta[i];
        if cf.beta[i] > 0.0 {
            lo = lo.max(r);
        } else {
            hi = hi.min(r);
        }
    }
    if sense == Sense::Inequality {
        lo = lo.max(0.0);
    }
    (lo <= hi).then_some(PsdInterval { lo, hi })
}

/// `λ_min(ZᵀGZ)` for an orthonormal basis `Z` of the hyperplane orthogonal
/// to `grad`.
///
/// `Z` is taken from the Householder reflector mapping `grad` onto a
/// coordinate axis; the reflected matrix minus that row and column is
/// `ZᵀGZ`.
pub fn tangent_min_curvature(g: &DMatrix<f64>, grad: &DVector<f64>) -> Result<f64> {
    let n = g.nrows();
    let norm = grad.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(GtrsError::ZeroGradient);
    }
    if n == 1 {
        return Ok(f64::INFINITY);
    }
    let u = grad / norm;
    let k = u.iamax();
    let mut v = u.clone();
    v[k] += u[k].signum();
    let vv = v.dot(&v);
    // H G H with H = I − 2vvᵀ/vᵀv, as a rank-two update
    let w = g * &v * (2.0 / vv);
    let c = v.dot(&w) / vv;
    let p = &w - &v * c;
    let reflected = g - &v * p.transpose() - &p * v.transpose();
    let reduced = reflected.remove_row(k).remove_column(k);
    let reduced = (&reduced + reduced.transpose()) * 0.5;
    Ok(reduced
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
}
