//! KKT enumeration and certification of local nonglobal minimizers.
//!
//! Every KKT point on the constraint boundary comes from a root `λ` of the
//! secular function. A point is a strict local nonglobal minimizer when the
//! constraint is active, `A + λB` has exactly one negative and no zero
//! eigenvalue, the Hessian is positive definite on the tangent hyperplane,
//! `φ′(λ) > 0`, and (for inequalities) `λ > 0`.

use nalgebra::DVector;
use serde::Serialize;

use crate::canonical::CanonicalForm;
use crate::error::{GtrsError, Result};
use crate::instance::{GtrsInstance, Sense};
use crate::secular::{SecularFunction, SecularRoot};
use crate::serde_util;
use crate::spectral::{spectrum, tangent_min_curvature, Inertia};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// `A + λB ⪰ 0` with a stationary, feasible point.
    GlobalCandidate,
    LocalNonglobal,
    SaddleOrMax,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::GlobalCandidate => "global_candidate",
            Self::LocalNonglobal => "local_nonglobal",
            Self::SaddleOrMax => "saddle_or_max",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Certificates {
    pub active: bool,
    /// `λ > 0`; always true for equality constraints.
    pub strict_complementarity: bool,
    /// Inertia `(n − 1, 0, 1)`.
    pub one_negative: bool,
    pub phi_prime_positive: bool,
    pub second_order_positive: bool,
}

impl Certificates {
    pub fn all(&self) -> bool {
        self.active
            && self.strict_complementarity
            && self.one_negative
            && self.phi_prime_positive
            && self.second_order_positive
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KktPoint {
    #[serde(with = "serde_util::vector")]
    pub x: DVector<f64>,
    pub lambda: f64,
    pub value: f64,
    pub constraint_value: f64,
    pub kkt_residual: f64,
    pub inertia: Inertia,
    pub min_eig: f64,
    pub pencil_norm: f64,
    /// `φ′(λ)` in original multipliers; absent on a pole.
    pub phi_prime: Option<f64>,
    /// `λ_min` of the Hessian restricted to the tangent hyperplane; absent
    /// when `∇g(x) = 0`.
    pub tangent_curv: Option<f64>,
    pub classification: Classification,
    pub certificates: Certificates,
    /// Stationarity residual within tolerance.
    pub stationary: bool,
    /// Tangent curvature too close to zero to decide.
    pub borderline: bool,
    /// `∇g(x) ≠ 0`.
    pub licq: bool,
}

/// KKT points from the secular roots, plus the roots at which `A + λB`
/// is singular (original multipliers).
#[derive(Debug, Clone, Default)]
pub struct KktEnumeration {
    pub points: Vec<KktPoint>,
    pub degenerate_roots: Vec<f64>,
}

/// Evaluates every certificate at `(x, λ)` in original coordinates.
/// `phi_prime` is supplied by the caller; the classification is left as
/// [`Classification::SaddleOrMax`] until [`classify`] runs.
pub fn certify_point(
    inst: &GtrsInstance,
    x: DVector<f64>,
    lambda: f64,
    phi_prime: Option<f64>,
    phi_prime_positive: bool,
    tol: &Tolerances,
) -> Result<KktPoint> {
    let g = inst.eval_constraint(&x)?;
    let value = inst.eval_objective(&x)?;
    let pencil = inst.pencil(lambda);
    let spec = spectrum(&pencil, tol.inertia_zero);
    let grad = inst.constraint_gradient(&x);
    let tangent_curv = match tangent_min_curvature(&pencil, &grad) {
        Ok(c) => Some(c),
        Err(GtrsError::ZeroGradient) => None,
        Err(e) => return Err(e),
    };
    let curv_cut = tol.curvature * spec.norm;
    let kkt_residual = inst.kkt_residual(&x, lambda);
    let certificates = Certificates {
        active: g.abs() <= tol.active * inst.constraint_scale(&x),
        strict_complementarity: match inst.sense() {
            Sense::Equality => true,
            Sense::Inequality => lambda > tol.lambda_positive,
        },
        one_negative: spec.inertia.n_minus == 1 && spec.inertia.n_zero == 0,
        phi_prime_positive,
        second_order_positive: tangent_curv.is_some_and(|c| c > curv_cut),
    };
    Ok(KktPoint {
        lambda,
        value,
        constraint_value: g,
        stationary: kkt_residual <= tol.kkt_residual * inst.kkt_scale(&x, lambda),
        kkt_residual,
        inertia: spec.inertia,
        min_eig: spec.min_eig,
        pencil_norm: spec.norm,
        phi_prime,
        borderline: tangent_curv.is_some_and(|c| c.abs() <= curv_cut),
        licq: tangent_curv.is_some(),
        tangent_curv,
        classification: Classification::SaddleOrMax,
        certificates,
        x,
    })
}

/// Assigns the classification.
///
/// `global_value` is the certified global minimum, if any; without one,
/// every certified local minimizer is nonglobal.
pub fn classify(
    mut pt: KktPoint,
    sense: Sense,
    global_value: Option<f64>,
    tol: &Tolerances,
) -> KktPoint {
    let above_global =
        global_value.is_none_or(|gv| pt.value > gv + 1e-9 * (1.0 + gv.abs()));
    let psd = pt.min_eig >= -tol.psd * pt.pencil_norm;
    let dual_feasible = sense == Sense::Equality || pt.lambda >= 0.0;
    pt.classification = if pt.stationary && pt.certificates.all() && above_global {
        Classification::LocalNonglobal
    } else if pt.stationary && pt.certificates.active && dual_feasible && (psd || pt.certificates.all()) {
        Classification::GlobalCandidate
    } else {
        Classification::SaddleOrMax
    };
    pt
}

/// KKT points at the secular roots (canonical multipliers), certified in
/// original coordinates but not yet classified.
pub fn enumerate_kkt(
    inst: &GtrsInstance,
    cf: &CanonicalForm,
    sf: &SecularFunction,
    roots: &[SecularRoot],
    tol: &Tolerances,
) -> Result<KktEnumeration> {
    let n = cf.dim();
    let mut out = KktEnumeration::default();
    for root in roots {
        let l = root.lambda;
        let pscale = cf.pencil_scale(l).max(f64::MIN_POSITIVE);
        let mut x_hat = DVector::zeros(n);
        let mut singular = false;
        for i in 0..n {
            let pivot = cf.alpha[i] + l * cf.beta[i];
            if pivot.abs() <= tol.singular * pscale {
                singular = true;
                break;
            }
            x_hat[i] = -(cf.a_hat[i] + l * cf.b_hat[i]) / pivot;
        }
        if singular {
            out.degenerate_roots.push(l / cf.scale);
            continue;
        }
        let (x, lambda) = cf.map_back(&x_hat, l);
        let s2 = cf.scale * cf.scale;
        let phi_prime = sf.eval_phi_prime(l).ok().map(|d| s2 * d);
        let positive = !root.multiple && sf.phi_prime_positive(l, tol).unwrap_or(false);
        out.points
            .push(certify_point(inst, x, lambda, phi_prime, positive, tol)?);
    }
    Ok(out)
}

/// Checks the count bound and mutual isolation of the nonglobal points.
pub fn check_nonglobal_set(points: &[&KktPoint], bound: usize) -> Result<()> {
    if points.len() > bound {
        return Err(GtrsError::CountBoundViolated {
            count: points.len(),
            bound,
        });
    }
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            let scale = 1.0 + p.x.amax().max(q.x.amax());
            if (&p.x - &q.x).amax() <= 1e-6 * scale {
                return Err(GtrsError::NotIsolated {
                    first: p.lambda,
                    second: q.lambda,
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{unbounded_3d, unit_hyperbola, homogeneous};
    use crate::report::solve;
    use nalgebra::DMatrix;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn unbounded_3d_point_is_local_nonglobal_with_all_certificates() {
        let r = solve(&unbounded_3d(), &tol()).unwrap();
        assert_eq!(r.kkt_all.len(), 1);
        let p = &r.kkt_all[0];
        assert!((&p.x - DVector::from_vec(vec![-1.0, 0.0, 0.0])).amax() < 1e-10);
        assert!((p.lambda - 1.0).abs() < 1e-10);
        assert_eq!(
            p.inertia,
            Inertia {
                n_plus: 2,
                n_zero: 0,
                n_minus: 1
            }
        );
        assert!((p.phi_prime.unwrap() - 2.0).abs() < 1e-9);
        assert!((p.tangent_curv.unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(p.classification, Classification::LocalNonglobal);
        assert!(p.certificates.all());
        assert_eq!(r.local_nonglobal.len(), 1);
    }

    #[test]
    fn unit_hyperbola_has_four_kkt_points_and_two_nonglobal_minimizers() {
        let r = solve(&unit_hyperbola(), &tol()).unwrap();
        assert_eq!(r.kkt_all.len(), 4);
        assert_eq!(r.local_nonglobal.len(), 2);
        let global: Vec<_> = r
            .kkt_all
            .iter()
            .filter(|p| p.classification == Classification::GlobalCandidate)
            .collect();
        assert_eq!(global.len(), 1);
        assert!(global[0].lambda.abs() <= 2.0);
        for p in &r.local_nonglobal {
            assert!(p.value > r.global.value.unwrap());
        }
    }

    #[test]
    fn homogeneous_instance_has_no_kkt_points() {
        for sense in [Sense::Equality, Sense::Inequality] {
            let r = solve(&homogeneous(sense), &tol()).unwrap();
            assert!(r.kkt_all.is_empty());
            assert!(r.local_nonglobal.is_empty());
        }
    }

    #[test]
    fn two_negative_eigenvalues_is_saddle() {
        // f = -x² - y² + z² + 2x, g = x² + y² + z² - 1: at (1, 0, 0) with λ = 0
        // the pencil is diag(-1, -1, 1)
        let inst = GtrsInstance::new(
            DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, -1.0, 1.0])),
            DVector::from_vec(vec![1.0, 0.0, 0.0]),
            DMatrix::identity(3, 3),
            DVector::zeros(3),
            -1.0,
            Sense::Equality,
        )
        .unwrap();
        let pt = certify_point(
            &inst,
            DVector::from_vec(vec![1.0, 0.0, 0.0]),
            0.0,
            None,
            true,
            &tol(),
        )
        .unwrap();
        assert!(pt.stationary);
        assert_eq!(pt.inertia.n_minus, 2);
        let pt = classify(pt, Sense::Equality, None, &tol());
        assert_eq!(pt.classification, Classification::SaddleOrMax);
    }

    #[test]
    fn nonglobal_requires_value_above_the_global_one() {
        let r = solve(&unbounded_3d(), &tol()).unwrap();
        let p = r.kkt_all[0].clone();
        let p = classify(p, Sense::Inequality, Some(-1.0), &tol());
        assert_ne!(p.classification, Classification::LocalNonglobal);
        let p = classify(p, Sense::Inequality, Some(-2.0), &tol());
        assert_eq!(p.classification, Classification::LocalNonglobal);
    }

    #[test]
    fn negative_multiplier_fails_strict_complementarity() {
        let inst = unbounded_3d();
        let pt = certify_point(
            &inst,
            DVector::from_vec(vec![-1.0, 0.0, 0.0]),
            -1.0,
            None,
            true,
            &tol(),
        )
        .unwrap();
        assert!(!pt.certificates.strict_complementarity);
        assert!(!pt.stationary);
    }

    #[test]
    fn count_and_isolation_checks() {
        let r = solve(&unit_hyperbola(), &tol()).unwrap();
        let pts: Vec<&KktPoint> = r.local_nonglobal.iter().collect();
        assert!(check_nonglobal_set(&pts, 2).is_ok());
        assert!(matches!(
            check_nonglobal_set(&pts, 1),
            Err(GtrsError::CountBoundViolated { count: 2, bound: 1 })
        ));
        let dup = vec![pts[0], pts[0]];
        assert!(matches!(
            check_nonglobal_set(&dup, 2),
            Err(GtrsError::NotIsolated { .. })
        ));
    }
}
