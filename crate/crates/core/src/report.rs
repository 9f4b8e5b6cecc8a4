//! The full pipeline: canonicalize, find secular roots, certify the global
//! minimizer, enumerate and classify KKT points.

use nalgebra::DVector;
use serde::Serialize;

use crate::canonical::{reduce_to_standard_form, DefiniteCombination, Pathway};
use crate::error::{GtrsError, Result};
use crate::global::{forced_multiplier, solve_global, solve_global_with, GlobalResult};
use crate::instance::{GtrsInstance, Sense};
use crate::local::{check_nonglobal_set, classify, certify_point, enumerate_kkt, Classification, KktPoint};
use crate::oracle::{neighborhood_test, DEFAULT_SEED};
use crate::secular::build_secular;
use crate::spectral::psd_interval;
use crate::tolerances::Tolerances;

/// Radius and sample count of the automatic neighborhood check.
pub const AUTO_CHECK_RADIUS: f64 = 1e-3;
pub const AUTO_CHECK_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RootDiagnostic {
    /// Original multiplier.
    pub lambda: f64,
    pub residual: f64,
    pub multiple: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct OracleCheck {
    pub lambda: f64,
    pub passed: bool,
    pub worst_violation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub n: usize,
    pub n1: usize,
    pub n2: usize,
    /// Constraint scale `σ`, with `g = σĝ`.
    pub sigma: f64,
    pub c_hat: f64,
    pub pathway: Pathway,
    pub combination: Option<DefiniteCombination>,
    /// The matrices were already diagonal and no definite combination was
    /// found; nonglobal candidates were checked by sampling.
    pub definiteness_unverified: bool,
    pub count_bound: usize,
    /// Degree of the secular numerator, absent when it vanishes.
    pub secular_degree: Option<usize>,
    pub roots: Vec<RootDiagnostic>,
    pub degenerate_roots: Vec<f64>,
    pub oracle_checks: Vec<OracleCheck>,
    pub notes: Vec<String>,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub sense: Sense,
    pub global: GlobalResult,
    pub local_nonglobal: Vec<KktPoint>,
    pub kkt_all: Vec<KktPoint>,
    pub diagnostics: Diagnostics,
}

/// Runs the full pipeline.
///
/// A free coordinate with no curvature but a linear term leaves `φ`
/// undefined; the global solve still runs and the KKT list stays empty.
/// A hard case that cannot be completed is reported as uncertified. Both
/// are recorded in the diagnostic notes.
pub fn solve(inst: &GtrsInstance, tol: &Tolerances) -> Result<SolveReport> {
    let cf = reduce_to_standard_form(inst, tol)?;
    let n = cf.dim();
    let count_bound = (cf.n1 + 1).min(n);
    let mut notes = Vec::new();
    let sf = match build_secular(&cf, tol) {
        Ok(sf) => Some(sf),
        Err(GtrsError::SingularFreeBlock { index }) => {
            notes.push(format!(
                "free coordinate {index} has no curvature; KKT enumeration skipped"
            ));
            None
        }
        Err(e) => return Err(e),
    };
    let roots = match &sf {
        Some(sf) => sf.find_real_roots(tol)?,
        None => Vec::new(),
    };
    if cf.b_hat.iter().all(|&v| v == 0.0) {
        let signs = |pos: bool| cf.beta.iter().all(|&b| if pos { b >= 0.0 } else { b <= 0.0 });
        let empty = match inst.sense() {
            Sense::Equality => cf.c_hat > 0.0 && signs(true) || cf.c_hat < 0.0 && signs(false),
            Sense::Inequality => cf.c_hat > 0.0 && signs(true),
        };
        if empty {
            notes.push("the constraint set is empty".into());
        }
    }
    if sf.as_ref().is_some_and(|s| s.is_identically_zero()) {
        notes.push("secular function vanishes identically".into());
    }

    let global = match solve_global_with(inst, &cf, &roots, forced_multiplier(&cf, tol), tol) {
        Ok(g) => g,
        Err(GtrsError::HardCaseIncomplete { lambda }) => {
            notes.push(format!(
                "hard case at lambda = {lambda}: no null-space step reaches the constraint"
            ));
            GlobalResult::uncertified(
                psd_interval(&cf, inst.sense(), tol).map(|iv| iv.unscaled(cf.scale)),
            )
        }
        Err(e) => return Err(e),
    };
    let global_value = global.certified_value();

    let enumeration = match &sf {
        Some(sf) => enumerate_kkt(inst, &cf, sf, &roots, tol)?,
        None => Default::default(),
    };
    let definiteness_unverified = cf.combination.is_none();
    let mut oracle_checks = Vec::new();
    let mut kkt_all = Vec::with_capacity(enumeration.points.len());
    for pt in enumeration.points {
        let mut pt = classify(pt, inst.sense(), global_value, tol);
        if definiteness_unverified && pt.classification == Classification::LocalNonglobal {
            let rep = neighborhood_test(inst, &pt.x, AUTO_CHECK_RADIUS, AUTO_CHECK_SAMPLES, DEFAULT_SEED)?;
            oracle_checks.push(OracleCheck {
                lambda: pt.lambda,
                passed: rep.passed,
                worst_violation: rep.worst_violation,
            });
            if !rep.passed {
                notes.push(format!(
                    "candidate at lambda = {} refuted by sampling",
                    pt.lambda
                ));
                pt.classification = Classification::SaddleOrMax;
            }
        }
        kkt_all.push(pt);
    }
    let nonglobal: Vec<&KktPoint> = kkt_all
        .iter()
        .filter(|p| p.classification == Classification::LocalNonglobal)
        .collect();
    check_nonglobal_set(&nonglobal, count_bound)?;
    let local_nonglobal = nonglobal.into_iter().cloned().collect();

    let diagnostics = Diagnostics {
        n,
        n1: cf.n1,
        n2: cf.n2,
        sigma: cf.scale,
        c_hat: cf.c_hat,
        pathway: cf.pathway,
        combination: cf.combination,
        definiteness_unverified,
        count_bound,
        secular_degree: sf.as_ref().and_then(|s| s.numerator.degree()),
        roots: roots
            .iter()
            .map(|r| RootDiagnostic {
                lambda: r.lambda / cf.scale,
                residual: r.residual,
                multiple: r.multiple,
            })
            .collect(),
        degenerate_roots: enumeration.degenerate_roots,
        oracle_checks,
        notes,
        tolerances: *tol,
    };
    Ok(SolveReport {
        sense: inst.sense(),
        global,
        local_nonglobal,
        kkt_all,
        diagnostics,
    })
}

/// The certified local nonglobal minimizers of `inst`.
pub fn enumerate_local_nonglobal(inst: &GtrsInstance, tol: &Tolerances) -> Result<Vec<KktPoint>> {
    Ok(solve(inst, tol)?.local_nonglobal)
}

/// Certifies and classifies a user-supplied pair `(x, λ)`.
pub fn verify_point(
    inst: &GtrsInstance,
    x: &DVector<f64>,
    lambda: f64,
    tol: &Tolerances,
) -> Result<KktPoint> {
    let cf = reduce_to_standard_form(inst, tol)?;
    let (phi_prime, positive) = match build_secular(&cf, tol) {
        Ok(sf) => {
            let l = lambda * cf.scale;
            (
                sf.eval_phi_prime(l).ok().map(|d| cf.scale * cf.scale * d),
                sf.phi_prime_positive(l, tol).unwrap_or(false),
            )
        }
        Err(GtrsError::SingularFreeBlock { .. }) => (None, false),
        Err(e) => return Err(e),
    };
    let global_value = solve_global(inst, tol)
        .ok()
        .and_then(|g| g.certified_value());
    let pt = certify_point(inst, x.clone(), lambda, phi_prime, positive, tol)?;
    Ok(classify(pt, inst.sense(), global_value, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{unbounded_3d, unit_hyperbola, hyperbola, unit_ball_trs};
    use crate::global::GlobalStatus;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn unbounded_3d_report() {
        let r = solve(&unbounded_3d(), &tol()).unwrap();
        assert_eq!(r.global.status, GlobalStatus::NoPsdCertificate);
        assert!(r.diagnostics.definiteness_unverified);
        assert_eq!(r.diagnostics.oracle_checks.len(), 1);
        assert!(r.diagnostics.oracle_checks[0].passed);
        assert_eq!(r.local_nonglobal.len(), 1);
    }

    #[test]
    fn unit_hyperbola_inequality_variant_keeps_only_the_positive_multiplier_minimizer() {
        // Of the two nonglobal minimizers on yz = 1, only the one with λ > 0
        // survives when the interior yz < 1 becomes feasible; at the other,
        // ∇f points along ∇g and the objective drops into the interior.
        let eq = solve(&unit_hyperbola(), &tol()).unwrap();
        let le_inst = hyperbola(1.0, Sense::Inequality);
        let le = solve(&le_inst, &tol()).unwrap();
        assert_eq!(le.kkt_all.len(), 4);
        assert_eq!(eq.local_nonglobal.len(), 2);
        assert_eq!(le.local_nonglobal.len(), 1);
        let kept = &le.local_nonglobal[0];
        assert!(kept.lambda > 0.0);
        for p in &eq.local_nonglobal {
            let rep = neighborhood_test(&le_inst, &p.x, 1e-3, 1000, DEFAULT_SEED).unwrap();
            if p.lambda > 0.0 {
                assert!((&p.x - &kept.x).amax() < 1e-9);
                assert!(rep.passed);
            } else {
                assert!(!rep.passed);
            }
        }
        assert!((le.global.value.unwrap() - eq.global.value.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn empty_feasible_set_is_noted() {
        use nalgebra::DMatrix;
        let inst = GtrsInstance::new(
            DMatrix::identity(2, 2),
            DVector::from_row_slice(&[1.0, 0.0]),
            DMatrix::identity(2, 2),
            DVector::zeros(2),
            1.0,
            Sense::Inequality,
        )
        .unwrap();
        let r = solve(&inst, &tol()).unwrap();
        assert_eq!(r.global.status, GlobalStatus::NoPsdCertificate);
        assert!(r.diagnostics.notes.iter().any(|n| n.contains("empty")));
        let r = solve(&unit_ball_trs(), &tol()).unwrap();
        assert!(r.diagnostics.notes.is_empty());
    }

    #[test]
    fn ball_has_no_nonglobal_minimizer() {
        let r = solve(&unit_ball_trs(), &tol()).unwrap();
        assert!(r.local_nonglobal.is_empty());
        assert_eq!(r.global.status, GlobalStatus::Optimal);
    }

    #[test]
    fn verify_reclassifies_a_known_point() {
        let inst = unbounded_3d();
        let p = verify_point(&inst, &DVector::from_vec(vec![-1.0, 0.0, 0.0]), 1.0, &tol()).unwrap();
        assert_eq!(p.classification, Classification::LocalNonglobal);
        let q = verify_point(&inst, &DVector::from_vec(vec![-1.0, 0.0, 0.0]), 0.5, &tol()).unwrap();
        assert_eq!(q.classification, Classification::SaddleOrMax);
        assert!(verify_point(&inst, &DVector::zeros(2), 1.0, &tol()).is_err());
    }
}
