//! The secular function `φ(λ) = ĝ(x̂(λ))` and its real roots.
//!
//! In canonical coordinates the stationary point for a multiplier `λ` is
//! `x̂ᵢ(λ) = −(âᵢ + λb̂ᵢ)/(αᵢ + λβᵢ)`, so
//!
//! ```text
//! φ(λ) = Σ_{i<n₁} βᵢ(âᵢ + λb̂ᵢ)²/(αᵢ + λβᵢ)²  −  Σ_{i≥n₁} 2b̂ᵢ(âᵢ + λb̂ᵢ)/αᵢ  +  ĉ
//! ```
//!
//! Every KKT multiplier with `A + λB` nonsingular is a root of `φ`.

use serde::Serialize;

use crate::canonical::CanonicalForm;
use crate::error::{GtrsError, Result};
use crate::poly::Polynomial;
use crate::tolerances::Tolerances;

/// One term `β(â + λb̂)²/(α + λβ)²` of the curved block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleTerm {
    pub beta: f64,
    pub alpha: f64,
    pub a_hat: f64,
    pub b_hat: f64,
}

impl PoleTerm {
    pub fn pole(&self) -> f64 {
        -self.alpha / self.beta
    }

    fn value(&self, l: f64) -> f64 {
        let u = self.a_hat + l * self.b_hat;
        let v = self.alpha + l * self.beta;
        self.beta * (u / v) * (u / v)
    }

    fn derivative(&self, l: f64) -> f64 {
        let u = self.a_hat + l * self.b_hat;
        let v = self.alpha + l * self.beta;
        2.0 * self.beta * (u / v) * (self.b_hat * v - u * self.beta) / (v * v)
    }

    /// `(α + λβ)/(|α| + |β|)`; normalized so products stay in range.
    fn factor(&self) -> Polynomial {
        let s = self.alpha.abs() + self.beta.abs();
        Polynomial::linear(self.alpha / s, self.beta / s)
    }
}

/// One term `−2b̂(â + λb̂)/α` of the free block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreeTerm {
    pub alpha: f64,
    pub a_hat: f64,
    pub b_hat: f64,
}

impl FreeTerm {
    fn value(&self, l: f64) -> f64 {
        -2.0 * self.b_hat * (self.a_hat + l * self.b_hat) / self.alpha
    }

    fn derivative(&self) -> f64 {
        -2.0 * self.b_hat * self.b_hat / self.alpha
    }
}

/// A real root of `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecularRoot {
    pub lambda: f64,
    /// `|φ(λ)|`.
    pub residual: f64,
    /// Set when several numerator roots merged here.
    pub multiple: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SecularFunction {
    /// Curved-block terms with a nonzero numerator; the rest vanish
    /// identically and are dropped.
    pub quad_terms: Vec<PoleTerm>,
    pub free_terms: Vec<FreeTerm>,
    /// Free-block terms plus `ĉ`; degree at most one.
    #[serde(skip)]
    pub affine_part: Polynomial,
    /// Sorted distinct poles of `φ`.
    pub poles: Vec<f64>,
    /// Sorted distinct `−αᵢ/βᵢ` over the whole curved block, including
    /// removable ones; `A + λB` is singular exactly there.
    pub singular_points: Vec<f64>,
    /// `φ(λ)·Π(αᵢ + λβᵢ)²/(|αᵢ| + |βᵢ|)²` over `quad_terms`.
    #[serde(skip)]
    pub numerator: Polynomial,
    pub c_hat: f64,
    pub n1: usize,
    pub n: usize,
}

fn sorted_distinct(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Builds `φ` from a canonical form.
///
/// Fails with [`GtrsError::SingularFreeBlock`] when a free coordinate has
/// no objective curvature but a nonzero linear term, since `x̂(λ)` is then
/// not defined by inversion.
pub fn build_secular(cf: &CanonicalForm, tol: &Tolerances) -> Result<SecularFunction> {
    let n = cf.dim();
    let alpha_scale = cf.alpha.amax().max(f64::MIN_POSITIVE);
    let lin_scale = 1.0 + cf.a_hat.amax() + cf.b_hat.amax();
    let mut quad_terms = Vec::new();
    let mut singular_points = Vec::new();
    for i in 0..cf.n1 {
        let t = PoleTerm {
            beta: cf.beta[i],
            alpha: cf.alpha[i],
            a_hat: cf.a_hat[i],
            b_hat: cf.b_hat[i],
        };
        singular_points.push(t.pole());
        if t.a_hat != 0.0 || t.b_hat != 0.0 {
            quad_terms.push(t);
        }
    }
    let mut free_terms = Vec::new();
    for i in cf.n1..n {
        let (alpha, a_hat, b_hat) = (cf.alpha[i], cf.a_hat[i], cf.b_hat[i]);
        if alpha.abs() <= tol.singular * alpha_scale {
            if a_hat.abs().max(b_hat.abs()) > tol.singular * lin_scale {
                return Err(GtrsError::SingularFreeBlock { index: i });
            }
            continue;
        }
        if b_hat != 0.0 {
            free_terms.push(FreeTerm {
                alpha,
                a_hat,
                b_hat,
            });
        }
    }

    let mut affine_part = Polynomial::constant(cf.c_hat);
    for t in &free_terms {
        let k = -2.0 * t.b_hat / t.alpha;
        affine_part = &affine_part + &Polynomial::linear(k * t.a_hat, k * t.b_hat);
    }

    let squares: Vec<Polynomial> = quad_terms
        .iter()
        .map(|t| {
            let f = t.factor();
            &f * &f
        })
        .collect();
    let full = squares
        .iter()
        .fold(Polynomial::constant(1.0), |acc, s| &acc * s);
    let mut numerator = &affine_part * &full;
    for (i, t) in quad_terms.iter().enumerate() {
        let s = t.alpha.abs() + t.beta.abs();
        let u = Polynomial::linear(t.a_hat / s, t.b_hat / s);
        let others = squares
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(&u * &u, |acc, (_, sq)| &acc * sq);
        numerator = &numerator + &others.scale(t.beta);
    }

    Ok(SecularFunction {
        poles: sorted_distinct(quad_terms.iter().map(PoleTerm::pole).collect()),
        singular_points: sorted_distinct(singular_points),
        quad_terms,
        free_terms,
        affine_part,
        numerator,
        c_hat: cf.c_hat,
        n1: cf.n1,
        n,
    })
}

impl SecularFunction {
    /// `min(n₁ + 1, n)`, the bound on local nonglobal minimizers; `φ` has
    /// at most twice this many roots.
    pub fn count_bound(&self) -> usize {
        (self.n1 + 1).min(self.n)
    }

    /// The denominator matching [`Self::numerator`].
    pub fn denominator(&self) -> Polynomial {
        self.quad_terms
            .iter()
            .fold(Polynomial::constant(1.0), |acc, t| {
                let f = t.factor();
                &(&acc * &f) * &f
            })
    }

    pub fn is_identically_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    fn check_pole(&self, l: f64) -> Result<()> {
        if self
            .poles
            .iter()
            .any(|p| (l - p).abs() <= 1e-12 * (1.0 + p.abs()))
        {
            return Err(GtrsError::PoleEvaluation { lambda: l });
        }
        Ok(())
    }

    /// `φ(λ)`, summed term by term.
    pub fn eval_phi(&self, l: f64) -> Result<f64> {
        self.check_pole(l)?;
        Ok(self.phi_unchecked(l))
    }

    /// `φ′(λ)`, by differentiating each term.
    pub fn eval_phi_prime(&self, l: f64) -> Result<f64> {
        self.check_pole(l)?;
        Ok(self.phi_prime_unchecked(l))
    }

    fn phi_unchecked(&self, l: f64) -> f64 {
        self.quad_terms.iter().map(|t| t.value(l)).sum::<f64>()
            + self.free_terms.iter().map(|t| t.value(l)).sum::<f64>()
            + self.c_hat
    }

    fn phi_prime_unchecked(&self, l: f64) -> f64 {
        self.quad_terms.iter().map(|t| t.derivative(l)).sum::<f64>()
            + self.free_terms.iter().map(FreeTerm::derivative).sum::<f64>()
    }

    /// `Σ|terms|` at `λ`, the scale against which `|φ(λ)|` is judged.
    pub fn term_magnitude(&self, l: f64) -> f64 {
        self.quad_terms.iter().map(|t| t.value(l).abs()).sum::<f64>()
            + self.free_terms.iter().map(|t| t.value(l).abs()).sum::<f64>()
            + self.c_hat.abs()
    }

    /// `Σ|term′|` at `λ`, the scale against which `φ′(λ)` is judged.
    pub fn derivative_magnitude(&self, l: f64) -> f64 {
        self.quad_terms
            .iter()
            .map(|t| t.derivative(l).abs())
            .sum::<f64>()
            + self
                .free_terms
                .iter()
                .map(|t| t.derivative().abs())
                .sum::<f64>()
    }

    /// `φ′(λ) > phi_prime·(1 + Σ|term′|)`.
    pub fn phi_prime_positive(&self, l: f64, tol: &Tolerances) -> Option<bool> {
        let d = self.eval_phi_prime(l).ok()?;
        Some(d > tol.phi_prime * (1.0 + self.derivative_magnitude(l)))
    }

    /// The pole-free open interval containing `λ`.
    pub fn enclosing_interval(&self, l: f64) -> (f64, f64) {
        let hi_idx = self.poles.partition_point(|&p| p <= l);
        let lo = if hi_idx == 0 {
            f64::NEG_INFINITY
        } else {
            self.poles[hi_idx - 1]
        };
        let hi = self.poles.get(hi_idx).copied().unwrap_or(f64::INFINITY);
        (lo, hi)
    }

    fn near_singular_point(&self, l: f64, tol: &Tolerances) -> bool {
        self.singular_points
            .iter()
            .any(|p| (l - p).abs() <= tol.pole * p.abs().max(1.0))
    }

    fn accepts(&self, l: f64, tol: &Tolerances) -> bool {
        l.is_finite()
            && self.check_pole(l).is_ok()
            && self.phi_unchecked(l).abs() <= tol.root_residual * (1.0 + self.term_magnitude(l))
    }

    /// All real roots of `φ`, ascending.
    ///
    /// Candidates are the real eigenvalues of the numerator's companion
    /// matrix, polished by safeguarded Newton iteration on `φ` itself. A
    /// sign-change scan of every pole-free interval then recovers anything
    /// the eigenvalues missed. Roots on a singular point of the pencil are
    /// dropped. An identically zero `φ` yields no roots; check
    /// [`Self::is_identically_zero`].
    pub fn find_real_roots(&self, tol: &Tolerances) -> Result<Vec<SecularRoot>> {
        if self.is_identically_zero() {
            return Ok(Vec::new());
        }
        let mut found: Vec<(f64, bool)> = Vec::new();
        for z in self.numerator.complex_roots() {
            let rel = z.im.abs() / (1.0 + z.re.abs());
            let strict = rel <= tol.imag;
            // near-real eigenvalues of clustered roots are kept only when
            // polishing verifies them
            if !strict && rel > 1e-3 {
                continue;
            }
            if self.near_singular_point(z.re, tol) {
                continue;
            }
            if let Some(r) = self.polish(z.re) {
                if !self.near_singular_point(r, tol) {
                    found.push((r, false));
                }
            }
        }
        for r in self.bracket_scan(&found) {
            if !self.near_singular_point(r, tol) {
                found.push((r, false));
            }
        }

        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, bool)> = Vec::new();
        for (r, m) in found {
            match merged.last_mut() {
                Some(last) if (r - last.0).abs() <= tol.merge * last.0.abs().max(1.0) => {
                    if self.phi_unchecked(r).abs() < self.phi_unchecked(last.0).abs() {
                        last.0 = r;
                    }
                    last.1 = true;
                }
                _ => merged.push((r, m)),
            }
        }
        let roots: Vec<SecularRoot> = merged
            .into_iter()
            .filter(|&(r, _)| self.accepts(r, tol))
            .map(|(lambda, multiple)| SecularRoot {
                lambda,
                residual: self.phi_unchecked(lambda).abs(),
                multiple,
            })
            .collect();
        let bound = 2 * self.count_bound();
        if roots.len() > bound {
            return Err(GtrsError::CountBoundViolated {
                count: roots.len(),
                bound,
            });
        }
        Ok(roots)
    }

    /// Newton on `φ` from `start`, kept inside the enclosing pole-free
    /// interval; falls back to bisection on a nearby sign change.
    fn polish(&self, start: f64) -> Option<f64> {
        if self.check_pole(start).is_err() {
            return None;
        }
        let (lo, hi) = self.enclosing_interval(start);
        let mut x = start;
        let mut escaped = false;
        for _ in 0..30 {
            let f = self.phi_unchecked(x);
            if f == 0.0 {
                break;
            }
            let step = f / self.phi_prime_unchecked(x);
            let next = x - step;
            if !next.is_finite() || next <= lo || next >= hi {
                escaped = true;
                break;
            }
            x = next;
            if step.abs() <= 4.0 * f64::EPSILON * (1.0 + x.abs()) {
                break;
            }
        }
        let tol = Tolerances::default();
        if !escaped && self.accepts(x, &tol) {
            return Some(x);
        }
        // widen a bracket around the starting point
        let f0 = self.phi_unchecked(start);
        let mut h = 1e-8 * (1.0 + start.abs());
        for _ in 0..60 {
            let a = (start - h).max(lo + 0.5 * (start - lo).min(h));
            let b = (start + h).min(hi - 0.5 * (hi - start).min(h));
            let (fa, fb) = (self.phi_unchecked(a), self.phi_unchecked(b));
            if fa.signum() != f0.signum() {
                return Some(self.bisect(a, start));
            }
            if fb.signum() != f0.signum() {
                return Some(self.bisect(start, b));
            }
            h *= 2.0;
        }
        self.accepts(start, &tol).then_some(start)
    }

    /// Bisection on `[a, b]`, assuming a sign change.
    pub(crate) fn bisect(&self, mut a: f64, mut b: f64) -> f64 {
        let fa = self.phi_unchecked(a);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = self.phi_unchecked(m);
            if fm == 0.0 {
                return m;
            }
            if fm.signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    /// Sign changes of `φ` between samples of each pole-free interval that
    /// contain no known root, refined by bisection.
    fn bracket_scan(&self, known: &[(f64, bool)]) -> Vec<f64> {
        let mut out = Vec::new();
        let mut edges = vec![f64::NEG_INFINITY];
        edges.extend(self.poles.iter().copied());
        edges.push(f64::INFINITY);
        for w in edges.windows(2) {
            let samples = interval_samples(w[0], w[1]);
            for pair in samples.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                let (fa, fb) = (self.phi_unchecked(a), self.phi_unchecked(b));
                if !(fa.is_finite() && fb.is_finite()) || fa == 0.0 || fa.signum() == fb.signum()
                {
                    continue;
                }
                if known.iter().any(|&(r, _)| a <= r && r <= b) {
                    continue;
                }
                out.push(self.bisect(a, b));
            }
        }
        out
    }
}

/// Sample points strictly inside `(lo, hi)`, denser toward finite ends.
fn interval_samples(lo: f64, hi: f64) -> Vec<f64> {
    const K: usize = 48;
    let mut pts = Vec::new();
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            let w = hi - lo;
            for k in 1..K {
                // cosine spacing clusters samples near the poles
                let t = 0.5 * (1.0 - (std::f64::consts::PI * k as f64 / K as f64).cos());
                pts.push(lo + w * t);
            }
            for e in 3..=10 {
                let d = w * 10f64.powi(-e);
                pts.push(lo + d);
                pts.push(hi - d);
            }
        }
        (true, false) | (false, true) => {
            let (anchor, dir) = if lo.is_finite() { (lo, 1.0) } else { (hi, -1.0) };
            let s = 1.0 + anchor.abs();
            for e in -10..=12 {
                for m in [1.0, 3.0] {
                    pts.push(anchor + dir * s * m * 10f64.powi(e));
                }
            }
        }
        (false, false) => {
            for e in -6..=12 {
                for m in [1.0, 3.0] {
                    let d = m * 10f64.powi(e);
                    pts.push(d);
                    pts.push(-d);
                }
            }
            pts.push(0.0);
        }
    }
    pts.retain(|p| *p > lo && *p < hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::reduce_to_standard_form;
    use crate::fixtures::{unbounded_3d, unit_hyperbola, homogeneous};
    use crate::instance::Sense;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn secular(inst: &crate::GtrsInstance) -> SecularFunction {
        let cf = reduce_to_standard_form(inst, &tol()).unwrap();
        build_secular(&cf, &tol()).unwrap()
    }

    /// `φ(λ) = 25/(1+λ/2)² − 1/(1−λ/2)² − 1`.
    fn hyperbola_phi(l: f64) -> f64 {
        25.0 / (1.0 + l / 2.0).powi(2) - 1.0 / (1.0 - l / 2.0).powi(2) - 1.0
    }

    #[test]
    fn three_dimensional_example_is_linear() {
        let sf = secular(&unbounded_3d());
        assert!(sf.quad_terms.is_empty());
        assert!(sf.poles.is_empty());
        assert_eq!(sf.singular_points, vec![-1.0, 2.0]);
        for l in [-3.0, 0.0, 1.0, 2.5, 10.0] {
            assert_eq!(sf.eval_phi(l).unwrap(), 2.0 * (l - 1.0));
            assert_eq!(sf.eval_phi_prime(l).unwrap(), 2.0);
        }
        let roots = sf.find_real_roots(&tol()).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].lambda - 1.0).abs() < 1e-14);
        assert!(roots[0].residual < 1e-12);
        assert!(!roots[0].multiple);
    }

    #[test]
    fn homogeneous_instance_is_constant() {
        for sense in [Sense::Equality, Sense::Inequality] {
            let sf = secular(&homogeneous(sense));
            for l in [-5.0, 0.0, 0.3, 7.0] {
                assert_eq!(sf.eval_phi(l).unwrap(), -1.0);
                assert_eq!(sf.eval_phi_prime(l).unwrap(), 0.0);
            }
            assert!(sf.find_real_roots(&tol()).unwrap().is_empty());
        }
    }

    #[test]
    fn hyperbola_secular_matches_closed_form() {
        let sf = secular(&unit_hyperbola());
        assert_eq!(sf.poles.len(), 2);
        assert!((sf.poles[0] + 2.0).abs() < 1e-9 && (sf.poles[1] - 2.0).abs() < 1e-9);
        assert!((sf.eval_phi(0.0).unwrap() - 23.0).abs() < 1e-9);
        for k in 0..100 {
            let l = -9.9 + 0.2 * k as f64;
            if (l.abs() - 2.0).abs() < 1e-3 {
                continue;
            }
            let want = hyperbola_phi(l);
            assert!((sf.eval_phi(l).unwrap() - want).abs() < 1e-8 * (1.0 + want.abs()));
        }
        let roots = sf.find_real_roots(&tol()).unwrap();
        assert_eq!(roots.len(), 4);
        for r in &roots {
            assert!(hyperbola_phi(r.lambda).abs() < 1e-8);
            assert!(r.residual < 1e-10);
        }
        // exactly one root lies in the interval where A + λB ⪰ 0
        assert_eq!(roots.iter().filter(|r| r.lambda.abs() < 2.0).count(), 1);
    }

    #[test]
    fn phi_equals_constraint_along_the_stationary_curve() {
        let inst = unit_hyperbola();
        let cf = reduce_to_standard_form(&inst, &tol()).unwrap();
        let sf = build_secular(&cf, &tol()).unwrap();
        for k in 0..100 {
            let l = -5.0 + 0.1 * k as f64 + 0.013;
            if (l.abs() - 2.0).abs() < 1e-3 {
                continue;
            }
            let x = -(inst.pencil(l))
                .lu()
                .solve(&(inst.obj_linear() + inst.con_linear() * l))
                .unwrap();
            let g = inst.eval_constraint(&x).unwrap();
            let phi = sf.eval_phi(l).unwrap();
            assert!((g - phi).abs() < 1e-8 * (1.0 + g.abs()), "{l}: {g} vs {phi}");
        }
    }

    #[test]
    fn pole_evaluation_is_an_error() {
        let sf = secular(&unit_hyperbola());
        let p = sf.poles[1];
        assert!(matches!(sf.eval_phi(p), Err(GtrsError::PoleEvaluation { .. })));
        assert!(sf.eval_phi_prime(p).is_err());
    }

    #[test]
    fn singular_free_block_is_reported() {
        use nalgebra::{DMatrix, DVector};
        let inst = crate::GtrsInstance::new(
            DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, 0.0])),
            DVector::from_row_slice(&[0.0, 1.0]),
            DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, 0.0])),
            DVector::zeros(2),
            -1.0,
            Sense::Equality,
        )
        .unwrap();
        let cf = reduce_to_standard_form(&inst, &tol()).unwrap();
        assert!(matches!(
            build_secular(&cf, &tol()),
            Err(GtrsError::SingularFreeBlock { index: 1 })
        ));
    }

    #[test]
    fn numerator_over_denominator_is_phi() {
        let sf = secular(&unit_hyperbola());
        let den = sf.denominator();
        for k in 0..200 {
            let l = -20.0 + 0.2 * k as f64 + 0.001;
            if sf.poles.iter().any(|p| (l - p).abs() < 1e-6 * (1.0 + p.abs())) {
                continue;
            }
            let phi = sf.eval_phi(l).unwrap();
            let ratio = sf.numerator.eval(l) / den.eval(l);
            assert!((ratio - phi).abs() <= 1e-8 * (1.0 + phi.abs()));
        }
        assert!(sf.numerator.degree().unwrap() <= 2 * sf.count_bound());
    }

    #[test]
    fn rescaled_constraint_roots() {
        use nalgebra::{DMatrix, DVector};
        // x² − 1/4 = 0 with x = −1/(1+λ): λ ∈ {−3, 1}
        let inst = crate::GtrsInstance::new(
            DMatrix::from_element(1, 1, 1.0),
            DVector::from_element(1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            DVector::zeros(1),
            -0.25,
            Sense::Equality,
        )
        .unwrap();
        let cf = reduce_to_standard_form(&inst, &tol()).unwrap();
        assert_eq!((cf.scale, cf.c_hat), (0.25, -1.0));
        let sf = build_secular(&cf, &tol()).unwrap();
        let roots = sf.find_real_roots(&tol()).unwrap();
        let lambdas: Vec<f64> = roots.iter().map(|r| r.lambda / cf.scale).collect();
        assert_eq!(lambdas.len(), 2);
        assert!((lambdas[0] + 3.0).abs() < 1e-12 && (lambdas[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn double_roots_are_flagged() {
        use nalgebra::{DMatrix, DVector};
        // φ(λ) = 1/(1+λ)² + (λ−2)/4, numerator (λ−1)²(λ+2)
        let inst = crate::GtrsInstance::new(
            DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, -8.0])),
            DVector::from_row_slice(&[1.0, -2.0]),
            DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, 0.0])),
            DVector::from_row_slice(&[0.0, 1.0]),
            0.0,
            Sense::Equality,
        )
        .unwrap();
        let sf = secular(&inst);
        assert!(sf.eval_phi(1.0).unwrap().abs() < 1e-15);
        let roots = sf.find_real_roots(&tol()).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].lambda + 2.0).abs() < 1e-10 && !roots[0].multiple);
        assert!((roots[1].lambda - 1.0).abs() < 1e-6 && roots[1].multiple);
        // φ′ vanishes at a double root, so the certificate must not hold there
        let report = crate::report::solve(&inst, &tol()).unwrap();
        let at_double = report
            .kkt_all
            .iter()
            .find(|p| (p.lambda - 1.0).abs() < 1e-6)
            .unwrap();
        assert!(!at_double.certificates.phi_prime_positive);
    }
}
