//! Dense real polynomials and their complex roots.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Complex, DMatrix, Schur};

/// A real polynomial with coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `c₀ + c₁λ`.
    pub fn linear(c0: f64, c1: f64) -> Self {
        Self::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex<f64>) -> Complex<f64> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Sum of absolute coefficients weighted by `|x|^k`; a scale for
    /// judging `|p(x)|`.
    pub fn magnitude(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    /// All complex roots, counted with multiplicity.
    ///
    /// Eigenvalues of the balanced companion matrix; if the QR iteration
    /// fails to converge, falls back to simultaneous Aberth iteration.
    pub fn complex_roots(&self) -> Vec<Complex<f64>> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        // roots at zero
        let zeros = self.coeffs.iter().take_while(|&&c| c == 0.0).count();
        let reduced = Self::new(self.coeffs[zeros..].to_vec());
        let mut roots = vec![Complex::new(0.0, 0.0); zeros];
        match deg - zeros {
            0 => {}
            1 => {
                let c = reduced.coeffs();
                roots.push(Complex::new(-c[0] / c[1], 0.0));
            }
            _ => {
                let found = companion_roots(&reduced).unwrap_or_else(|| {
                    log::debug!("companion QR did not converge; using Aberth iteration");
                    aberth_roots(&reduced)
                });
                roots.extend(found);
            }
        }
        roots
    }
}

fn companion_roots(p: &Polynomial) -> Option<Vec<Complex<f64>>> {
    let c = p.coeffs();
    let d = c.len() - 1;
    let lead = c[d];
    let mut m = DMatrix::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        m[(i, d - 1)] = -c[i] / lead;
    }
    if m.iter().any(|v| !v.is_finite()) {
        return None;
    }
    balance(&mut m);
    let schur = Schur::try_new(m, f64::EPSILON, 1000 + 100 * d)?;
    let eig = schur.complex_eigenvalues();
    let out: Vec<_> = eig.iter().copied().collect();
    out.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(out)
}

/// Diagonal similarity scaling by powers of two so row and column norms
/// are comparable; improves eigenvalue accuracy without changing them.
/// Sweeps stop after a fixed count since badly scaled rows can keep
/// oscillating between powers of two.
fn balance(m: &mut DMatrix<f64>) {
    const RADIX: f64 = 2.0;
    const MAX_SWEEPS: usize = 100;
    let n = m.nrows();
    for _ in 0..MAX_SWEEPS {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 || !c.is_finite() || !r.is_finite() {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

fn aberth_roots(p: &Polynomial) -> Vec<Complex<f64>> {
    let c = p.coeffs();
    let d = c.len() - 1;
    let dp = p.derivative();
    // Cauchy bound on root moduli
    let bound = 1.0 + c[..d].iter().map(|x| (x / c[d]).abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex<f64>> = (0..d)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64;
            Complex::from_polar(0.5 * bound, angle)
        })
        .collect();
    for _ in 0..500 {
        let mut converged = true;
        for k in 0..d {
            let pz = p.eval_complex(z[k]);
            let dpz = dp.eval_complex(z[k]);
            if pz.norm() == 0.0 {
                continue;
            }
            let ratio = pz / dpz;
            let repulsion: Complex<f64> = (0..d)
                .filter(|&j| j != k)
                .map(|j| Complex::new(1.0, 0.0) / (z[k] - z[j]))
                .sum();
            let step = ratio / (Complex::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                if step.norm() > 4.0 * f64::EPSILON * (1.0 + z[k].norm()) {
                    converged = false;
                }
            }
        }
        if converged {
            break;
        }
    }
    z
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(0.0)
                        + rhs.coeffs.get(k).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn from_roots(roots: &[f64]) -> Polynomial {
        roots.iter().fold(Polynomial::constant(1.0), |acc, &r| {
            &acc * &Polynomial::linear(-r, 1.0)
        })
    }

    fn sorted_real(p: &Polynomial) -> Vec<f64> {
        let mut r: Vec<f64> = p
            .complex_roots()
            .into_iter()
            .filter(|z| z.im.abs() < 1e-8)
            .map(|z| z.re)
            .collect();
        r.sort_by(f64::total_cmp);
        r
    }

    #[test]
    fn arithmetic() {
        let p = Polynomial::new(vec![1.0, 2.0, 3.0]);
        let q = Polynomial::linear(-1.0, 1.0);
        assert_eq!((&p * &q).coeffs(), &[-1.0, -1.0, -1.0, 3.0]);
        assert_eq!((&p + &q).coeffs(), &[0.0, 3.0, 3.0]);
        assert!((&p - &p).is_zero());
        assert_eq!(p.derivative().coeffs(), &[2.0, 6.0]);
        assert_eq!(p.eval(2.0), 17.0);
        assert_eq!(Polynomial::new(vec![0.0, 0.0]).degree(), None);
        assert_eq!(p.magnitude(-2.0), 1.0 + 4.0 + 12.0);
    }

    #[test]
    fn roots_of_small_polynomials() {
        assert!(Polynomial::constant(3.0).complex_roots().is_empty());
        assert_eq!(sorted_real(&Polynomial::linear(-2.0, 1.0)), vec![2.0]);
        let r = sorted_real(&from_roots(&[-3.0, 0.5, 2.0, 7.0]));
        for (got, want) in r.iter().zip([-3.0, 0.5, 2.0, 7.0]) {
            assert!((got - want).abs() < 1e-10);
        }
        // x² + 1 has no real roots
        let roots = Polynomial::new(vec![1.0, 0.0, 1.0]).complex_roots();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|z| (z.im.abs() - 1.0).abs() < 1e-12));
        // roots at the origin are split off exactly
        let r = Polynomial::new(vec![0.0, 0.0, -1.0, 1.0]).complex_roots();
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
    }

    #[test]
    fn badly_scaled_roots() {
        let want = [1e-4, 1.0, 1e4];
        let r = sorted_real(&from_roots(&want));
        for (got, w) in r.iter().zip(want) {
            assert!((got - w).abs() <= 1e-8 * w, "{got} vs {w}");
        }
    }

    #[test]
    fn aberth_agrees_with_companion() {
        let p = from_roots(&[-2.0, -0.5, 1.0, 3.0, 4.5]);
        let mut a: Vec<f64> = aberth_roots(&p).iter().map(|z| z.re).collect();
        a.sort_by(f64::total_cmp);
        let c = sorted_real(&p);
        for (x, y) in a.iter().zip(c.iter()) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn recovers_separated_real_roots(
            raw in proptest::collection::vec(-10.0f64..10.0, 1..8),
        ) {
            let mut roots = raw.clone();
            roots.sort_by(f64::total_cmp);
            roots.dedup_by(|a, b| (*a - *b).abs() < 0.5);
            let got = sorted_real(&from_roots(&roots));
            prop_assert_eq!(got.len(), roots.len());
            for (g, w) in got.iter().zip(roots.iter()) {
                prop_assert!((g - w).abs() < 1e-6 * (1.0 + w.abs()));
            }
        }
    }
}
