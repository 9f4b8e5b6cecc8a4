//! Seeded random instances.

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::complex::ComplexGtrsInstance;
use crate::error::{GtrsError, Result};
use crate::instance::{GtrsInstance, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Some `cos θ·A + sin θ·B` is positive definite; both matrices are
    /// rotated by a random orthogonal matrix.
    DefinitePencil,
    /// Diagonal `A` and `B` with independent entries; no definiteness.
    DiagonalOnly,
    /// Hermitian pair with a definite combination, embedded in `ℝ²ⁿ`.
    Complex,
}

impl Regime {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "definite-pencil" | "definite_pencil" => Ok(Self::DefinitePencil),
            "diagonal-only" | "diagonal_only" => Ok(Self::DiagonalOnly),
            "complex" => Ok(Self::Complex),
            other => Err(GtrsError::Parse(format!("unknown regime `{other}`"))),
        }
    }
}

/// Parameters of a random instance. `n` is the complex dimension in the
/// complex regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RandomSpec {
    pub n: usize,
    /// Number of nonzero constraint curvatures, `1 ≤ n1 ≤ n`.
    pub n1: usize,
    pub sense: Sense,
    pub seed: u64,
    pub regime: Regime,
}

impl RandomSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n1 == 0 || self.n1 > self.n {
            return Err(GtrsError::Parse(format!(
                "need 1 ≤ n1 ≤ n, got n = {}, n1 = {}",
                self.n, self.n1
            )));
        }
        Ok(())
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Haar-distributed orthogonal matrix from the QR factors of a Gaussian
/// matrix.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| normal(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex<f64>> {
    let g = DMatrix::from_fn(n, n, |_, _| Complex::new(normal(rng), normal(rng)));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Diagonals `(α, β)` with `cos θ·α + sin θ·β ∈ [0.5, 2]` entrywise for a
/// random `θ`, and `β` nonzero exactly on the first `n1` entries.
fn definite_diagonals(rng: &mut ChaCha8Rng, n: usize, n1: usize) -> (Vec<f64>, Vec<f64>) {
    let theta = loop {
        let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        if t.cos().abs() >= 0.2 {
            break t;
        }
    };
    let (c, s) = (theta.cos(), theta.sin());
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    for i in 0..n {
        if i < n1 {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            beta[i] = sign * rng.random_range(0.5..2.0);
        }
        let d: f64 = rng.random_range(0.5..2.0);
        alpha[i] = (d - s * beta[i]) / c;
    }
    (alpha, beta)
}

/// A random real instance; the complex regime returns the embedding of
/// [`generate_complex`].
pub fn generate(spec: &RandomSpec) -> Result<GtrsInstance> {
    spec.validate()?;
    if spec.regime == Regime::Complex {
        return generate_complex(spec).embed();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let (a, b) = match spec.regime {
        Regime::DefinitePencil => {
            let (alpha, beta) = definite_diagonals(&mut rng, n, spec.n1);
            let q = random_orthogonal(&mut rng, n);
            let a = &q * DMatrix::from_diagonal(&DVector::from_vec(alpha)) * q.transpose();
            let b = &q * DMatrix::from_diagonal(&DVector::from_vec(beta)) * q.transpose();
            (a, b)
        }
        _ => {
            let alpha = DVector::from_fn(n, |_, _| normal(&mut rng));
            let beta = DVector::from_fn(n, |i, _| {
                if i < spec.n1 {
                    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                    sign * rng.random_range(0.5..2.0)
                } else {
                    0.0
                }
            });
            (DMatrix::from_diagonal(&alpha), DMatrix::from_diagonal(&beta))
        }
    };
    let av = DVector::from_fn(n, |_, _| normal(&mut rng));
    let bv = DVector::from_fn(n, |_, _| normal(&mut rng));
    let c = normal(&mut rng);
    GtrsInstance::new(a, av, b, bv, c, spec.sense)
}

/// A random Hermitian instance of complex dimension `spec.n` whose pencil
/// has a definite combination.
pub fn generate_complex(spec: &RandomSpec) -> ComplexGtrsInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n.max(1);
    let (alpha, beta) = definite_diagonals(&mut rng, n, spec.n1.clamp(1, n));
    let u = random_unitary(&mut rng, n);
    let conj = |d: &[f64]| {
        let m = DMatrix::from_diagonal(&DVector::from_iterator(
            n,
            d.iter().map(|&x| Complex::new(x, 0.0)),
        ));
        &u * m * u.adjoint()
    };
    let (a, b) = (conj(&alpha), conj(&beta));
    let re = |m: &DMatrix<Complex<f64>>| m.map(|z| z.re);
    let im = |m: &DMatrix<Complex<f64>>| m.map(|z| z.im);
    let mut vec = || DVector::from_fn(n, |_, _| normal(&mut rng));
    let (a_re, a_im, b_re, b_im) = (vec(), vec(), vec(), vec());
    let c = normal(&mut rng);
    ComplexGtrsInstance::new(
        re(&a),
        im(&a),
        a_re,
        a_im,
        re(&b),
        im(&b),
        b_re,
        b_im,
        c,
        spec.sense,
    )
    .expect("unitary conjugation yields Hermitian matrices")
}
