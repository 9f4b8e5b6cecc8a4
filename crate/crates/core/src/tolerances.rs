use serde::Serialize;

/// Thresholds used by the pipeline.
///
/// Relative thresholds are multiplied by a problem scale at the point of use
/// (matrix norms, term magnitudes); the field docs name the scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Asymmetry above which loading an instance logs a warning.
    pub symmetry_warn: f64,
    /// Definite-pencil witness, relative to `‖A‖_F + ‖B‖_F`.
    pub definiteness: f64,
    /// Diagonal constraint entries at or below this fraction of `‖TᵀBT‖_F` become zero.
    pub beta_zero: f64,
    /// Shifted constraint constant treated as zero, relative to the constant's own scale.
    pub constant_zero: f64,
    /// Eigenvalues at or below this fraction of the spectral norm count as zero.
    pub inertia_zero: f64,
    /// Diagonal pivots of `A + λB` at or below this fraction of the pencil scale are singular.
    pub singular: f64,
    /// Imaginary part allowed for a companion eigenvalue to count as real.
    pub imag: f64,
    /// Relative distance at which a root is considered to sit on a pole.
    pub pole: f64,
    /// Relative spacing under which two roots merge.
    pub merge: f64,
    /// Root residual bound, relative to `1 + Σ|terms|`.
    pub root_residual: f64,
    /// Active constraint `|g(x)|`, relative to the constraint scale at `x`.
    pub active: f64,
    /// Stationarity residual `‖(A+λB)x + a + λb‖`, relative to the KKT scale at `x`.
    pub kkt_residual: f64,
    /// Positive semidefiniteness: `λ_min(A+λB) ≥ -psd·‖A+λB‖`.
    pub psd: f64,
    /// Strict tangent curvature: `λ_min(ZᵀGZ) > curvature·‖G‖`.
    pub curvature: f64,
    /// `φ′(λ) > phi_prime·(1 + Σ|term′|)`.
    pub phi_prime: f64,
    /// Strict complementarity: `λ > lambda_positive`.
    pub lambda_positive: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            symmetry_warn: 1e-12,
            definiteness: 1e-10,
            beta_zero: 1e-10,
            constant_zero: 1e-12,
            inertia_zero: 1e-10,
            singular: 1e-12,
            imag: 1e-8,
            pole: 1e-8,
            merge: 1e-8,
            root_residual: 1e-8,
            active: 1e-8,
            kkt_residual: 1e-8,
            psd: 1e-8,
            curvature: 1e-8,
            phi_prime: 1e-10,
            lambda_positive: 1e-10,
        }
    }
}

impl Tolerances {
    /// Defaults with every certificate threshold replaced by `tol`.
    ///
    /// Structural thresholds (canonicalization, root filtering) keep their
    /// defaults.
    pub fn with_certificate_tol(tol: f64) -> Self {
        Self {
            active: tol,
            kkt_residual: tol,
            psd: tol,
            curvature: tol,
            phi_prime: tol,
            lambda_positive: tol,
            ..Self::default()
        }
    }
}
