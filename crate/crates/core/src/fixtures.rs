//! Small reference instances with known answers.

use nalgebra::{DMatrix, DVector};

use crate::instance::{GtrsInstance, Sense};

/// `x₁² + 2x₂² − x₃² + 2x₁ − 2x₃` subject to `x₁² − x₂² + 2x₁ + 2x₃ + 1 ≤ 0`.
///
/// Unbounded below, with a single local nonglobal minimizer at `(−1, 0, 0)`
/// with multiplier 1.
pub fn unbounded_3d() -> GtrsInstance {
    GtrsInstance::new(
        DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, 2.0, -1.0])),
        DVector::from_row_slice(&[1.0, 0.0, -1.0]),
        DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, -1.0, 0.0])),
        DVector::from_row_slice(&[1.0, 0.0, 1.0]),
        1.0,
        Sense::Inequality,
    )
    .expect("valid instance")
}

/// `y² + z² + 12y + 8z` subject to `yz = k`.
///
/// For `k = 1` there are four critical points, two of them local nonglobal
/// minimizers.
pub fn hyperbola(k: f64, sense: Sense) -> GtrsInstance {
    GtrsInstance::new(
        DMatrix::identity(2, 2),
        DVector::from_row_slice(&[6.0, 4.0]),
        DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]),
        DVector::zeros(2),
        -k,
        sense,
    )
    .expect("valid instance")
}

pub fn unit_hyperbola() -> GtrsInstance {
    hyperbola(1.0, Sense::Equality)
}

/// `min ‖x‖² + 2x₁` over the unit ball; the unconstrained minimizer `(−1, 0)`
/// lies on the boundary.
pub fn unit_ball_trs() -> GtrsInstance {
    GtrsInstance::new(
        DMatrix::identity(2, 2),
        DVector::from_row_slice(&[1.0, 0.0]),
        DMatrix::identity(2, 2),
        DVector::zeros(2),
        -1.0,
        Sense::Inequality,
    )
    .expect("valid instance")
}

/// No linear terms and `c = −1`; there are no local nonglobal minimizers.
pub fn homogeneous(sense: Sense) -> GtrsInstance {
    GtrsInstance::new(
        DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, -2.0, 3.0])),
        DVector::zeros(3),
        DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, 1.0, -1.0])),
        DVector::zeros(3),
        -1.0,
        sense,
    )
    .expect("valid instance")
}
