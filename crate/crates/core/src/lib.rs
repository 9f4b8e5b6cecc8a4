//! Global and local minimizers of one quadratic over one quadratic
//! constraint.
//!
//! The objective is `f(x) = xᵀAx + 2aᵀx` and the constraint
//! `g(x) = xᵀBx + 2bᵀx + c`, either `g(x) ≤ 0` or `g(x) = 0`. [`solve`]
//! certifies a global minimizer when one exists and lists every strict
//! local minimizer that is not global.

pub mod canonical;
pub mod complex;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod global;
pub mod instance;
pub mod local;
pub mod oracle;
pub mod poly;
pub mod report;
pub mod secular;
mod serde_util;
pub mod spectral;
pub mod tolerances;

pub use complex::{solve_complex, ComplexGtrsInstance};
pub use error::{GtrsError, Result};
pub use global::{solve_global, GlobalResult, GlobalStatus};
pub use instance::{GtrsInstance, Sense};
pub use local::{Classification, KktPoint};
pub use report::{enumerate_local_nonglobal, solve, verify_point, SolveReport};
pub use tolerances::Tolerances;
