//! Divisor calculus on complete simplicial toric varieties.
//!
//! A torus-invariant divisor `D = sum a_r D_r` has section polytope
//! `P_D = {u : <u, v_r> >= -a_r}`. Its integer points are the monomial
//! sections of `floor(D)`, `n! vol(P_D)` is its volume, and R-linear
//! equivalence acts by translating `P_D`, which turns the asymptotic
//! multiplicity `sigma_r(D)` into a linear program over `P_D`.

mod divisor;
mod fan;
mod sigma;

use thiserror::Error;

use crate::polyhedra::PolyError;
use crate::scalar::ScalarError;

pub use divisor::{HilbertRow, TDivisor};
pub use fan::{Fan, FanError};
pub use sigma::{BplusOptions, SigmaDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToricError {
    #[error("divisor is not big")]
    NotBig,
    #[error("divisor is not nef")]
    NotNef,
    #[error("divisor is not effective")]
    NotEffective,
    #[error("support of N_sigma(D - eps A) did not stabilize within {steps} halvings")]
    NoStabilization { steps: u32 },
    #[error("cone {0} is not simplicial")]
    NonSimplicialCone(usize),
    #[error("no sections at m = {0}")]
    NoSections(String),
    #[error("fan admits no strictly convex support function")]
    NotProjective,
    #[error("unsupported divisor: {0}")]
    UnsupportedDivisor(String),
    #[error("sample m = {0} must be positive")]
    NonPositiveSample(String),
    #[error("divisors live on different fans")]
    FanMismatch,
    #[error("ray index {0} out of range")]
    NoSuchRay(usize),
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Polytope(#[from] PolyError),
    #[error(transparent)]
    Fan(#[from] FanError),
}

pub type Result<T, E = ToricError> = std::result::Result<T, E>;

pub(crate) fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}
