//! Exact computations with real divisors on complete toric varieties and
//! Hirzebruch surfaces: Hilbert functions, volumes, sigma-decompositions,
//! divisorial augmented base loci, and checkers for the equivalences
//! between volume equality, Hilbert function equality and the negative
//! part / augmented base locus.

pub mod exec;
pub mod polyhedra;
pub mod problem;
pub mod scalar;
pub mod surface;
pub mod theorems;
pub mod toric;

pub use exec::Execution;
pub use polyhedra::{Constraint, HPolytope, LpOutcome, LpProblem, PolyError};
pub use problem::{parse_problem, ProblemError, ProblemFile};
pub use scalar::{Scalar, ScalarError};
pub use surface::{SDivisor, SurfaceError, SurfaceModel};
pub use theorems::{check_theorem_a, check_theorem_b, corpus_run, CheckOptions, Instance, TheoremReport};
pub use toric::{Fan, TDivisor, ToricError};
