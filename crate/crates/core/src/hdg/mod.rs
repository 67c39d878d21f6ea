//! Hybridizable discretization of the coupled state / adjoint Stokes system
//! with tangential boundary control.

pub mod assembly;
pub mod layout;
pub mod local;
pub mod solution;

pub use assembly::{
    assemble_optimality_system, primal_operator, AssemblyError, GlobalSystem, ProblemConfig, ProblemData, Stabilization,
};
pub use layout::{DofLayout, Field, Support};
pub use local::Kernels;
pub use solution::{solve_problem, DiscreteSolution, SolveError};
