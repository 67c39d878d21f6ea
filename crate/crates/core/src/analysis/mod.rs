//! Manufactured solutions, error norms and convergence studies.

pub mod errors;
pub mod exact;
pub mod study;
pub mod verify;

pub use errors::{compute_errors, divergence_metric, hdiv_conformity_metric, ErrorReport};
pub use exact::{ExactFields, Example1, Example2};
pub use study::{
    convergence_study, convergence_study_with, robustness_delta, robustness_study, ConvergenceRow, ConvergenceTable,
    Example, Quantity, Robustness, StudyError,
};
