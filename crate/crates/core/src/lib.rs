//! Sparse iterative solvers with row equilibration, ILUT preconditioning and
//! forward-error control.
//!
//! The usual entry point is [`solvers::solve_system`], which equilibrates
//! `A`, factors `D⁻¹A` with ILUT and runs restarted GMRES or SOR. The
//! [`error_control`] module measures how well the stopping tolerance tracks
//! the true forward error, and [`testgen`] builds reproducible test systems.

pub mod bench;
pub mod cli;
pub mod dense;
pub mod error;
pub mod error_control;
pub mod ilut;
pub mod mm;
pub mod operator;
pub mod profile;
pub mod report;
pub mod scaling;
pub mod solvers;
pub mod sparse;
pub mod testgen;

pub use error::{Error, Result};
pub use ilut::{ilut_factorize, IlutFactors, IlutParams};
pub use scaling::{ScalingMode, ScalingOp};
pub use solvers::{solve_system, SolveOptions, SolveReport, SolverConfig, SolverKind, Termination};
pub use sparse::CsrMatrix;
