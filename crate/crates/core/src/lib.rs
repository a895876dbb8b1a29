//! Structured-grid solvers for 2D linear transport and gradient-adjoint
//! recovery of initial conditions.
//!
//! The forward problem `u_t + v·∇u = 0` is advanced by dimensional splitting
//! over three one-dimensional kernels (Lax-Friedrichs, Lax-Wendroff and the
//! modified method of characteristics). The adjoint problem is the same
//! transport run backward in time, so both directions share one code path.

pub mod error;
pub mod grid;
pub mod inverse;
pub mod schemes1d;
pub mod solver2d;
pub mod velocity;

pub use error::{Error, Result};
pub use grid::{Grid2D, ScalarField2D};
pub use inverse::{GdReport, InverseProblem, StopReason};
pub use schemes1d::{BoundaryPolicy, Line, SchemeKind};
pub use solver2d::{SolverConfig, SplitSolver, SweepOrder};
pub use velocity::{ConstantVelocity, DoswellParams, DoswellVortex, VelocityField};
