//! Shared numerical kernels.

pub mod conjugate;
pub mod diff;
pub mod root;
pub mod sampling;
pub mod simplex;

pub use conjugate::{conjugate_on_simplex, DEFAULT_CONJUGATE_RESOLUTION};
pub use diff::{grad_fd, DEFAULT_FD_STEP};
pub use root::{solve_monotone, solve_monotone_tight, Direction, RootFindConfig};
pub use simplex::SimplexPoint;
