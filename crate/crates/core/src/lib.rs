//! Solution paths for the generalized lasso
//!
//! ```text
//! minimize ½‖y − Xβ‖² + λ‖Dβ‖₁
//! ```
//!
//! computed over all `λ ≥ 0` by following the solution of the dual problem,
//! which is piecewise linear in `λ`. Start with [`path::solve_dual_path`]
//! (identity design) or [`design::solve_path_design`] (full-rank `X`), and
//! build `D` with the constructors in [`penalty`].

pub mod cli;
pub mod design;
pub mod error;
pub mod io;
pub mod modelsel;
pub mod numlin;
pub mod oracle;
pub mod path;
pub mod penalty;
pub mod plot;

pub use error::{Error, Result};
pub use path::{solve_dual_path, PathOptions, SolutionPath};
pub use penalty::PenaltyMatrix;
