//! The generalized Stokes operator `S_{q,μ}` and its fundamental solutions
//! on uniform grids.

pub mod apply;
pub mod psi;
pub mod report;
pub mod spec;


pub use apply::apply_stokes;
pub use psi::{apply_block_matrix, apply_psi_identity, apply_psi_left, apply_psi_scalar_lame, PotentialPlans};
pub use report::{residual_report, ReportOptions, ReportStatus, ResidualLevel, ResidualReport};
pub use spec::{BumpTuple, FormTuple, LevelCoefficients, StokesSpec};
