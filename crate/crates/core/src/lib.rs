//! De Rham exterior calculus, generalized Stokes block operators `S_{q,μ}`,
//! their right/left/bilateral fundamental solutions, and the boundary
//! homotopy formula.
//!
//! The crate has two layers:
//!
//! * a symbolic layer ([`algebra`]) that normalizes noncommutative operator
//!   words over `d`, `d*`, `Φ`, `Φ_μ`, `M`, `M̃` and checks block identities
//!   exactly;
//! * a numeric layer ([`exterior`], [`kernels`], [`stokes`], [`green`]) that
//!   realizes the same operators on exact polynomial forms, on uniform grids,
//!   and pointwise through analytic kernels.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod exterior;
pub mod green;
pub mod kernels;
pub mod stokes;

pub use error::{Error, Result};
