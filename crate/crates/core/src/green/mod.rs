//! Boundary Green operators of the Stokes system and reconstruction of
//! `S`-null tuples from their boundary data.

mod domain;
mod kernel;
mod poly_tuple;
mod reconstruct;
mod solutions;
mod trace;


pub use domain::{BoundaryNode, DomainSpec, Shape};
pub use kernel::{kernel_column, kernel_matrix, phi_kernel, KernelColumn};
pub use poly_tuple::PolyTuple;
pub use reconstruct::{homotopy_reconstruct, integrate_green_identity, pairwise_sum, GreenIdentity, Reconstruction};
pub use solutions::{AnalyticSolution, SolutionKind};
pub use trace::{green_density_s, surface_density, BoundaryTrace, NodeData};
