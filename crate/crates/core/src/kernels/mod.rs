//! Newtonian and biharmonic potentials: pointwise kernels with analytic
//! derivatives, free-space grid convolution, and the grid operators `Φ_q`
//! and `Φ_{q,μ}` for constant scalar coefficients.

pub mod bump;
pub mod convolution;
pub mod potentials;
pub mod quadrature;
pub mod radial;

pub use bump::{BumpShape, bump_profile, Bump, BumpForm};
pub use convolution::{ConvMethod, ConvolutionPlan};
pub use potentials::{
    commutation_residual, inversion_residual, left_inversion_residual, observed_order, phi_apply,
    phi_mu_apply_scalar, phi_squared_apply, CommutationResidual, RESIDUAL_MARGIN, SUPPORT_MARGIN,
};
pub use quadrature::{cell_average, gauss_legendre};
pub use radial::{eval_biharmonic_b, eval_g, sigma, KernelKind, KernelSpec};
