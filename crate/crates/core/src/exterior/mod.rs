//! Exterior algebra on `ℝⁿ`: multi-indices, wedge, Hodge star, `d`, `d*`,
//! Hodge and Lamé Laplacians, and matrix action, over exact polynomial,
//! grid-sampled, or pointwise coefficients.

pub mod form;
pub mod grid;
pub mod matrix;
pub mod multi_index;
pub mod poly;
pub mod ring;

pub use form::{
    add, codifferential, componentwise_laplacian, exterior_derivative, hodge_laplacian, hodge_star, is_zero,
    lame_laplacian, matrix_action, matrix_action_direct, wedge, Form, LamePair,
};
pub use grid::{GridForm, GridRing, GridSpec};
pub use matrix::MatrixCoefficient;
pub use multi_index::{binomial, MultiIndex};
pub use poly::{rational_from_f64, Poly, PolyRing};
pub use ring::{CoeffRing, DiffRing, JetRing, PointRing};

/// Polynomial-coefficient form.
pub type PolyForm = Form<Poly>;
