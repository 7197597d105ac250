//! Noncommutative operator words over `d`, `d*`, `Φ`, `Φ_μ`, `M`, `M̃`, an
//! oriented rewrite system, block operator matrices, and the block
//! identities of the generalized Stokes operator.

pub mod block;
pub mod builders;
pub mod expr;
pub mod generator;
pub mod parse;
pub mod rewrite;
pub mod system;

#[cfg(test)]
mod props;

pub use block::BlockMatrix;
pub use builders::{
    build_defect, build_psi_bilateral, build_psi_identity_form, build_psi_left, build_psi_right,
    build_psi_right_mutated, build_stokes, check_commute_condition, defect_closed_form, lame, specialize, Coefficients,
    PsiMutation,
};
pub use expr::Expr;
pub use generator::{word_type, Gen, Word};
pub use parse::{parse_expr, parse_matrix};
pub use rewrite::{Rewriter, Strategy, DEFAULT_BUDGET};
pub use system::{verify_solution_system, DerivationStatus, DerivedIdentity};
