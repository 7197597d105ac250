use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::domain::DomainSpec;
use super::kernel::kernel_column;
use super::poly_tuple::PolyTuple;
use super::trace::{green_density_s, BoundaryTrace};
use crate::error::{Error, Result};
use crate::stokes::StokesSpec;

/// Sum with a fixed binary-tree order, independent of thread count.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        len if len <= 8 => xs.iter().sum(),
        len => {
            let (a, b) = xs.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Reconstructed tuple value at `x`, flattened as `(u_1 coefficients…, u_0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    /// `x` lies within the boundary collar, where quadrature error grows.
    pub near_boundary: bool,
}

/// `u_α(x) = −Σ_k w_k G_S(v^{(α)}(y_k), u(y_k))` with `v^{(α)}` the kernel
/// column of row `α` with pole `x`. Gives `u(x)` inside `D` and `0` outside.
pub fn homotopy_reconstruct(
    spec: &StokesSpec,
    domain: &DomainSpec,
    trace: &BoundaryTrace,
    x: &[f64],
) -> Result<Reconstruction> {
    let n = spec.n();
    if domain.n() != n || x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    if trace.nodes().len() != domain.nodes().len() {
        return Err(Error::IncompleteTrace("trace does not match the domain rule".into()));
    }
    let columns = (0..=n).map(|row| kernel_column(spec, x, row)).collect::<Result<Vec<_>>>()?;
    let values = columns
        .iter()
        .map(|col| {
            let terms = domain
                .nodes()
                .par_iter()
                .zip(trace.nodes().par_iter())
                .map(|(node, u)| Ok(node.weight * green_density_s(spec, &col.eval(&node.y)?, u, &node.normal)?))
                .collect::<Result<Vec<f64>>>()?;
            Ok(-pairwise_sum(&terms))
        })
        .collect::<Result<Vec<f64>>>()?;
    let near_boundary = domain.signed_distance(x).abs() < domain.boundary_collar();
    Ok(Reconstruction { x: x.to_vec(), values, near_boundary })
}

/// Both sides of `∫_{∂D} G_S(v, u) = (S u, v) − (u, S v)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenIdentity {
    pub boundary: f64,
    pub volume: f64,
    pub discrepancy: f64,
}

/// Boundary side with the domain rule, volume side with `volume_nodes`
/// Gauss–Legendre nodes per direction; `S` is applied exactly.
pub fn integrate_green_identity(
    spec: &StokesSpec,
    domain: &DomainSpec,
    u: &PolyTuple,
    v: &PolyTuple,
    volume_nodes: usize,
) -> Result<GreenIdentity> {
    let boundary_terms = domain
        .nodes()
        .par_iter()
        .map(|node| {
            Ok(node.weight * green_density_s(spec, &v.node_data(&node.y)?, &u.node_data(&node.y)?, &node.normal)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let boundary = pairwise_sum(&boundary_terms);
    let (su, sv) = (u.apply_stokes(spec)?, v.apply_stokes(spec)?);
    let volume_terms: Vec<f64> = domain
        .volume_rule(volume_nodes)
        .par_iter()
        .map(|(x, w)| w * (su.dot_at(v, x) - u.dot_at(&sv, x)))
        .collect();
    let volume = pairwise_sum(&volume_terms);
    Ok(GreenIdentity { boundary, volume, discrepancy: (boundary - volume).abs() })
}
