use serde::{Deserialize, Serialize};

use super::apply::apply_stokes;
use super::psi::{apply_psi_left, apply_psi_scalar_lame, PotentialPlans};
use super::spec::{BumpTuple, StokesSpec};
use crate::error::{Error, Result};
use crate::exterior::GridSpec;
use crate::kernels::{observed_order, ConvMethod, SUPPORT_MARGIN};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportStatus {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualLevel {
    pub h: f64,
    pub residual_right: f64,
    pub residual_left: f64,
}

/// Right and left inverse residuals of `Ψ` against `S` under refinement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub spec: StokesSpec,
    pub levels: Vec<ResidualLevel>,
    pub observed_order_right: f64,
    pub observed_order_left: f64,
    pub status: ReportStatus,
}

/// Grid schedule and thresholds for [`residual_report`].
#[derive(Clone, Debug, PartialEq)]
pub struct ReportOptions {
    /// Nodes per axis on the coarsest grid; doubled per refinement.
    pub base_count: usize,
    pub half_width: f64,
    pub method: ConvMethod,
    pub pad_factor: usize,
    pub singular_tol: f64,
    /// Residuals are taken over nodes at least this deep. `Ψf` is not
    /// compactly supported, so the zero-extended stencils of `S` spoil the
    /// outer layers; the default keeps four spacings inside the support
    /// margin.
    pub margin: usize,
    /// Both orders must reach this for a pass.
    pub min_order: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            base_count: 32,
            half_width: 1.0,
            method: ConvMethod::FftZeroPadded,
            pad_factor: 2,
            singular_tol: 1e-10,
            margin: SUPPORT_MARGIN + 4,
            min_order: 1.5,
        }
    }
}

fn order(levels: &[ResidualLevel], pick: impl Fn(&ResidualLevel) -> f64) -> f64 {
    match levels {
        [.., a, b] if pick(a) > 0.0 && pick(b) > 0.0 => observed_order(pick(a), pick(b), a.h, b.h),
        _ => 0.0,
    }
}

/// `‖SΨ^{(r)}f − f‖∞/‖f‖∞` and `‖Ψ^{(l)}Sf − f‖∞/‖f‖∞` on
/// `refinements + 1` grids. Orders come from the two finest levels. An
/// input that vanishes gives an all-zero table and passes.
pub fn residual_report(spec: &StokesSpec, f: &BumpTuple, refinements: usize, opts: &ReportOptions) -> Result<ResidualReport> {
    if f.q() != spec.q() {
        return Err(Error::DegreeMismatch { expected: spec.q(), found: f.q() });
    }
    let mut levels = Vec::with_capacity(refinements + 1);
    for k in 0..=refinements {
        let grid = GridSpec::cube(spec.n(), opts.base_count << k, opts.half_width);
        let fh = f.sample(&grid)?;
        fh.require_support(SUPPORT_MARGIN + 2)?;
        let norm = fh.max_norm();
        let (right, left) = if norm == 0.0 {
            (0.0, 0.0)
        } else {
            let plans = PotentialPlans::new(&grid, opts.method, opts.pad_factor, opts.singular_tol)?;
            let right = apply_stokes(spec, &apply_psi_scalar_lame(spec, &plans, &fh)?)?.sub(&fh)?;
            let left = apply_psi_left(spec, &plans, &apply_stokes(spec, &fh)?)?.sub(&fh)?;
            (right.max_norm_interior(opts.margin) / norm, left.max_norm_interior(opts.margin) / norm)
        };
        levels.push(ResidualLevel { h: grid.max_spacing(), residual_right: right, residual_left: left });
    }
    let observed_order_right = order(&levels, |l| l.residual_right);
    let observed_order_left = order(&levels, |l| l.residual_left);
    let all_zero = levels.iter().all(|l| l.residual_right == 0.0 && l.residual_left == 0.0);
    let converging = levels.len() >= 2 && observed_order_right >= opts.min_order && observed_order_left >= opts.min_order;
    let status = if all_zero || converging { ReportStatus::Pass } else { ReportStatus::Fail };
    Ok(ResidualReport { spec: spec.clone(), levels, observed_order_right, observed_order_left, status })
}
