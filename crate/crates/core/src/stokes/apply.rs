use rayon::prelude::*;

use super::spec::{FormTuple, StokesSpec};
use crate::error::{Error, Result};
use crate::exterior::GridForm;

fn check_tuple(spec: &StokesSpec, u: &FormTuple) -> Result<()> {
    if u.q() != spec.q() {
        return Err(Error::DegreeMismatch { expected: spec.q(), found: u.q() });
    }
    if u.grid().n() != spec.n() {
        return Err(Error::DimensionMismatch { expected: spec.n(), found: u.grid().n() });
    }
    Ok(())
}

/// `S_{q,μ} u`. Row `i` carries the form of degree `k = q − i`:
/// `Δ_{k,μ} u_i + d_{k−1} u_{i+1} + d*_k u_{i−1}`, the Lamé term only for
/// `k ≥ j0`.
pub fn apply_stokes(spec: &StokesSpec, u: &FormTuple) -> Result<FormTuple> {
    check_tuple(spec, u)?;
    let q = spec.q();
    let parts = u.parts();
    let rows: Vec<GridForm> = (0..=q)
        .into_par_iter()
        .map(|i| {
            let k = q - i;
            let mut out = GridForm::zero(u.grid(), k);
            if let Some(mu) = spec.pair(k) {
                out = out.add(&parts[i].lame_laplacian(mu)?)?;
            }
            if i < q {
                out = out.add(&parts[i + 1].d()?)?;
            }
            if i > 0 {
                out = out.add(&parts[i - 1].codiff()?)?;
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    FormTuple::new(rows)
}
