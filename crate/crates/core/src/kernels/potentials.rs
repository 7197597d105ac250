use rayon::prelude::*;

use super::bump::BumpForm;
use super::convolution::ConvolutionPlan;
use super::radial::KernelKind;
use crate::error::{Error, Result};
use crate::exterior::{Form, GridForm};

/// Node layers on which inputs to the potentials must vanish.
pub const SUPPORT_MARGIN: usize = 2;

/// Depth, in nodes, below which residuals are not measured. Every input
/// vanishes there, and grid operators with zero extension are exact from
/// one layer inward, so the whole support is covered.
pub const RESIDUAL_MARGIN: usize = SUPPORT_MARGIN;

fn check_plan(plan: &ConvolutionPlan, kind: KernelKind, u: &GridForm) -> Result<()> {
    if plan.kernel().kind != kind {
        return Err(Error::Parameter(format!("plan holds a {:?} kernel, {kind:?} needed", plan.kernel().kind)));
    }
    if plan.grid() != u.grid() {
        return Err(Error::GridMismatch("form and convolution plan use different grids".into()));
    }
    u.require_support(SUPPORT_MARGIN)
}

fn convolve_components(plan: &ConvolutionPlan, u: &GridForm, sign: f64) -> Result<GridForm> {
    let comps: Vec<Vec<f64>> = u
        .form()
        .coeffs()
        .par_iter()
        .map(|c| plan.convolve(c).map(|v| v.into_iter().map(|x| sign * x).collect()))
        .collect::<Result<_>>()?;
    GridForm::new(u.grid().clone(), Form::from_coeffs(u.grid().n(), u.degree(), comps)?)
}

/// `Φ_q u = −Σ_I (g ∗ u_I) dx_I`.
pub fn phi_apply(plan: &ConvolutionPlan, u: &GridForm) -> Result<GridForm> {
    check_plan(plan, KernelKind::NewtonianG, u)?;
    convolve_components(plan, u, -1.0)
}

/// `Φ_q Φ_q u = Σ_I (B ∗ u_I) dx_I`.
pub fn phi_squared_apply(plan_b: &ConvolutionPlan, u: &GridForm) -> Result<GridForm> {
    check_plan(plan_b, KernelKind::BiharmonicB, u)?;
    convolve_components(plan_b, u, 1.0)
}

/// `Φ_{q,μ} = Φ_q (a⁻¹ d*_q d_q + ã⁻¹ d_{q−1} d*_{q−1}) Φ_q` for scalar
/// `M_q = a`, `M̃_q = ã`. The constant-coefficient middle factor commutes
/// with `Φ_q`, so it is applied last to `Φ_q Φ_q u = B ∗ u`.
pub fn phi_mu_apply_scalar(plan_b: &ConvolutionPlan, a: f64, a_tilde: f64, u: &GridForm) -> Result<GridForm> {
    if !(a > 0.0 && a_tilde > 0.0) {
        return Err(Error::Parameter(format!("Lamé scalars must be positive, got a = {a}, ã = {a_tilde}")));
    }
    let w = phi_squared_apply(plan_b, u)?;
    let n = u.grid().n();
    let q = u.degree();
    let mut out = GridForm::zero(u.grid(), q);
    if q < n {
        out = out.add(&w.d()?.codiff()?.scale(1.0 / a))?;
    }
    if q >= 1 {
        out = out.add(&w.codiff()?.d()?.scale(1.0 / a_tilde))?;
    }
    Ok(out)
}

/// `‖Δ_q Φ_q φ − φ‖ / ‖φ‖` over nodes at depth `≥ RESIDUAL_MARGIN`, with
/// `Δ_q` the compact componentwise stencil.
pub fn inversion_residual(plan: &ConvolutionPlan, phi: &GridForm) -> Result<f64> {
    let norm = phi.max_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let r = phi_apply(plan, phi)?.compact_laplacian().sub(phi)?;
    Ok(r.max_norm_interior(RESIDUAL_MARGIN) / norm)
}

/// `‖Φ_q Δ_q φ − φ‖ / ‖φ‖`; `φ` must vanish on `SUPPORT_MARGIN + 1` layers.
pub fn left_inversion_residual(plan: &ConvolutionPlan, phi: &GridForm) -> Result<f64> {
    let norm = phi.max_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let r = phi_apply(plan, &phi.compact_laplacian())?.sub(phi)?;
    Ok(r.max_norm_interior(RESIDUAL_MARGIN) / norm)
}

/// Relative residuals of `d Φ_q u = Φ_{q+1} d u` and `d* Φ_q u = Φ_{q−1} d* u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutationResidual {
    pub d: f64,
    pub codiff: f64,
}

/// Compares the grid `d`, `d*` of `Φ_q u` with `Φ` applied to the exact
/// `du`, `d*u` of the analytic field. On the grid the central differences
/// commute with the convolution exactly, so this measures how `Φ` carries
/// the continuum identity. Branches absent at the ends of the complex
/// (`d` at `q = n`, `d*` at `q = 0`) report zero.
pub fn commutation_residual(plan: &ConvolutionPlan, u: &BumpForm) -> Result<CommutationResidual> {
    let grid = plan.grid();
    let uh = u.sample(grid)?;
    let norm = uh.max_norm();
    if norm == 0.0 {
        return Ok(CommutationResidual { d: 0.0, codiff: 0.0 });
    }
    let phi_u = phi_apply(plan, &uh)?;
    let d = if u.degree < u.n {
        let lhs = phi_u.d()?;
        let rhs = phi_apply(plan, &u.sample_d(grid)?)?;
        lhs.sub(&rhs)?.max_norm_interior(RESIDUAL_MARGIN) / norm
    } else {
        phi_u.d()?.max_norm()
    };
    let codiff = if u.degree >= 1 {
        let lhs = phi_u.codiff()?;
        let rhs = phi_apply(plan, &u.sample_codiff(grid)?)?;
        lhs.sub(&rhs)?.max_norm_interior(RESIDUAL_MARGIN) / norm
    } else {
        0.0
    };
    Ok(CommutationResidual { d, codiff })
}

/// Observed order `log₂(e_coarse / e_fine)` for a halving of `h`, scaled
/// by the actual spacing ratio.
pub fn observed_order(e_coarse: f64, e_fine: f64, h_coarse: f64, h_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / (h_coarse / h_fine).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{GridSpec, LamePair, MultiIndex};
    use crate::kernels::bump::Bump;
    use crate::kernels::convolution::ConvMethod;
    use crate::kernels::radial::KernelSpec;

    fn plan(grid: &GridSpec, kind: KernelKind) -> ConvolutionPlan {
        let k = KernelSpec::new(grid.n(), kind).unwrap();
        ConvolutionPlan::new(grid, k, ConvMethod::FftZeroPadded, 2, 1e-10).unwrap()
    }

    fn bump_form(n: usize, q: usize) -> BumpForm {
        let comps = MultiIndex::all(n, q)
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let mut c = vec![0.0; n];
                c[0] = 0.02 * i as f64;
                vec![Bump::radial(c, 0.78, 1.0 + 0.5 * i as f64).unwrap()]
            })
            .collect();
        BumpForm::new(n, q, comps).unwrap()
    }

    #[test]
    fn zero_input_gives_zero() {
        let grid = GridSpec::cube(2, 16, 1.0);
        let p = plan(&grid, KernelKind::NewtonianG);
        let z = GridForm::zero(&grid, 1);
        assert_eq!(phi_apply(&p, &z).unwrap().max_norm(), 0.0);
        let pb = plan(&grid, KernelKind::BiharmonicB);
        assert_eq!(phi_mu_apply_scalar(&pb, 2.0, 3.0, &z).unwrap().max_norm(), 0.0);
        let c = commutation_residual(&p, &BumpForm::zero(2, 1)).unwrap();
        assert_eq!((c.d, c.codiff), (0.0, 0.0));
    }

    #[test]
    fn scaling_by_powers_of_two_is_exact() {
        let grid = GridSpec::cube(2, 24, 1.0);
        let p = plan(&grid, KernelKind::NewtonianG);
        let u = bump_form(2, 1).sample(&grid).unwrap();
        let base = phi_apply(&p, &u).unwrap();
        for c in [2.0, 0.5, -4.0] {
            assert_eq!(phi_apply(&p, &u.scale(c)).unwrap(), base.scale(c));
        }
        let scaled = phi_apply(&p, &u.scale(3.0)).unwrap();
        assert!(scaled.sub(&base.scale(3.0)).unwrap().max_norm() <= 1e-14 * base.max_norm());
    }

    #[test]
    fn symmetric_pairing() {
        let grid = GridSpec::cube(2, 32, 1.0);
        let p = plan(&grid, KernelKind::NewtonianG);
        let u = bump_form(2, 1).sample(&grid).unwrap();
        let v = BumpForm::new(
            2,
            1,
            vec![vec![Bump::new(vec![0.2, 0.1], 0.4, 1.0).unwrap()], vec![Bump::new(vec![-0.1, 0.0], 0.5, -2.0).unwrap()]],
        )
        .unwrap()
        .sample(&grid)
        .unwrap();
        let a = phi_apply(&p, &u).unwrap().pairing(&v).unwrap();
        let b = u.pairing(&phi_apply(&p, &v).unwrap()).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()), "{a} {b}");
    }

    #[test]
    fn support_violation_is_reported() {
        let grid = GridSpec::cube(2, 16, 1.0);
        let p = plan(&grid, KernelKind::NewtonianG);
        let u = GridForm::sample(&grid, 0, |_, _| 1.0);
        assert_eq!(phi_apply(&p, &u), Err(Error::SupportViolation { margin: SUPPORT_MARGIN }));
        let pb = plan(&grid, KernelKind::BiharmonicB);
        assert!(phi_apply(&pb, &GridForm::zero(&grid, 0)).is_err());
        assert!(phi_mu_apply_scalar(&pb, 0.0, 1.0, &GridForm::zero(&grid, 0)).is_err());
    }

    #[test]
    fn laplacian_inverts_phi_at_second_order() {
        let mut prev: Option<(f64, f64)> = None;
        for count in [32, 64] {
            let grid = GridSpec::cube(2, count, 1.0);
            let p = plan(&grid, KernelKind::NewtonianG);
            let u = bump_form(2, 1).sample(&grid).unwrap();
            let e = inversion_residual(&p, &u).unwrap();
            let el = left_inversion_residual(&p, &u).unwrap();
            assert!(el < 2e-2, "left residual {el}");
            if let Some((e0, h0)) = prev {
                assert!(observed_order(e0, e, h0, grid.max_spacing()) >= 1.5, "{e0} -> {e}");
            }
            prev = Some((e, grid.max_spacing()));
        }
    }

    #[test]
    fn phi_mu_with_unit_scalars_matches_phi() {
        let grid = GridSpec::cube(2, 48, 1.0);
        let u = bump_form(2, 1).sample(&grid).unwrap();
        let a = phi_apply(&plan(&grid, KernelKind::NewtonianG), &u).unwrap();
        let b = phi_mu_apply_scalar(&plan(&grid, KernelKind::BiharmonicB), 1.0, 1.0, &u).unwrap();
        let err = a.sub(&b).unwrap().max_norm_interior(RESIDUAL_MARGIN) / a.max_norm();
        assert!(err < 1e-2, "{err}");
    }

    #[test]
    fn phi_mu_inverts_the_lame_operator() {
        let (a, at) = (2.0, 3.0);
        let mut prev: Option<(f64, f64)> = None;
        for count in [32, 64, 128] {
            let grid = GridSpec::cube(2, count, 1.0);
            let psi = bump_form(2, 1).sample(&grid).unwrap();
            let f = psi.lame_laplacian(&LamePair::scalar(2, 1, a, at)).unwrap();
            let back = phi_mu_apply_scalar(&plan(&grid, KernelKind::BiharmonicB), a, at, &f).unwrap();
            let e = back.sub(&psi).unwrap().max_norm_interior(RESIDUAL_MARGIN) / psi.max_norm();
            if let Some((e0, h0)) = prev {
                assert!(e < e0);
                if count == 128 {
                    assert!(observed_order(e0, e, h0, grid.max_spacing()) >= 1.5, "{e0} -> {e}");
                }
            }
            prev = Some((e, grid.max_spacing()));
        }
    }

    #[test]
    fn commutation_converges_and_top_degree_is_exact() {
        let mut prev: Option<(f64, f64)> = None;
        for count in [32, 64] {
            let grid = GridSpec::cube(2, count, 1.0);
            let p = plan(&grid, KernelKind::NewtonianG);
            let r = commutation_residual(&p, &bump_form(2, 0)).unwrap();
            if let Some((e0, h0)) = prev {
                assert!(observed_order(e0, r.d, h0, grid.max_spacing()) >= 1.5, "{e0} -> {}", r.d);
            }
            prev = Some((r.d, grid.max_spacing()));
            let top = commutation_residual(&p, &bump_form(2, 2)).unwrap();
            assert_eq!(top.d, 0.0);
        }
    }
}
