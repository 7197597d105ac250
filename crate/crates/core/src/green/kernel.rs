use super::trace::NodeData;
use crate::error::{Error, Result};
use crate::exterior::Form;
use crate::kernels::{KernelKind, KernelSpec};
use crate::stokes::StokesSpec;

/// `(a, ã)` of a spec the pointwise kernels cover: `q = 1`, `j0 = 1`,
/// `n ∈ {2, 3}`, scalar coefficients at level 1.
fn supported(spec: &StokesSpec) -> Result<(f64, f64)> {
    if spec.q() != 1 || spec.j0() != 1 || !(spec.n() == 2 || spec.n() == 3) {
        return Err(Error::Unsupported(format!(
            "pointwise kernels need q = j0 = 1 and n ∈ {{2, 3}}, got n = {}, q = {}, j0 = {}",
            spec.n(),
            spec.q(),
            spec.j0()
        )));
    }
    spec.scalars(1).ok_or_else(|| Error::Unsupported("pointwise kernels need scalar coefficients".into()))
}

/// Kernel of `Φ`: `−g(y − x)` times the identity on components.
pub fn phi_kernel(x: &[f64], y: &[f64]) -> Result<f64> {
    let r: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
    Ok(-KernelSpec::new(r.len(), KernelKind::NewtonianG)?.value(&r)?)
}

/// Column `row` of the fundamental solution `Ψ_{1,μ}` with pole `x`, as a
/// function of `y`. Rows `0..n` are the `dx_{row+1}` velocity components,
/// row `n` the pressure. With `a` the level-1 scalar:
/// velocity column `i`: `v_1 = a⁻¹ Σ_j (∂_i∂_j B − δ_ij g) dx_j`, `v_0 = ∂_i g`;
/// pressure column: `v_1 = −dg`, `v_0 = 0` off the pole.
#[derive(Clone, Debug)]
pub struct KernelColumn {
    x: Vec<f64>,
    row: usize,
    a: f64,
    g: KernelSpec,
    b: KernelSpec,
}

pub fn kernel_column(spec: &StokesSpec, x: &[f64], row: usize) -> Result<KernelColumn> {
    let (a, _) = supported(spec)?;
    let n = spec.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    if row > n {
        return Err(Error::Parameter(format!("row {row} outside 0..={n}")));
    }
    Ok(KernelColumn {
        x: x.to_vec(),
        row,
        a,
        g: KernelSpec::new(n, KernelKind::NewtonianG)?,
        b: KernelSpec::new(n, KernelKind::BiharmonicB)?,
    })
}

impl KernelColumn {
    pub fn pole(&self) -> &[f64] {
        &self.x
    }

    pub fn row(&self) -> usize {
        self.row
    }

    /// Values and first derivatives at `y`; `y = x` is a singularity.
    pub fn eval(&self, y: &[f64]) -> Result<NodeData> {
        let n = self.x.len();
        if y.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: y.len() });
        }
        let r: Vec<f64> = y.iter().zip(&self.x).map(|(a, b)| a - b).collect();
        let gv = self.g.value(&r)?;
        let g1 = self.g.gradient(&r)?;
        let g2 = self.g.hessian(&r)?;
        let (one, zero): (Vec<Vec<f64>>, f64) = if self.row < n {
            let i = self.row;
            let b2 = self.b.hessian(&r)?;
            let b3 = self.b.third(&r)?;
            let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
            let one = (0..n)
                .map(|j| {
                    let mut jet = vec![(b2[i * n + j] - delta(i, j) * gv) / self.a];
                    jet.extend((0..n).map(|k| (b3[(i * n + j) * n + k] - delta(i, j) * g1[k]) / self.a));
                    jet
                })
                .collect();
            (one, g1[i])
        } else {
            let one = (0..n)
                .map(|j| {
                    let mut jet = vec![-g1[j]];
                    jet.extend((0..n).map(|k| -g2[j * n + k]));
                    jet
                })
                .collect();
            (one, 0.0)
        };
        NodeData::new(vec![Form::from_coeffs(n, 1, one)?, Form::from_coeffs(n, 0, vec![vec![zero]])?])
    }

    /// Flattened values `(v_1 coefficients…, v_0)` at `y`.
    pub fn values(&self, y: &[f64]) -> Result<Vec<f64>> {
        let data = self.eval(y)?;
        Ok(data.parts().iter().flat_map(|p| p.coeffs().iter().map(|c| c[0])).collect())
    }
}

/// Kernel matrix `K(y, x)` of `Ψ_{1,μ}`: entry `[β][α]` is component `β`
/// at `y` of the column with pole `x` and row `α`.
pub fn kernel_matrix(spec: &StokesSpec, y: &[f64], x: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = spec.n();
    let cols = (0..=n).map(|alpha| kernel_column(spec, x, alpha)?.values(y)).collect::<Result<Vec<_>>>()?;
    Ok((0..=n).map(|beta| cols.iter().map(|c| c[beta]).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{codifferential, JetRing};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn phi_kernel_at_unit_distance() {
        let k = phi_kernel(&[0.0, 0.0, 0.0], &[0.0, 0.6, 0.8]).unwrap();
        assert!((k - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!(matches!(phi_kernel(&[1.0, 2.0], &[1.0, 2.0]), Err(Error::Singularity)));
    }

    #[test]
    fn biharmonic_laplacian_is_newtonian() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2, 3] {
            let b = KernelSpec::new(n, KernelKind::BiharmonicB).unwrap();
            let g = KernelSpec::new(n, KernelKind::NewtonianG).unwrap();
            for _ in 0..20 {
                let x = random_point(&mut rng, n);
                let h = 1e-3;
                let lap: f64 = (0..n)
                    .map(|k| {
                        let mut p = x.clone();
                        let mut m = x.clone();
                        p[k] += h;
                        m[k] -= h;
                        (b.value(&p).unwrap() - 2.0 * b.value(&x).unwrap() + b.value(&m).unwrap()) / (h * h)
                    })
                    .sum();
                let gv = g.value(&x).unwrap();
                assert!((lap - gv).abs() < 1e-6 * gv.abs().max(1.0), "{lap} {gv}");
            }
        }
    }

    #[test]
    fn kernel_matrix_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in [2, 3] {
            let spec = StokesSpec::scalar(n, 1, 1, 1.7, 0.6).unwrap();
            for _ in 0..10 {
                let (x, y) = (random_point(&mut rng, n), random_point(&mut rng, n));
                let kxy = kernel_matrix(&spec, &y, &x).unwrap();
                let kyx = kernel_matrix(&spec, &x, &y).unwrap();
                for b in 0..=n {
                    for a in 0..=n {
                        assert!((kxy[b][a] - kyx[a][b]).abs() < 1e-12 * (1.0 + kxy[b][a].abs()));
                    }
                }
            }
        }
    }

    #[test]
    fn pressure_row_is_the_codifferential_of_the_phi_column() {
        // Ψ^{2,1} = d*Φ: the pressure entry of velocity column i is
        // −div_y(−g(y − x) dx_i), differentiated numerically.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 3] {
            let spec = StokesSpec::identity(n, 1, 1).unwrap();
            let x = random_point(&mut rng, n);
            let y = random_point(&mut rng, n);
            for i in 0..n {
                let h = 1e-5;
                let mut p = y.clone();
                let mut m = y.clone();
                p[i] += h;
                m[i] -= h;
                let div = (phi_kernel(&x, &p).unwrap() - phi_kernel(&x, &m).unwrap()) / (2.0 * h);
                let col = kernel_column(&spec, &x, i).unwrap().values(&y).unwrap();
                assert!((col[n] + div).abs() < 1e-7 * (1.0 + div.abs()), "{} {}", col[n], -div);
            }
        }
    }

    #[test]
    fn columns_are_stokes_null_off_the_pole() {
        // d*v_1 = 0 holds exactly on the jets; the momentum row is checked
        // with numerically differentiated jets.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in [2, 3] {
            let spec = StokesSpec::scalar(n, 1, 1, 2.5, 0.4).unwrap();
            let a = 2.5;
            let ring = JetRing { n };
            let x = random_point(&mut rng, n);
            let y: Vec<f64> = x.iter().map(|v| v + 0.7).collect();
            for row in 0..=n {
                let col = kernel_column(&spec, &x, row).unwrap();
                let data = col.eval(&y).unwrap();
                let div = codifferential(&ring, &data.parts()[0]).unwrap();
                assert!(div.coeffs()[0][0].abs() < 1e-12);
                // a d*d v_1 + d v_0 = −a Σ_k ∂_k² v_1 + d v_0 since d*v_1 = 0.
                let h = 1e-4;
                let jets_at = |p: &[f64]| col.eval(p).unwrap();
                for j in 0..n {
                    let mut lap = 0.0;
                    let mut grad0 = 0.0;
                    for k in 0..n {
                        let mut p = y.clone();
                        let mut m = y.clone();
                        p[k] += h;
                        m[k] -= h;
                        let (dp, dm) = (jets_at(&p), jets_at(&m));
                        lap += (dp.parts()[0].coeffs()[j][1 + k] - dm.parts()[0].coeffs()[j][1 + k]) / (2.0 * h);
                        if k == j {
                            grad0 = (dp.parts()[1].coeffs()[0][0] - dm.parts()[1].coeffs()[0][0]) / (2.0 * h);
                        }
                    }
                    let row_val = -a * lap + grad0;
                    assert!(row_val.abs() < 1e-6, "n={n} row={row} j={j}: {row_val}");
                }
            }
        }
    }

    #[test]
    fn unsupported_shapes_are_rejected() {
        assert!(kernel_column(&StokesSpec::identity(2, 2, 2).unwrap(), &[0.0, 0.0], 0).is_err());
        assert!(kernel_column(&StokesSpec::identity(4, 1, 1).unwrap(), &[0.0; 4], 0).is_err());
        assert!(kernel_column(&StokesSpec::identity(2, 1, 1).unwrap(), &[0.0, 0.0], 3).is_err());
        let col = kernel_column(&StokesSpec::identity(2, 1, 1).unwrap(), &[0.0, 0.0], 0).unwrap();
        assert!(matches!(col.eval(&[0.0, 0.0]), Err(Error::Singularity)));
    }
}
