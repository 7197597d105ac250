use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Surface area of the unit sphere in `ℝⁿ`, `2π^{n/2}/Γ(n/2)`.
pub fn sigma(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// `Γ(k/2)` for a positive integer `k`.
fn gamma_half(k: usize) -> f64 {
    let (mut x, mut acc) = if k % 2 == 0 { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    while 2.0 * x < k as f64 {
        acc *= x;
        x += 1.0;
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    /// Newtonian potential `g` with `Δg = δ`.
    NewtonianG,
    /// Biharmonic potential `B` with `ΔB = g`, `Δ²B = δ`.
    BiharmonicB,
}

/// Radial kernel in `ℝⁿ` with analytic derivatives up to third order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec {
    pub n: usize,
    pub kind: KernelKind,
}

impl KernelSpec {
    pub fn new(n: usize, kind: KernelKind) -> Result<Self> {
        match kind {
            KernelKind::NewtonianG if n >= 2 => Ok(Self { n, kind }),
            KernelKind::BiharmonicB if n == 2 || n == 3 => Ok(Self { n, kind }),
            _ => Err(Error::Unsupported(format!("{kind:?} kernel in dimension {n}"))),
        }
    }

    pub fn sigma(&self) -> f64 {
        sigma(self.n)
    }

    fn radius(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return Err(Error::Singularity);
        }
        Ok(r)
    }

    fn profile(&self, r: f64) -> f64 {
        let n = self.n as f64;
        match (self.kind, self.n) {
            (KernelKind::NewtonianG, 2) => r.ln() / (2.0 * PI),
            (KernelKind::NewtonianG, _) => r.powf(2.0 - n) / (self.sigma() * (2.0 - n)),
            (KernelKind::BiharmonicB, 2) => r * r * (r.ln() - 1.0) / (8.0 * PI),
            (KernelKind::BiharmonicB, _) => -r / (8.0 * PI),
        }
    }

    /// Derivatives `F', F'', F'''` with respect to `ρ = r²/2`.
    fn rho_derivatives(&self, r: f64) -> [f64; 3] {
        let n = self.n as f64;
        match (self.kind, self.n) {
            (KernelKind::NewtonianG, _) => {
                let s = self.sigma();
                let base = r.powf(-n) / s;
                [base, -n * base / (r * r), n * (n + 2.0) * base / r.powi(4)]
            }
            (KernelKind::BiharmonicB, 2) => {
                [(2.0 * r.ln() - 1.0) / (8.0 * PI), 1.0 / (4.0 * PI * r * r), -1.0 / (2.0 * PI * r.powi(4))]
            }
            (KernelKind::BiharmonicB, _) => {
                [-1.0 / (8.0 * PI * r), 1.0 / (8.0 * PI * r.powi(3)), -3.0 / (8.0 * PI * r.powi(5))]
            }
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.profile(self.radius(x)?))
    }

    /// `∂_i K(x)`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let [f1, _, _] = self.rho_derivatives(self.radius(x)?);
        Ok(x.iter().map(|xi| f1 * xi).collect())
    }

    /// `∂_i ∂_j K(x)`, row-major `n × n`.
    pub fn hessian(&self, x: &[f64]) -> Result<Vec<f64>> {
        let [f1, f2, _] = self.rho_derivatives(self.radius(x)?);
        let n = self.n;
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                h[i * n + j] = f2 * x[i] * x[j] + if i == j { f1 } else { 0.0 };
            }
        }
        Ok(h)
    }

    /// `∂_i ∂_j ∂_k K(x)`, row-major `n × n × n`.
    pub fn third(&self, x: &[f64]) -> Result<Vec<f64>> {
        let [_, f2, f3] = self.rho_derivatives(self.radius(x)?);
        let n = self.n;
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let mut t = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    t[(i * n + j) * n + k] = f3 * x[i] * x[j] * x[k]
                        + f2 * (delta(i, j) * x[k] + delta(i, k) * x[j] + delta(j, k) * x[i]);
                }
            }
        }
        Ok(t)
    }
}

/// Newtonian potential: `ln|x|/(2π)` for `n = 2`, `|x|^{2−n}/(σ_n(2−n))` otherwise.
pub fn eval_g(x: &[f64]) -> Result<f64> {
    KernelSpec::new(x.len(), KernelKind::NewtonianG)?.value(x)
}

/// Biharmonic potential with `ΔB = g`: `−|x|/(8π)` for `n = 3`,
/// `|x|²(ln|x| − 1)/(8π)` for `n = 2`.
pub fn eval_biharmonic_b(x: &[f64]) -> Result<f64> {
    KernelSpec::new(x.len(), KernelKind::BiharmonicB)?.value(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn sphere_areas() {
        assert!(close(sigma(2), 2.0 * PI, 1e-15));
        assert!(close(sigma(3), 4.0 * PI, 1e-15));
        assert!(close(sigma(4), 2.0 * PI * PI, 1e-15));
        assert!(close(sigma(5), 8.0 * PI * PI / 3.0, 1e-15));
    }

    #[test]
    fn newtonian_values() {
        assert_eq!(eval_g(&[1.0, 0.0]).unwrap(), 0.0);
        assert!(close(eval_g(&[0.6, 0.8]).unwrap(), 0.0, 1e-15));
        assert!(close(eval_g(&[1.0, 0.0, 0.0]).unwrap(), -1.0 / (4.0 * PI), 1e-15));
        assert!(close(eval_g(&[2.0, 0.0, 0.0]).unwrap(), -1.0 / (8.0 * PI), 1e-15));
        assert!(close(eval_g(&[1.0, 0.0, 0.0]).unwrap(), -0.07957747, 1e-7));
        assert_eq!(eval_g(&[0.0, 0.0, 0.0]), Err(Error::Singularity));
    }

    #[test]
    fn biharmonic_values() {
        assert!(close(eval_biharmonic_b(&[0.0, 0.0, 1.0]).unwrap(), -1.0 / (8.0 * PI), 1e-15));
        assert!(close(eval_biharmonic_b(&[1.0, 0.0]).unwrap(), -1.0 / (8.0 * PI), 1e-15));
        assert!(close(eval_biharmonic_b(&[0.0, 2.0, 0.0]).unwrap(), -1.0 / (4.0 * PI), 1e-15));
        assert_eq!(eval_biharmonic_b(&[0.0, 0.0]), Err(Error::Singularity));
        assert!(eval_biharmonic_b(&[1.0, 0.0, 0.0, 0.0]).is_err());
    }

    /// Fourth-order central differences of `f` along `axis`.
    fn fd(f: &dyn Fn(&[f64]) -> f64, x: &[f64], axis: usize, h: f64) -> f64 {
        let at = |s: f64| {
            let mut y = x.to_vec();
            y[axis] += s * h;
            f(&y)
        };
        (-at(2.0) + 8.0 * at(1.0) - 8.0 * at(-1.0) + at(-2.0)) / (12.0 * h)
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let points: [&[f64]; 4] = [&[0.7, -0.4], &[1.3, 0.2], &[0.5, -0.6, 0.9], &[-1.1, 0.3, 0.4]];
        for kind in [KernelKind::NewtonianG, KernelKind::BiharmonicB] {
            for x in points {
                let k = KernelSpec::new(x.len(), kind).unwrap();
                let n = x.len();
                let h = 1e-3;
                let grad = k.gradient(x).unwrap();
                let hess = k.hessian(x).unwrap();
                let third = k.third(x).unwrap();
                for i in 0..n {
                    let v = |y: &[f64]| k.value(y).unwrap();
                    assert!(close(grad[i], fd(&v, x, i, h), 1e-9));
                    for j in 0..n {
                        let gj = |y: &[f64]| k.gradient(y).unwrap()[j];
                        assert!(close(hess[i * n + j], fd(&gj, x, i, h), 1e-9));
                        for l in 0..n {
                            let hjl = |y: &[f64]| k.hessian(y).unwrap()[j * n + l];
                            assert!(close(third[(i * n + j) * n + l], fd(&hjl, x, i, h), 1e-8));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn laplacian_relations() {
        for x in [&[0.7, -0.4][..], &[0.5, -0.6, 0.9][..], &[0.2, 0.1, -0.3, 0.8][..]] {
            let n = x.len();
            let trace = |k: &KernelSpec| (0..n).map(|i| k.hessian(x).unwrap()[i * n + i]).sum::<f64>();
            let g = KernelSpec::new(n, KernelKind::NewtonianG).unwrap();
            assert!(trace(&g).abs() < 1e-12);
            if n <= 3 {
                let b = KernelSpec::new(n, KernelKind::BiharmonicB).unwrap();
                assert!(close(trace(&b), g.value(x).unwrap(), 1e-12));
            }
        }
    }

    #[test]
    fn flux_through_sphere_is_one() {
        // ∫_{|x|=r} ∂_r g = 1 for every r
        for n in 2..=5 {
            let g = KernelSpec::new(n, KernelKind::NewtonianG).unwrap();
            let r = 0.7;
            let mut x = vec![0.0; n];
            x[0] = r;
            let dr = g.gradient(&x).unwrap()[0];
            assert!(close(dr * sigma(n) * r.powi(n as i32 - 1), 1.0, 1e-14));
        }
    }
}
