//! Compactly supported `C^∞` test fields with analytic first derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{codifferential, exterior_derivative, Form, GridForm, GridSpec, JetRing, MultiIndex};

/// `ψ(t) = exp(−1/(1−t²))` on `|t| < 1`, zero elsewhere; returns `(ψ, ψ')`.
pub fn bump_profile(t: f64) -> (f64, f64) {
    sharp_profile(t, 1.0)
}

/// `exp(−α/(1−t²))`; larger `α` narrows the bump and softens its edge layer.
fn sharp_profile(t: f64, alpha: f64) -> (f64, f64) {
    if t.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let s = 1.0 - t * t;
    let v = (-alpha / s).exp();
    (v, -2.0 * alpha * t / (s * s) * v)
}

fn unit() -> f64 {
    1.0
}

/// Support shape of a [`Bump`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BumpShape {
    /// `∏_k ψ((x_k − c_k)/radius)`, supported in a cube.
    #[default]
    Tensor,
    /// `ψ(|x − c|/radius)`, supported in a ball.
    Radial,
}

/// `amplitude` times a bump of the given shape centred at `center`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
    pub amplitude: f64,
    #[serde(default)]
    pub shape: BumpShape,
    /// Exponent `α` of the profile `exp(−α/(1−t²))`.
    #[serde(default = "unit")]
    pub sharpness: f64,
}

impl Bump {
    pub fn new(center: Vec<f64>, radius: f64, amplitude: f64) -> Result<Self> {
        Self::with_shape(center, radius, amplitude, BumpShape::Tensor)
    }

    pub fn radial(center: Vec<f64>, radius: f64, amplitude: f64) -> Result<Self> {
        Self::with_shape(center, radius, amplitude, BumpShape::Radial)
    }

    pub fn with_shape(center: Vec<f64>, radius: f64, amplitude: f64, shape: BumpShape) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Parameter(format!("bump radius {radius} must be positive")));
        }
        Ok(Self { center, radius, amplitude, shape, sharpness: 1.0 })
    }

    pub fn with_sharpness(mut self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::Parameter(format!("bump sharpness {alpha} must be positive")));
        }
        self.sharpness = alpha;
        Ok(self)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.jet(x)[0]
    }

    /// `[v, ∂_1 v, …, ∂_n v]`.
    pub fn jet(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let mut out = vec![0.0; n + 1];
        match self.shape {
            BumpShape::Tensor => {
                let parts: Vec<(f64, f64)> =
                    x.iter().zip(&self.center).map(|(xi, ci)| sharp_profile((xi - ci) / self.radius, self.sharpness)).collect();
                out[0] = self.amplitude * parts.iter().map(|p| p.0).product::<f64>();
                for j in 0..n {
                    let mut g = self.amplitude * parts[j].1 / self.radius;
                    for (k, p) in parts.iter().enumerate() {
                        if k != j {
                            g *= p.0;
                        }
                    }
                    out[j + 1] = g;
                }
            }
            BumpShape::Radial => {
                let r2 = self.radius * self.radius;
                let s: f64 = x.iter().zip(&self.center).map(|(xi, ci)| (xi - ci) * (xi - ci)).sum::<f64>() / r2;
                if s >= 1.0 {
                    return out;
                }
                let v = self.amplitude * (-self.sharpness / (1.0 - s)).exp();
                out[0] = v;
                let dv_ds = -self.sharpness * v / ((1.0 - s) * (1.0 - s));
                for j in 0..n {
                    out[j + 1] = dv_ds * 2.0 * (x[j] - self.center[j]) / r2;
                }
            }
        }
        out
    }

    /// Largest coordinate extent `max_k |c_k| + radius`.
    pub fn extent(&self) -> f64 {
        self.center.iter().map(|c| c.abs()).fold(0.0, f64::max) + self.radius
    }
}

/// A form whose components are sums of bumps, listed in lexicographic
/// multi-index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpForm {
    pub n: usize,
    pub degree: usize,
    pub components: Vec<Vec<Bump>>,
}

impl BumpForm {
    pub fn new(n: usize, degree: usize, components: Vec<Vec<Bump>>) -> Result<Self> {
        if degree > n {
            return Err(Error::InvalidDegree { degree, n });
        }
        let k = MultiIndex::all(n, degree).len();
        if components.len() != k {
            return Err(Error::Parameter(format!("{} components for {k} multi-indices", components.len())));
        }
        if components.iter().flatten().any(|b| b.center.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: 0 });
        }
        Ok(Self { n, degree, components })
    }

    pub fn zero(n: usize, degree: usize) -> Self {
        Self { n, degree, components: vec![Vec::new(); MultiIndex::all(n, degree).len()] }
    }

    /// One bump in the component of multi-index `index`.
    pub fn single(n: usize, index: &MultiIndex, bump: Bump) -> Result<Self> {
        let mut f = Self::zero(n, index.degree());
        let pos = MultiIndex::all(n, index.degree())
            .iter()
            .position(|m| m == index)
            .ok_or_else(|| Error::InvalidMultiIndex(index.indices().to_vec()))?;
        f.components[pos].push(bump);
        Ok(f)
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        for b in out.components.iter_mut().flatten() {
            b.amplitude *= c;
        }
        out
    }

    pub fn extent(&self) -> f64 {
        self.components.iter().flatten().map(Bump::extent).fold(0.0, f64::max)
    }

    /// Jets of all components at `x`.
    pub fn jet_form(&self, x: &[f64]) -> Form<Vec<f64>> {
        let coeffs = self
            .components
            .iter()
            .map(|bs| {
                let mut acc = vec![0.0; self.n + 1];
                for b in bs {
                    for (a, v) in acc.iter_mut().zip(b.jet(x)) {
                        *a += v;
                    }
                }
                acc
            })
            .collect();
        Form::from_coeffs(self.n, self.degree, coeffs).expect("component count checked")
    }

    /// Values of the form at `x`.
    pub fn value(&self, x: &[f64]) -> Vec<f64> {
        self.jet_form(x).coeffs().iter().map(|j| j[0]).collect()
    }

    /// Values of `du` at `x`, exact.
    pub fn d_value(&self, x: &[f64]) -> Result<Vec<f64>> {
        let ring = JetRing { n: self.n };
        Ok(exterior_derivative(&ring, &self.jet_form(x))?.coeffs().iter().map(|j| j[0]).collect())
    }

    /// Values of `d*u` at `x`, exact.
    pub fn codiff_value(&self, x: &[f64]) -> Result<Vec<f64>> {
        let ring = JetRing { n: self.n };
        Ok(codifferential(&ring, &self.jet_form(x))?.coeffs().iter().map(|j| j[0]).collect())
    }

    fn sample_with(&self, grid: &GridSpec, degree: usize, f: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<GridForm> {
        let k = MultiIndex::all(self.n, degree).len();
        let mut coeffs = vec![vec![0.0; grid.len()]; k];
        for node in 0..grid.len() {
            let v = f(&grid.coords(node))?;
            for (c, x) in coeffs.iter_mut().zip(v) {
                c[node] = x;
            }
        }
        GridForm::new(grid.clone(), Form::from_coeffs(self.n, degree, coeffs)?)
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<GridForm> {
        self.check_grid(grid)?;
        self.sample_with(grid, self.degree, |x| Ok(self.value(x)))
    }

    /// Exact `du` sampled on the grid (zero form of degree `n + 1` is not
    /// representable, so `q = n` gives an error like the grid `d`).
    pub fn sample_d(&self, grid: &GridSpec) -> Result<GridForm> {
        self.check_grid(grid)?;
        if self.degree >= self.n {
            return Err(Error::InvalidDegree { degree: self.degree + 1, n: self.n });
        }
        self.sample_with(grid, self.degree + 1, |x| self.d_value(x))
    }

    pub fn sample_codiff(&self, grid: &GridSpec) -> Result<GridForm> {
        self.check_grid(grid)?;
        if self.degree == 0 {
            return Err(Error::CodifferentialOfZeroForm);
        }
        self.sample_with(grid, self.degree - 1, |x| self.codiff_value(x))
    }

    fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        if grid.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: grid.n() });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_derivative() {
        for t in [-0.9, -0.3, 0.0, 0.4, 0.8] {
            let h = 1e-6;
            let fd = (bump_profile(t + h).0 - bump_profile(t - h).0) / (2.0 * h);
            assert!((fd - bump_profile(t).1).abs() < 1e-8);
        }
        assert_eq!(bump_profile(1.0), (0.0, 0.0));
        assert_eq!(bump_profile(-1.5), (0.0, 0.0));
    }

    #[test]
    fn exact_d_of_bump_form() {
        let b = Bump::new(vec![0.1, -0.2], 0.5, 2.0).unwrap();
        let u = BumpForm::single(2, &MultiIndex::new(2, vec![1]).unwrap(), b.clone()).unwrap();
        let x = [0.2, 0.0];
        let jet = b.jet(&x);
        // d(f dx1) = −∂_2 f dx1∧dx2
        assert!((u.d_value(&x).unwrap()[0] + jet[2]).abs() < 1e-15);
        // d*(f dx1) = −∂_1 f
        assert!((u.codiff_value(&x).unwrap()[0] + jet[1]).abs() < 1e-15);
    }

    #[test]
    fn radial_jet_matches_finite_differences() {
        let b = Bump::radial(vec![0.1, -0.2, 0.05], 0.7, 1.5).unwrap();
        let x = [0.3, 0.1, -0.2];
        let jet = b.jet(&x);
        for j in 0..3 {
            let (mut p, mut m) = (x, x);
            p[j] += 1e-6;
            m[j] -= 1e-6;
            let fd = (b.value(&p) - b.value(&m)) / 2e-6;
            assert!((fd - jet[j + 1]).abs() < 1e-7, "{fd} {}", jet[j + 1]);
        }
        assert_eq!(b.jet(&[0.8, 0.0, 0.0]), vec![0.0; 4]);
        let t = Bump::new(vec![0.0; 2], 0.5, 1.0).unwrap();
        assert_eq!(b.value(&[0.1, -0.2, 0.05]), 1.5 * (-1.0f64).exp());
        assert_eq!(t.value(&[0.0, 0.0]), (-2.0f64).exp());
    }

    #[test]
    fn sharp_jets_match_finite_differences() {
        for shape in [BumpShape::Tensor, BumpShape::Radial] {
            let b = Bump::with_shape(vec![0.1, -0.2], 0.8, 2.0, shape).unwrap().with_sharpness(2.5).unwrap();
            let x = [0.3, 0.1];
            let jet = b.jet(&x);
            for j in 0..2 {
                let (mut p, mut m) = (x, x);
                p[j] += 1e-6;
                m[j] -= 1e-6;
                let fd = (b.value(&p) - b.value(&m)) / 2e-6;
                assert!((fd - jet[j + 1]).abs() < 1e-7, "{shape:?}: {fd} {}", jet[j + 1]);
            }
        }
        let r = Bump::radial(vec![0.0], 1.0, 1.0).unwrap().with_sharpness(2.0).unwrap();
        assert_eq!(r.value(&[0.0]), (-2.0f64).exp());
        assert!(Bump::radial(vec![0.0], 1.0, 1.0).unwrap().with_sharpness(0.0).is_err());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Bump::new(vec![0.0], 0.0, 1.0).is_err());
        assert!(BumpForm::new(2, 1, vec![vec![]]).is_err());
        assert!(BumpForm::new(2, 3, vec![]).is_err());
        assert!(BumpForm::zero(2, 0).sample_codiff(&GridSpec::cube(2, 5, 1.0)).is_err());
    }
}
