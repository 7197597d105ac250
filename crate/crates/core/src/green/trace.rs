use super::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::exterior::{
    codifferential, exterior_derivative, hodge_star, matrix_action_direct, wedge, Form, JetRing, LamePair,
    MultiIndex, PointRing,
};
use crate::stokes::StokesSpec;

/// Pointwise data of a tuple `(u_q, …, u_0)`: each coefficient is either
/// a value `[v]` or a first-order jet `[v, ∂_1 v, …, ∂_n v]`.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeData {
    parts: Vec<Form<Vec<f64>>>,
}

impl NodeData {
    pub fn new(parts: Vec<Form<Vec<f64>>>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::IncompleteTrace("no components".into()));
        };
        let n = first.n();
        let q = parts.len() - 1;
        for (i, p) in parts.iter().enumerate() {
            if p.degree() != q - i || p.n() != n {
                return Err(Error::DegreeMismatch { expected: q - i, found: p.degree() });
            }
            if p.coeffs().iter().any(|c| c.len() != 1 && c.len() != n + 1) {
                return Err(Error::IncompleteTrace(format!("component {i} has a coefficient of bad length")));
            }
        }
        Ok(Self { parts })
    }

    pub fn n(&self) -> usize {
        self.parts[0].n()
    }

    pub fn q(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn parts(&self) -> &[Form<Vec<f64>>] {
        &self.parts
    }

    /// Component of degree `j`.
    fn level(&self, j: usize) -> &Form<Vec<f64>> {
        &self.parts[self.q() - j]
    }

    pub fn values(&self, j: usize) -> Form<f64> {
        self.level(j).map(|c| c[0])
    }

    fn jets(&self, j: usize) -> Result<&Form<Vec<f64>>> {
        let f = self.level(j);
        if f.coeffs().iter().any(|c| c.len() != self.n() + 1) {
            return Err(Error::IncompleteTrace(format!("first derivatives of the degree-{j} component are missing")));
        }
        Ok(f)
    }

    /// `(du, d*u)` values of the degree-`j` component; `None` where the
    /// operator leaves the complex.
    fn derivatives(&self, j: usize) -> Result<(Option<Form<f64>>, Option<Form<f64>>)> {
        let ring = JetRing { n: self.n() };
        let jets = self.jets(j)?;
        let du = if j < self.n() { Some(exterior_derivative(&ring, jets)?.map(|c| c[0])) } else { None };
        let su = if j >= 1 { Some(codifferential(&ring, jets)?.map(|c| c[0])) } else { None };
        Ok((du, su))
    }
}

/// Values (and top-degree jets) of a tuple at every boundary node.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryTrace {
    nodes: Vec<NodeData>,
}

impl BoundaryTrace {
    pub fn new(domain: &DomainSpec, nodes: Vec<NodeData>) -> Result<Self> {
        if nodes.len() != domain.nodes().len() {
            return Err(Error::IncompleteTrace(format!(
                "{} node records for {} quadrature nodes",
                nodes.len(),
                domain.nodes().len()
            )));
        }
        if let Some(first) = nodes.first() {
            let shape = |d: &NodeData| d.parts.iter().map(|p| (p.degree(), p.n())).collect::<Vec<_>>();
            if nodes.iter().any(|d| shape(d) != shape(first)) || first.n() != domain.n() {
                return Err(Error::IncompleteTrace("node records disagree in shape".into()));
            }
        }
        Ok(Self { nodes })
    }

    /// Evaluates `f` at every boundary node.
    pub fn sample(domain: &DomainSpec, f: impl Fn(&[f64]) -> Result<NodeData>) -> Result<Self> {
        let nodes = domain.nodes().iter().map(|node| f(&node.y)).collect::<Result<_>>()?;
        Self::new(domain, nodes)
    }

    pub fn nodes(&self) -> &[NodeData] {
        &self.nodes
    }
}

/// Integrand of an `(n−1)`-form against surface measure: with `ω = Σ_I ω_I dx_I`
/// over `#I = n−1`, returns `Σ_i (−1)^{i−1} ω_{î} ν_i`.
pub fn surface_density(omega: &Form<f64>, normal: &[f64]) -> f64 {
    let n = omega.n();
    MultiIndex::all(n, n - 1)
        .iter()
        .zip(omega.coeffs())
        .map(|(idx, w)| {
            let missing = (1..=n).find(|i| !idx.indices().contains(i)).expect("one index is missing");
            let sign = if missing % 2 == 1 { 1.0 } else { -1.0 };
            sign * w * normal[missing - 1]
        })
        .sum()
}

fn wedge_star(a: &Form<f64>, b: &Form<f64>) -> Result<Form<f64>> {
    let ring = PointRing { n: a.n() };
    wedge(&ring, a, &hodge_star(&ring, b)?)
}

fn accumulate(acc: &mut Form<f64>, c: f64, x: &Form<f64>) {
    for (a, b) in acc.coeffs_mut().iter_mut().zip(x.coeffs()) {
        *a += c * b;
    }
}

/// `G_{Δ_{j,μ}}(v, u) = −v ∧ ⋆(M du) + (M̃ d*u) ∧ ⋆v + u ∧ ⋆(M dv) − (M̃ d*v) ∧ ⋆u`.
fn green_lame(mu: &LamePair, j: usize, v: &NodeData, u: &NodeData) -> Result<Form<f64>> {
    let n = u.n();
    let ring = PointRing { n };
    let (uv, vv) = (u.values(j), v.values(j));
    let (du, su) = u.derivatives(j)?;
    let (dv, sv) = v.derivatives(j)?;
    let mut omega = Form::from_coeffs(n, n - 1, vec![0.0; n])?;
    if let (Some(m), Some(du), Some(dv)) = (&mu.m, du, dv) {
        accumulate(&mut omega, -1.0, &wedge_star(&vv, &matrix_action_direct(&ring, m, &du)?)?);
        accumulate(&mut omega, 1.0, &wedge_star(&uv, &matrix_action_direct(&ring, m, &dv)?)?);
    }
    if let (Some(mt), Some(su), Some(sv)) = (&mu.m_tilde, su, sv) {
        accumulate(&mut omega, 1.0, &wedge_star(&matrix_action_direct(&ring, mt, &su)?, &vv)?);
        accumulate(&mut omega, -1.0, &wedge_star(&matrix_action_direct(&ring, mt, &sv)?, &uv)?);
    }
    Ok(omega)
}

/// `G_{S_{q,μ}}(v, u)` at one boundary node as a density against surface
/// measure:
/// `Σ_{j<q} (u_j ∧ ⋆v_{j+1} − v_j ∧ ⋆u_{j+1} + G_{Δ_{j,μ}}(v_j, u_j)) + G_{Δ_{q,μ}}(v_q, u_q)`,
/// the Lamé terms only at levels that carry one.
pub fn green_density_s(spec: &StokesSpec, v: &NodeData, u: &NodeData, normal: &[f64]) -> Result<f64> {
    let n = spec.n();
    let q = spec.q();
    if u.q() != q || v.q() != q || u.n() != n || v.n() != n || normal.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: normal.len() });
    }
    let mut omega = Form::from_coeffs(n, n - 1, vec![0.0; n])?;
    for j in 0..q {
        accumulate(&mut omega, 1.0, &wedge_star(&u.values(j), &v.values(j + 1))?);
        accumulate(&mut omega, -1.0, &wedge_star(&v.values(j), &u.values(j + 1))?);
    }
    for j in spec.j0()..=q {
        let mu = spec.pair(j).expect("levels j0..=q carry coefficients");
        accumulate(&mut omega, 1.0, &green_lame(mu, j, v, u)?);
    }
    Ok(surface_density(&omega, normal))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet_form(n: usize, degree: usize, f: impl Fn(usize, usize) -> f64, with_jets: bool) -> Form<Vec<f64>> {
        let k = MultiIndex::all(n, degree).len();
        let coeffs = (0..k).map(|c| (0..if with_jets { n + 1 } else { 1 }).map(|s| f(c, s)).collect()).collect();
        Form::from_coeffs(n, degree, coeffs).unwrap()
    }

    fn data(n: usize, seed: f64) -> NodeData {
        NodeData::new(vec![
            jet_form(n, 1, |c, s| (seed * (c + 1) as f64 + 0.3 * s as f64).sin(), true),
            jet_form(n, 0, |_, _| seed.cos(), false),
        ])
        .unwrap()
    }

    #[test]
    fn flux_of_a_one_form() {
        let v = Form::from_coeffs(3, 1, vec![1.0, 2.0, 3.0]).unwrap();
        let one = Form::from_coeffs(3, 0, vec![1.0]).unwrap();
        let nu = [0.6, 0.0, 0.8];
        assert!((surface_density(&wedge_star(&one, &v).unwrap(), &nu) - (0.6 + 2.4)).abs() < 1e-15);
        let v2 = Form::from_coeffs(2, 1, vec![1.0, 2.0]).unwrap();
        let one2 = Form::from_coeffs(2, 0, vec![1.0]).unwrap();
        assert!((surface_density(&wedge_star(&one2, &v2).unwrap(), &[0.0, 1.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn density_is_antisymmetric() {
        for n in [2, 3] {
            let spec = StokesSpec::scalar(n, 1, 1, 2.0, 3.0).unwrap();
            let (u, v) = (data(n, 0.4), data(n, 1.3));
            let nu: Vec<f64> = (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
            assert_eq!(green_density_s(&spec, &u, &u, &nu).unwrap(), 0.0);
            let a = green_density_s(&spec, &v, &u, &nu).unwrap();
            let b = green_density_s(&spec, &u, &v, &nu).unwrap();
            assert!((a + b).abs() < 1e-14, "{a} {b}");
            let zero = NodeData::new(vec![jet_form(n, 1, |_, _| 0.0, true), jet_form(n, 0, |_, _| 0.0, false)]).unwrap();
            assert_eq!(green_density_s(&spec, &zero, &u, &nu).unwrap(), 0.0);
        }
    }

    #[test]
    fn missing_derivatives_are_reported() {
        let spec = StokesSpec::identity(2, 1, 1).unwrap();
        let u = NodeData::new(vec![jet_form(2, 1, |_, _| 1.0, false), jet_form(2, 0, |_, _| 1.0, false)]).unwrap();
        assert!(matches!(green_density_s(&spec, &u, &data(2, 0.1), &[1.0, 0.0]), Err(Error::IncompleteTrace(_))));
        let d = DomainSpec::ball(vec![0.0, 0.0], 1.0, 4).unwrap();
        assert!(BoundaryTrace::new(&d, vec![u.clone(); 3]).is_err());
        assert!(BoundaryTrace::new(&d, vec![u; 4]).is_ok());
    }

    #[test]
    fn constant_pressure_against_a_velocity_field() {
        // u = (0, 1): only u_0 ∧ ⋆v_1 survives, the flux of v_1.
        let spec = StokesSpec::identity(3, 1, 1).unwrap();
        let u = NodeData::new(vec![jet_form(3, 1, |_, _| 0.0, true), jet_form(3, 0, |_, _| 1.0, false)]).unwrap();
        let v = data(3, 0.7);
        let nu = [0.0, 0.6, 0.8];
        let v1 = v.values(1);
        let flux = 0.6 * v1.coeffs()[1] + 0.8 * v1.coeffs()[2];
        assert!((green_density_s(&spec, &v, &u, &nu).unwrap() - flux).abs() < 1e-15);
    }
}
