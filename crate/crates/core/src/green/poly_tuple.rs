use super::trace::NodeData;
use crate::error::{Error, Result};
use crate::exterior::{codifferential, exterior_derivative, lame_laplacian, CoeffRing, Form, Poly, PolyRing};
use crate::stokes::StokesSpec;

/// A tuple `(u_q, …, u_0)` with exact polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyTuple {
    parts: Vec<Form<Poly>>,
}

impl PolyTuple {
    pub fn new(parts: Vec<Form<Poly>>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::Parameter("empty tuple".into()));
        };
        let q = parts.len() - 1;
        for (i, p) in parts.iter().enumerate() {
            if p.degree() != q - i || p.n() != first.n() {
                return Err(Error::DegreeMismatch { expected: q - i, found: p.degree() });
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

    pub fn parts(&self) -> &[Form<Poly>] {
        &self.parts
    }

    /// `S_{q,μ} u`, computed exactly.
    pub fn apply_stokes(&self, spec: &StokesSpec) -> Result<PolyTuple> {
        if spec.q() != self.q() || spec.n() != self.n() {
            return Err(Error::DegreeMismatch { expected: spec.q(), found: self.q() });
        }
        let ring = PolyRing { n: self.n() };
        let q = self.q();
        let rows = (0..=q)
            .map(|i| {
                let k = q - i;
                let mut out = Form::zero(&ring, k);
                let mut push = |f: Form<Poly>| {
                    for (a, b) in out.coeffs_mut().iter_mut().zip(f.coeffs()) {
                        ring.add_signed(a, b, 1);
                    }
                };
                if let Some(mu) = spec.pair(k) {
                    push(lame_laplacian(&ring, mu, &self.parts[i])?);
                }
                if i < q {
                    push(exterior_derivative(&ring, &self.parts[i + 1])?);
                }
                if i > 0 {
                    push(codifferential(&ring, &self.parts[i - 1])?);
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        PolyTuple::new(rows)
    }

    /// Values and first derivatives of every coefficient at `x`.
    pub fn node_data(&self, x: &[f64]) -> Result<NodeData> {
        let n = self.n();
        let parts = self
            .parts
            .iter()
            .map(|f| {
                f.map(|p| {
                    let mut jet = vec![p.eval_f64(x)];
                    jet.extend((0..n).map(|k| p.partial(k).eval_f64(x)));
                    jet
                })
            })
            .collect();
        NodeData::new(parts)
    }

    /// Pointwise inner product `Σ_j ⟨u_j, v_j⟩` at `x`.
    pub fn dot_at(&self, other: &PolyTuple, x: &[f64]) -> f64 {
        self.parts
            .iter()
            .zip(&other.parts)
            .flat_map(|(a, b)| a.coeffs().iter().zip(b.coeffs()))
            .map(|(p, r)| p.eval_f64(x) * r.eval_f64(x))
            .sum()
    }
}
