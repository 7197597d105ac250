use serde::{Deserialize, Serialize};

use super::kernel::{kernel_column, KernelColumn};
use super::poly_tuple::PolyTuple;
use super::trace::NodeData;
use crate::error::{Error, Result};
use crate::exterior::{rational_from_f64, Form, Poly};
use crate::stokes::StokesSpec;

/// Registered closed-form `S`-null tuples for `q = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    /// `u = (0, 1)`.
    ConstantPressure,
    /// A kernel column with its pole outside the domain.
    ExteriorPole,
    /// `u_1 = x_2² dx_1`, `u_0 = 2a x_1`.
    Manufactured,
}

impl std::str::FromStr for SolutionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant_pressure" => Ok(Self::ConstantPressure),
            "exterior_pole" => Ok(Self::ExteriorPole),
            "manufactured" => Ok(Self::Manufactured),
            other => Err(Error::Config(format!("unknown solution.kind '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
enum Source {
    Poly(PolyTuple),
    Pole(KernelColumn),
}

#[derive(Clone, Debug)]
pub struct AnalyticSolution {
    kind: SolutionKind,
    source: Source,
}

fn poly_tuple(n: usize, one: Vec<Poly>, zero: Poly) -> Result<PolyTuple> {
    PolyTuple::new(vec![Form::from_coeffs(n, 1, one)?, Form::from_coeffs(n, 0, vec![zero])?])
}

impl AnalyticSolution {
    pub fn constant_pressure(spec: &StokesSpec) -> Result<Self> {
        let n = spec.n();
        let tuple = poly_tuple(n, vec![Poly::zero(); n], Poly::int(n, 1))?;
        Ok(Self { kind: SolutionKind::ConstantPressure, source: Source::Poly(tuple) })
    }

    pub fn manufactured(spec: &StokesSpec) -> Result<Self> {
        let n = spec.n();
        let (a, _) = spec
            .scalars(1)
            .ok_or_else(|| Error::Unsupported("manufactured solution needs scalar level-1 coefficients".into()))?;
        let mut one = vec![Poly::zero(); n];
        one[0] = Poly::var(n, 1).mul(&Poly::var(n, 1));
        let zero = Poly::var(n, 0).scale(&rational_from_f64(2.0 * a));
        Ok(Self { kind: SolutionKind::Manufactured, source: Source::Poly(poly_tuple(n, one, zero)?) })
    }

    /// Column `row` of the fundamental solution with pole `z`.
    pub fn exterior_pole(spec: &StokesSpec, z: &[f64], row: usize) -> Result<Self> {
        Ok(Self { kind: SolutionKind::ExteriorPole, source: Source::Pole(kernel_column(spec, z, row)?) })
    }

    pub fn kind(&self) -> SolutionKind {
        self.kind
    }

    pub fn poly(&self) -> Option<&PolyTuple> {
        match &self.source {
            Source::Poly(p) => Some(p),
            Source::Pole(_) => None,
        }
    }

    pub fn node_data(&self, x: &[f64]) -> Result<NodeData> {
        match &self.source {
            Source::Poly(p) => p.node_data(x),
            Source::Pole(c) => c.eval(x),
        }
    }

    /// Flattened values `(u_1 coefficients…, u_0)` at `x`.
    pub fn values(&self, x: &[f64]) -> Result<Vec<f64>> {
        let data = self.node_data(x)?;
        Ok(data.parts().iter().flat_map(|p| p.coeffs().iter().map(|c| c[0])).collect())
    }
}
