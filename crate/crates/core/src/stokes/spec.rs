use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{GridForm, GridSpec, LamePair, MatrixCoefficient};
use crate::kernels::BumpForm;

/// Coefficients of one Lamé level `Δ_{j,μ} = d* M_j d + d M̃_j d*`, as
/// row-major matrices on `(j+1)`- and `(j−1)`-forms. Absent at the ends of
/// the complex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelCoefficients {
    pub level: usize,
    pub m: Option<Vec<f64>>,
    pub m_tilde: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct RawSpec {
    n: usize,
    q: usize,
    j0: usize,
    levels: Vec<LevelCoefficients>,
}

/// Shape and constant coefficients of `S_{q,μ}`: Lamé diagonals at levels
/// `j0 ≤ j ≤ q`, zero diagonals below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct StokesSpec {
    n: usize,
    q: usize,
    j0: usize,
    pairs: Vec<LamePair>,
}

impl TryFrom<RawSpec> for StokesSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let RawSpec { n, q, j0, levels } = raw;
        if levels.iter().enumerate().any(|(i, l)| l.level != j0 + i) {
            return Err(Error::Parameter("levels must run from j0 to q in order".into()));
        }
        let pairs = levels
            .into_iter()
            .map(|l| {
                let m = l.m.map(|e| MatrixCoefficient::new(n, l.level + 1, e)).transpose()?;
                let m_tilde = match l.m_tilde {
                    Some(e) if l.level >= 1 => Some(MatrixCoefficient::new(n, l.level - 1, e)?),
                    Some(_) => return Err(Error::Parameter("M̃_0 does not exist".into())),
                    None => None,
                };
                Ok(LamePair { m, m_tilde })
            })
            .collect::<Result<Vec<_>>>()?;
        StokesSpec::new(n, q, j0, pairs)
    }
}

impl From<StokesSpec> for RawSpec {
    fn from(s: StokesSpec) -> Self {
        let levels = s
            .pairs
            .iter()
            .enumerate()
            .map(|(i, p)| LevelCoefficients {
                level: s.j0 + i,
                m: p.m.as_ref().map(|m| m.entries().to_vec()),
                m_tilde: p.m_tilde.as_ref().map(|m| m.entries().to_vec()),
            })
            .collect();
        RawSpec { n: s.n, q: s.q, j0: s.j0, levels }
    }
}

impl StokesSpec {
    /// `pairs[i]` holds `(M_j, M̃_j)` for `j = j0 + i`. Each present matrix
    /// must be positive definite and each required one present.
    pub fn new(n: usize, q: usize, j0: usize, pairs: Vec<LamePair>) -> Result<Self> {
        if q == 0 || q > n {
            return Err(Error::InvalidDegree { degree: q, n });
        }
        if j0 == 0 || j0 > q {
            return Err(Error::Parameter(format!("j0 = {j0} must satisfy 1 ≤ j0 ≤ q = {q}")));
        }
        if pairs.len() != q - j0 + 1 {
            return Err(Error::Parameter(format!("{} coefficient pairs for levels {j0}..={q}", pairs.len())));
        }
        for (i, p) in pairs.iter().enumerate() {
            let j = j0 + i;
            let checks = [(j < n, &p.m, j + 1, "M"), (j >= 1, &p.m_tilde, j.wrapping_sub(1), "M̃")];
            for (needed, m, deg, name) in checks {
                match (needed, m) {
                    (true, None) => return Err(Error::Parameter(format!("missing {name}_{j}"))),
                    (false, Some(_)) => return Err(Error::Parameter(format!("{name}_{j} does not exist for n = {n}"))),
                    (true, Some(m)) => {
                        if m.n() != n || m.degree() != deg {
                            return Err(Error::Parameter(format!("{name}_{j} must act on {deg}-forms in dimension {n}")));
                        }
                        if !m.is_positive() {
                            return Err(Error::Parameter(format!(
                                "{name}_{j} is not positive definite (smallest eigenvalue {})",
                                m.min_eigenvalue()
                            )));
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        Ok(Self { n, q, j0, pairs })
    }

    /// All matrices equal to the identity.
    pub fn identity(n: usize, q: usize, j0: usize) -> Result<Self> {
        Self::scalar(n, q, j0, 1.0, 1.0)
    }

    /// `M_j = a I`, `M̃_j = ã I` at every level.
    pub fn scalar(n: usize, q: usize, j0: usize, a: f64, a_tilde: f64) -> Result<Self> {
        if q == 0 || q > n {
            return Err(Error::InvalidDegree { degree: q, n });
        }
        let pairs = (j0..=q).map(|j| LamePair::scalar(n, j, a, a_tilde)).collect();
        Self::new(n, q, j0, pairs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn j0(&self) -> usize {
        self.j0
    }

    /// `(M_j, M̃_j)`, or `None` below `j0`.
    pub fn pair(&self, level: usize) -> Option<&LamePair> {
        (level >= self.j0 && level <= self.q).then(|| &self.pairs[level - self.j0])
    }

    /// `(a, ã)` when level `j` carries scalar multiples of the identity;
    /// a missing matrix counts as `1`.
    pub fn scalars(&self, level: usize) -> Option<(f64, f64)> {
        let p = self.pair(level)?;
        let a = p.m.as_ref().map_or(Some(1.0), MatrixCoefficient::as_scalar)?;
        let at = p.m_tilde.as_ref().map_or(Some(1.0), MatrixCoefficient::as_scalar)?;
        Some((a, at))
    }

    /// Degrees `q, q−1, …, 0` of the tuple components.
    pub fn degrees(&self) -> Vec<usize> {
        (0..=self.q).rev().collect()
    }
}

/// `(u_q, u_{q−1}, …, u_0)` on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FormTuple {
    parts: Vec<GridForm>,
}

impl FormTuple {
    pub fn new(parts: Vec<GridForm>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::Parameter("empty form tuple".into()));
        };
        let q = parts.len() - 1;
        for (i, p) in parts.iter().enumerate() {
            if p.degree() != q - i {
                return Err(Error::DegreeMismatch { expected: q - i, found: p.degree() });
            }
            if p.grid() != first.grid() {
                return Err(Error::GridMismatch(format!("component {i} uses a different grid")));
            }
        }
        Ok(Self { parts })
    }

    pub fn zero(grid: &GridSpec, q: usize) -> Self {
        Self { parts: (0..=q).rev().map(|k| GridForm::zero(grid, k)).collect() }
    }

    pub fn q(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn grid(&self) -> &GridSpec {
        self.parts[0].grid()
    }

    pub fn parts(&self) -> &[GridForm] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<GridForm> {
        self.parts
    }

    fn zip_with(&self, other: &FormTuple, f: impl Fn(&GridForm, &GridForm) -> Result<GridForm>) -> Result<FormTuple> {
        if self.q() != other.q() {
            return Err(Error::DegreeMismatch { expected: self.q(), found: other.q() });
        }
        FormTuple::new(self.parts.iter().zip(&other.parts).map(|(a, b)| f(a, b)).collect::<Result<_>>()?)
    }

    pub fn add(&self, other: &FormTuple) -> Result<FormTuple> {
        self.zip_with(other, GridForm::add)
    }

    pub fn sub(&self, other: &FormTuple) -> Result<FormTuple> {
        self.zip_with(other, GridForm::sub)
    }

    pub fn scale(&self, c: f64) -> FormTuple {
        Self { parts: self.parts.iter().map(|p| p.scale(c)).collect() }
    }

    /// `Σ_i (u_i, v_i)_h`.
    pub fn pairing(&self, other: &FormTuple) -> Result<f64> {
        if self.q() != other.q() {
            return Err(Error::DegreeMismatch { expected: self.q(), found: other.q() });
        }
        self.parts.iter().zip(&other.parts).map(|(a, b)| a.pairing(b)).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.parts.iter().map(|p| p.l2_norm().powi(2)).sum::<f64>().sqrt()
    }

    pub fn max_norm(&self) -> f64 {
        self.parts.iter().map(GridForm::max_norm).fold(0.0, f64::max)
    }

    pub fn max_norm_interior(&self, margin: usize) -> f64 {
        self.parts.iter().map(|p| p.max_norm_interior(margin)).fold(0.0, f64::max)
    }

    pub fn require_support(&self, margin: usize) -> Result<()> {
        self.parts.iter().try_for_each(|p| p.require_support(margin))
    }
}

/// A tuple of bump forms that can be resampled on any grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpTuple {
    pub parts: Vec<BumpForm>,
}

impl BumpTuple {
    pub fn new(parts: Vec<BumpForm>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::Parameter("empty bump tuple".into()));
        };
        let q = parts.len() - 1;
        for (i, p) in parts.iter().enumerate() {
            if p.degree != q - i {
                return Err(Error::DegreeMismatch { expected: q - i, found: p.degree });
            }
            if p.n != first.n {
                return Err(Error::DimensionMismatch { expected: first.n, found: p.n });
            }
        }
        Ok(Self { parts })
    }

    pub fn zero(n: usize, q: usize) -> Self {
        Self { parts: (0..=q).rev().map(|k| BumpForm::zero(n, k)).collect() }
    }

    pub fn q(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<FormTuple> {
        FormTuple::new(self.parts.iter().map(|p| p.sample(grid)).collect::<Result<_>>()?)
    }
}
