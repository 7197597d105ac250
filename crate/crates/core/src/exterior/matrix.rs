use nalgebra::DMatrix;

use super::form::Form;
use super::multi_index::{binomial, MultiIndex};
use super::ring::CoeffRing;
use crate::error::{Error, Result};

/// Constant symmetric `k_q × k_q` matrix acting on `q`-forms, rows and
/// columns in lexicographic multi-index order.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixCoefficient {
    n: usize,
    degree: usize,
    entries: Vec<f64>,
}

impl MatrixCoefficient {
    /// Row-major entries; rejects non-square or asymmetric input.
    pub fn new(n: usize, degree: usize, entries: Vec<f64>) -> Result<Self> {
        if degree > n {
            return Err(Error::InvalidDegree { degree, n });
        }
        let k = binomial(n, degree);
        if entries.len() != k * k {
            return Err(Error::DimensionMismatch { expected: k * k, found: entries.len() });
        }
        for i in 0..k {
            for j in 0..i {
                if entries[i * k + j] != entries[j * k + i] {
                    return Err(Error::Parameter(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { n, degree, entries })
    }

    pub fn identity(n: usize, degree: usize) -> Self {
        Self::scalar(n, degree, 1.0)
    }

    pub fn scalar(n: usize, degree: usize, c: f64) -> Self {
        let k = binomial(n, degree);
        let mut entries = vec![0.0; k * k];
        for i in 0..k {
            entries[i * k + i] = c;
        }
        Self { n, degree, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn size(&self) -> usize {
        binomial(self.n, self.degree)
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `Some(c)` when the matrix is `c I`.
    pub fn as_scalar(&self) -> Option<f64> {
        let k = self.size();
        let c = if k == 0 { 1.0 } else { self.entries[0] };
        let ok = (0..k).all(|i| (0..k).all(|j| self.entry(i, j) == if i == j { c } else { 0.0 }));
        ok.then_some(c)
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size() + j]
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        let k = self.size();
        if k == 0 {
            return f64::INFINITY;
        }
        let m = DMatrix::from_row_slice(k, k, &self.entries);
        m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_positive(&self) -> bool {
        self.min_eigenvalue() > 0.0
    }

    /// The constant `q`-form `M^{(I)}` with `M^{(I)}_J = M_{IJ}`.
    pub fn row_form<R: CoeffRing>(&self, ring: &R, index: &MultiIndex) -> Form<R::Elem> {
        let i = index.rank();
        let coeffs = (0..self.size()).map(|j| ring.constant(self.entry(i, j))).collect();
        Form::from_coeffs(self.n, self.degree, coeffs).expect("row has k_q entries")
    }
}
