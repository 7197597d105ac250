use std::fmt;

use super::expr::Expr;
use super::rewrite::Rewriter;
use crate::error::{Error, Result};

/// Block operator matrix. Entry `(i, j)` maps `col_deg[j]`-forms to
/// `row_deg[i]`-forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMatrix {
    row_deg: Vec<usize>,
    col_deg: Vec<usize>,
    entries: Vec<Vec<Expr>>,
}

impl BlockMatrix {
    pub fn zero(row_deg: Vec<usize>, col_deg: Vec<usize>) -> Self {
        let entries = row_deg.iter().map(|&r| col_deg.iter().map(|&c| Expr::zero(c, r)).collect()).collect();
        Self { row_deg, col_deg, entries }
    }

    pub fn identity(deg: Vec<usize>) -> Self {
        let mut m = Self::zero(deg.clone(), deg.clone());
        for (i, &d) in deg.iter().enumerate() {
            m.entries[i][i] = Expr::identity(d);
        }
        m
    }

    /// Builds a matrix from entries, checking every block against the
    /// declared degrees.
    pub fn from_entries(row_deg: Vec<usize>, col_deg: Vec<usize>, entries: Vec<Vec<Expr>>) -> Result<Self> {
        if entries.len() != row_deg.len() {
            return Err(Error::IllTyped(format!("{} rows for {} row degrees", entries.len(), row_deg.len())));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != col_deg.len() {
                return Err(Error::IllTyped(format!("row {i} has {} entries, expected {}", row.len(), col_deg.len())));
            }
            for (j, e) in row.iter().enumerate() {
                if e.source() != col_deg[j] || e.target() != row_deg[i] {
                    return Err(Error::IllTyped(format!(
                        "block ({i},{j}) maps {}→{}, expected {}→{}",
                        e.source(),
                        e.target(),
                        col_deg[j],
                        row_deg[i]
                    )));
                }
            }
        }
        Ok(Self { row_deg, col_deg, entries })
    }

    pub fn rows(&self) -> usize {
        self.row_deg.len()
    }

    pub fn cols(&self) -> usize {
        self.col_deg.len()
    }

    pub fn row_degrees(&self) -> &[usize] {
        &self.row_deg
    }

    pub fn col_degrees(&self) -> &[usize] {
        &self.col_deg
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: Expr) -> Result<()> {
        if e.source() != self.col_deg[j] || e.target() != self.row_deg[i] {
            return Err(Error::IllTyped(format!(
                "block ({i},{j}) needs {}→{}, got {}→{}",
                self.col_deg[j],
                self.row_deg[i],
                e.source(),
                e.target()
            )));
        }
        self.entries[i][j] = e;
        Ok(())
    }

    fn check_same_shape(&self, other: &BlockMatrix) -> Result<()> {
        if self.row_deg != other.row_deg || self.col_deg != other.col_deg {
            return Err(Error::IllTyped("block signatures differ".into()));
        }
        Ok(())
    }

    fn zip(&self, other: &BlockMatrix, f: impl Fn(&Expr, &Expr) -> Result<Expr>) -> Result<BlockMatrix> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.entries[i][j] = f(&self.entries[i][j], &other.entries[i][j])?;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &BlockMatrix) -> Result<BlockMatrix> {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &BlockMatrix) -> Result<BlockMatrix> {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Result<Expr>) -> Result<BlockMatrix> {
        let mut out = self.clone();
        for row in out.entries.iter_mut() {
            for e in row.iter_mut() {
                *e = f(e)?;
            }
        }
        Ok(out)
    }

    /// `self · other`; `other` acts first.
    pub fn mul(&self, other: &BlockMatrix) -> Result<BlockMatrix> {
        if self.col_deg != other.row_deg {
            return Err(Error::IllTyped(format!(
                "cannot multiply: columns {:?} against rows {:?}",
                self.col_deg, other.row_deg
            )));
        }
        let mut out = BlockMatrix::zero(self.row_deg.clone(), other.col_deg.clone());
        for i in 0..self.rows() {
            for j in 0..other.cols() {
                let mut acc = Expr::zero(other.col_deg[j], self.row_deg[i]);
                for k in 0..self.cols() {
                    let (a, b) = (&self.entries[i][k], &other.entries[k][j]);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.compose(b)?)?;
                }
                out.entries[i][j] = acc;
            }
        }
        Ok(out)
    }

    /// Transposed blockwise adjoint.
    pub fn adjoint(&self) -> BlockMatrix {
        let entries = (0..self.cols()).map(|j| (0..self.rows()).map(|i| self.entries[i][j].adjoint()).collect()).collect();
        BlockMatrix { row_deg: self.col_deg.clone(), col_deg: self.row_deg.clone(), entries }
    }

    pub fn normalize(&self, r: &Rewriter) -> Result<BlockMatrix> {
        self.map(|e| r.normalize(e))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Expr::is_zero)
    }

    /// Blocks that are not zero, as `(i, j, expr)`.
    pub fn nonzero_blocks(&self) -> Vec<(usize, usize, &Expr)> {
        let mut out = Vec::new();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if !e.is_zero() {
                    out.push((i, j, e));
                }
            }
        }
        out
    }
}

impl fmt::Display for BlockMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, e) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
