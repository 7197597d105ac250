use std::fmt::Write as _;

use super::form::{self, Form, LamePair};
use super::matrix::MatrixCoefficient;
use super::multi_index::{binomial, MultiIndex};
use super::ring::{CoeffRing, DiffRing};
use crate::error::{Error, Result};

/// Uniform node grid: node `i` along axis `k` sits at `origin[k] + i·spacing[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    origin: Vec<f64>,
    spacing: Vec<f64>,
    dims: Vec<usize>,
}

impl GridSpec {
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, dims: Vec<usize>) -> Result<Self> {
        let n = dims.len();
        if origin.len() != n || spacing.len() != n || n == 0 {
            return Err(Error::GridMismatch("origin/spacing/dims lengths differ".into()));
        }
        if spacing.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::GridMismatch("spacing must be positive".into()));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::GridMismatch("empty axis".into()));
        }
        Ok(Self { origin, spacing, dims })
    }

    /// `count^n` nodes covering `[-half_width, half_width]^n` inclusive.
    pub fn cube(n: usize, count: usize, half_width: f64) -> Self {
        let h = 2.0 * half_width / (count - 1) as f64;
        Self { origin: vec![-half_width; n], spacing: vec![h; n], dims: vec![count; n] }
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(0.0, f64::max)
    }

    /// Row-major strides (last axis fastest).
    pub fn strides(&self) -> Vec<usize> {
        let n = self.n();
        let mut s = vec![1; n];
        for k in (0..n.saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.dims[k + 1];
        }
        s
    }

    pub fn multi(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n()];
        for k in (0..self.n()).rev() {
            idx[k] = flat % self.dims[k];
            flat /= self.dims[k];
        }
        idx
    }

    pub fn coords(&self, flat: usize) -> Vec<f64> {
        self.multi(flat)
            .iter()
            .enumerate()
            .map(|(k, &i)| self.origin[k] + i as f64 * self.spacing[k])
            .collect()
    }

    /// Distance, in nodes, from node `flat` to the nearest grid face.
    pub fn depth(&self, flat: usize) -> usize {
        self.multi(flat)
            .iter()
            .zip(&self.dims)
            .map(|(&i, &d)| i.min(d - 1 - i))
            .min()
            .unwrap_or(0)
    }

    pub fn sample<F: Fn(&[f64]) -> f64>(&self, f: F) -> Vec<f64> {
        (0..self.len()).map(|i| f(&self.coords(i))).collect()
    }
}

/// Real arrays over the nodes of a grid. Partial derivatives are 2nd-order
/// central differences with zero extension beyond the grid.
#[derive(Clone, Debug)]
pub struct GridRing {
    pub grid: GridSpec,
}

impl CoeffRing for GridRing {
    type Elem = Vec<f64>;

    fn dim(&self) -> usize {
        self.grid.n()
    }
    fn zero(&self) -> Vec<f64> {
        vec![0.0; self.grid.len()]
    }
    fn constant(&self, c: f64) -> Vec<f64> {
        vec![c; self.grid.len()]
    }
    fn add_signed(&self, acc: &mut Vec<f64>, x: &Vec<f64>, sign: i32) {
        let s = sign as f64;
        for (a, b) in acc.iter_mut().zip(x) {
            *a += s * b;
        }
    }
    fn axpy(&self, acc: &mut Vec<f64>, c: f64, x: &Vec<f64>) {
        for (a, b) in acc.iter_mut().zip(x) {
            *a += c * b;
        }
    }
    fn mul(&self, a: &Vec<f64>, b: &Vec<f64>) -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x * y).collect()
    }
    fn is_zero(&self, x: &Vec<f64>) -> bool {
        x.iter().all(|&v| v == 0.0)
    }
}

impl DiffRing for GridRing {
    fn partial(&self, x: &Vec<f64>, axis: usize) -> Vec<f64> {
        let stride = self.grid.strides()[axis];
        let dim = self.grid.dims[axis];
        let inv = 0.5 / self.grid.spacing[axis];
        let mut out = vec![0.0; x.len()];
        for (flat, o) in out.iter_mut().enumerate() {
            let i = (flat / stride) % dim;
            let plus = if i + 1 < dim { x[flat + stride] } else { 0.0 };
            let minus = if i > 0 { x[flat - stride] } else { 0.0 };
            *o = (plus - minus) * inv;
        }
        out
    }
}

/// A differential form sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridForm {
    grid: GridSpec,
    form: Form<Vec<f64>>,
}

impl GridForm {
    pub fn new(grid: GridSpec, form: Form<Vec<f64>>) -> Result<Self> {
        if form.n() != grid.n() {
            return Err(Error::DimensionMismatch { expected: grid.n(), found: form.n() });
        }
        if form.coeffs().iter().any(|c| c.len() != grid.len()) {
            return Err(Error::GridMismatch("component length differs from node count".into()));
        }
        Ok(Self { grid, form })
    }

    pub fn zero(grid: &GridSpec, degree: usize) -> Self {
        let ring = GridRing { grid: grid.clone() };
        Self { grid: grid.clone(), form: Form::zero(&ring, degree) }
    }

    /// Samples `f(I, x)` for every multi-index `I` of the given degree.
    pub fn sample<F: Fn(&MultiIndex, &[f64]) -> f64>(grid: &GridSpec, degree: usize, f: F) -> Self {
        let coeffs = MultiIndex::all(grid.n(), degree)
            .iter()
            .map(|mi| grid.sample(|x| f(mi, x)))
            .collect();
        let form = Form::from_coeffs(grid.n(), degree, coeffs).expect("k_q components");
        Self { grid: grid.clone(), form }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn form(&self) -> &Form<Vec<f64>> {
        &self.form
    }

    pub fn into_form(self) -> Form<Vec<f64>> {
        self.form
    }

    pub fn degree(&self) -> usize {
        self.form.degree()
    }

    pub fn ring(&self) -> GridRing {
        GridRing { grid: self.grid.clone() }
    }

    fn wrap(&self, form: Form<Vec<f64>>) -> GridForm {
        GridForm { grid: self.grid.clone(), form }
    }

    fn same_grid(&self, other: &GridForm) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("forms live on different grids".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &GridForm) -> Result<GridForm> {
        self.same_grid(other)?;
        Ok(self.wrap(form::add(&self.ring(), &self.form, &other.form)?))
    }

    pub fn sub(&self, other: &GridForm) -> Result<GridForm> {
        self.same_grid(other)?;
        Ok(self.wrap(form::sub(&self.ring(), &self.form, &other.form)?))
    }

    pub fn scale(&self, c: f64) -> GridForm {
        self.wrap(self.form.map(|v| v.iter().map(|x| c * x).collect()))
    }

    pub fn d(&self) -> Result<GridForm> {
        Ok(self.wrap(form::exterior_derivative(&self.ring(), &self.form)?))
    }

    pub fn codiff(&self) -> Result<GridForm> {
        Ok(self.wrap(form::codifferential(&self.ring(), &self.form)?))
    }

    pub fn star(&self) -> Result<GridForm> {
        Ok(self.wrap(form::hodge_star(&self.ring(), &self.form)?))
    }

    pub fn hodge_laplacian(&self) -> Result<GridForm> {
        Ok(self.wrap(form::hodge_laplacian(&self.ring(), &self.form)?))
    }

    /// `−Σ_k (u(x+h_k) − 2u(x) + u(x−h_k))/h_k²` on every component, with
    /// zero extension. Same operator as `hodge_laplacian` to second order
    /// but on the compact `2n+1` point stencil.
    pub fn compact_laplacian(&self) -> GridForm {
        let strides = self.grid.strides();
        let grid = &self.grid;
        self.map_components(|x| {
            let mut out = vec![0.0; x.len()];
            for (axis, &stride) in strides.iter().enumerate() {
                let dim = grid.dims[axis];
                let inv = 1.0 / (grid.spacing[axis] * grid.spacing[axis]);
                for (flat, o) in out.iter_mut().enumerate() {
                    let i = (flat / stride) % dim;
                    let plus = if i + 1 < dim { x[flat + stride] } else { 0.0 };
                    let minus = if i > 0 { x[flat - stride] } else { 0.0 };
                    *o -= (plus - 2.0 * x[flat] + minus) * inv;
                }
            }
            out
        })
    }

    pub fn lame_laplacian(&self, mu: &LamePair) -> Result<GridForm> {
        Ok(self.wrap(form::lame_laplacian(&self.ring(), mu, &self.form)?))
    }

    pub fn matrix_action(&self, m: &MatrixCoefficient) -> Result<GridForm> {
        Ok(self.wrap(form::matrix_action_direct(&self.ring(), m, &self.form)?))
    }

    /// Applies `f` to every component array.
    pub fn map_components<F: FnMut(&[f64]) -> Vec<f64>>(&self, mut f: F) -> GridForm {
        self.wrap(self.form.map(|c| f(c)))
    }

    /// Discrete `L²` pairing `Σ_I Σ_nodes u_I v_I · hⁿ`.
    pub fn pairing(&self, other: &GridForm) -> Result<f64> {
        self.same_grid(other)?;
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch { expected: self.degree(), found: other.degree() });
        }
        let s: f64 = self
            .form
            .coeffs()
            .iter()
            .zip(other.form.coeffs())
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>())
            .sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn l2_norm(&self) -> f64 {
        self.pairing(self).unwrap_or(0.0).sqrt()
    }

    pub fn max_norm(&self) -> f64 {
        self.max_norm_interior(0)
    }

    /// Max-norm over nodes at depth `≥ margin` from the grid faces.
    pub fn max_norm_interior(&self, margin: usize) -> f64 {
        let mut m: f64 = 0.0;
        for c in self.form.coeffs() {
            for (flat, v) in c.iter().enumerate() {
                if margin == 0 || self.grid.depth(flat) >= margin {
                    m = m.max(v.abs());
                }
            }
        }
        m
    }

    /// True when every component vanishes on the outer `margin` node layers.
    pub fn vanishes_on_margin(&self, margin: usize) -> bool {
        self.form.coeffs().iter().all(|c| {
            c.iter().enumerate().all(|(flat, &v)| v == 0.0 || self.grid.depth(flat) >= margin)
        })
    }

    pub fn require_support(&self, margin: usize) -> Result<()> {
        if self.vanishes_on_margin(margin) {
            Ok(())
        } else {
            Err(Error::SupportViolation { margin })
        }
    }

    /// Serializes to the `DRFORM 1` text format.
    pub fn to_drform(&self) -> String {
        let join_f = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        let dims: Vec<String> = self.grid.dims.iter().map(|d| d.to_string()).collect();
        let mut s = format!(
            "DRFORM 1 n={} q={} dims={} h={} origin={}\n",
            self.grid.n(),
            self.degree(),
            dims.join(","),
            join_f(&self.grid.spacing),
            join_f(&self.grid.origin)
        );
        for (mi, vals) in self.form.iter() {
            let idx: Vec<String> = mi.indices().iter().map(|i| i.to_string()).collect();
            let _ = writeln!(s, "I={}", idx.join(","));
            let line: Vec<String> = vals.iter().map(|x| format!("{x}")).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    /// Parses the `DRFORM 1` text format.
    pub fn from_drform(text: &str) -> Result<GridForm> {
        let bad = |m: &str| Error::Format(m.to_string());
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty input"))?;
        let mut tok = header.split_whitespace();
        if tok.next() != Some("DRFORM") || tok.next() != Some("1") {
            return Err(bad("missing 'DRFORM 1' header"));
        }
        let (mut n, mut q, mut dims, mut h, mut origin) = (None, None, None, None, None);
        for t in tok {
            let (k, v) = t.split_once('=').ok_or_else(|| bad("malformed header field"))?;
            match k {
                "n" => n = Some(v.parse::<usize>().map_err(|_| bad("bad n"))?),
                "q" => q = Some(v.parse::<usize>().map_err(|_| bad("bad q"))?),
                "dims" => dims = Some(parse_list::<usize>(v).ok_or_else(|| bad("bad dims"))?),
                "h" => h = Some(parse_list::<f64>(v).ok_or_else(|| bad("bad h"))?),
                "origin" => origin = Some(parse_list::<f64>(v).ok_or_else(|| bad("bad origin"))?),
                _ => return Err(bad(&format!("unknown header field '{k}'"))),
            }
        }
        let n = n.ok_or_else(|| bad("missing n"))?;
        let q = q.ok_or_else(|| bad("missing q"))?;
        let grid = GridSpec::new(
            origin.ok_or_else(|| bad("missing origin"))?,
            h.ok_or_else(|| bad("missing h"))?,
            dims.ok_or_else(|| bad("missing dims"))?,
        )?;
        if grid.n() != n || q > n {
            return Err(bad("header n/q inconsistent with grid"));
        }
        let expected = MultiIndex::all(n, q);
        let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(binomial(n, q));
        let mut current: Option<Vec<f64>> = None;
        for line in lines {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix("I=") {
                if let Some(c) = current.take() {
                    coeffs.push(c);
                }
                let idx = if rest.is_empty() { Vec::new() } else { parse_list::<usize>(rest).ok_or_else(|| bad("bad multi-index"))? };
                let k = coeffs.len();
                if k >= expected.len() || expected[k].indices() != idx.as_slice() {
                    return Err(bad("multi-indices out of lexicographic order"));
                }
                current = Some(Vec::with_capacity(grid.len()));
            } else {
                let c = current.as_mut().ok_or_else(|| bad("values before first I= line"))?;
                for t in line.split_whitespace() {
                    c.push(t.parse::<f64>().map_err(|_| bad("bad value"))?);
                }
            }
        }
        if let Some(c) = current.take() {
            coeffs.push(c);
        }
        if coeffs.len() != expected.len() {
            return Err(bad("wrong number of components"));
        }
        if coeffs.iter().any(|c| c.len() != grid.len()) {
            return Err(bad("wrong number of values in a component"));
        }
        let form = Form::from_coeffs(n, q, coeffs)?;
        GridForm::new(grid, form)
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Option<Vec<T>> {
    s.split(',').map(|t| t.trim().parse::<T>().ok()).collect()
}
