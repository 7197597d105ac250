use super::matrix::MatrixCoefficient;
use super::multi_index::{binomial, MultiIndex};
use super::ring::{CoeffRing, DiffRing};
use crate::error::{Error, Result};

/// Degree-`q` differential form on `ℝⁿ`, stored densely: one coefficient
/// per multi-index, in lexicographic multi-index order.
#[derive(Clone, Debug, PartialEq)]
pub struct Form<E> {
    n: usize,
    degree: usize,
    coeffs: Vec<E>,
}

impl<E: Clone> Form<E> {
    /// Builds a form from coefficients in lexicographic order. Degree `n + 1`
    /// is accepted and denotes the trivial space (no coefficients).
    pub fn from_coeffs(n: usize, degree: usize, coeffs: Vec<E>) -> Result<Self> {
        if degree > n + 1 {
            return Err(Error::InvalidDegree { degree, n });
        }
        let k = binomial(n, degree);
        if coeffs.len() != k {
            return Err(Error::DimensionMismatch { expected: k, found: coeffs.len() });
        }
        Ok(Self { n, degree, coeffs })
    }

    pub fn zero<R: CoeffRing<Elem = E>>(ring: &R, degree: usize) -> Self {
        let n = ring.dim();
        Self { n, degree, coeffs: vec![ring.zero(); binomial(n, degree)] }
    }

    /// `c · dx_I`.
    pub fn basis<R: CoeffRing<Elem = E>>(ring: &R, index: &MultiIndex, c: E) -> Self {
        let mut f = Self::zero(ring, index.degree());
        f.coeffs[index.rank()] = c;
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [E] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<E> {
        self.coeffs
    }

    pub fn get(&self, index: &MultiIndex) -> &E {
        &self.coeffs[index.rank()]
    }

    /// Multi-indices paired with their coefficients, lexicographically.
    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, &E)> {
        MultiIndex::all(self.n, self.degree).into_iter().zip(self.coeffs.iter())
    }

    pub fn map<F, T>(&self, f: F) -> Form<T>
    where
        F: FnMut(&E) -> T,
    {
        Form { n: self.n, degree: self.degree, coeffs: self.coeffs.iter().map(f).collect() }
    }
}

fn check_same<E>(a: &Form<E>, b: &Form<E>) -> Result<()> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { expected: a.n, found: b.n });
    }
    if a.degree != b.degree {
        return Err(Error::DegreeMismatch { expected: a.degree, found: b.degree });
    }
    Ok(())
}

fn check_ring<R: CoeffRing>(ring: &R, u: &Form<R::Elem>) -> Result<()> {
    if ring.dim() != u.n {
        return Err(Error::DimensionMismatch { expected: ring.dim(), found: u.n });
    }
    Ok(())
}

pub fn add<R: CoeffRing>(ring: &R, a: &Form<R::Elem>, b: &Form<R::Elem>) -> Result<Form<R::Elem>> {
    check_same(a, b)?;
    let mut out = a.clone();
    for (o, x) in out.coeffs.iter_mut().zip(&b.coeffs) {
        ring.add_signed(o, x, 1);
    }
    Ok(out)
}

pub fn sub<R: CoeffRing>(ring: &R, a: &Form<R::Elem>, b: &Form<R::Elem>) -> Result<Form<R::Elem>> {
    check_same(a, b)?;
    let mut out = a.clone();
    for (o, x) in out.coeffs.iter_mut().zip(&b.coeffs) {
        ring.add_signed(o, x, -1);
    }
    Ok(out)
}

pub fn scale<R: CoeffRing>(ring: &R, c: f64, a: &Form<R::Elem>) -> Form<R::Elem> {
    a.map(|x| {
        let mut acc = ring.zero();
        ring.axpy(&mut acc, c, x);
        acc
    })
}

pub fn is_zero<R: CoeffRing>(ring: &R, a: &Form<R::Elem>) -> bool {
    a.coeffs.iter().all(|x| ring.is_zero(x))
}

/// Exterior product. When `p + q > n` the result is the zero form of
/// degree `n`.
pub fn wedge<R: CoeffRing>(ring: &R, u: &Form<R::Elem>, v: &Form<R::Elem>) -> Result<Form<R::Elem>> {
    check_ring(ring, u)?;
    check_ring(ring, v)?;
    let n = u.n;
    if u.degree + v.degree > n {
        return Ok(Form::zero(ring, n));
    }
    let mut out = Form::zero(ring, u.degree + v.degree);
    for (i, ui) in u.iter() {
        if ring.is_zero(ui) {
            continue;
        }
        for (j, vj) in v.iter() {
            if let Some((sign, k)) = i.wedge(&j) {
                let prod = ring.mul(ui, vj);
                ring.add_signed(&mut out.coeffs[k.rank()], &prod, sign);
            }
        }
    }
    Ok(out)
}

/// Hodge star for the Euclidean metric and orientation `dx_1 ∧ … ∧ dx_n`.
pub fn hodge_star<R: CoeffRing>(ring: &R, u: &Form<R::Elem>) -> Result<Form<R::Elem>> {
    check_ring(ring, u)?;
    if u.degree > u.n {
        return Err(Error::InvalidDegree { degree: u.degree, n: u.n });
    }
    let mut out = Form::zero(ring, u.n - u.degree);
    for (i, ui) in u.iter() {
        let (sign, c) = i.star();
        ring.add_signed(&mut out.coeffs[c.rank()], ui, sign);
    }
    Ok(out)
}

/// `d_q u = Σ_j Σ_I ∂_j u_I dx_j ∧ dx_I`. A top-degree input yields the
/// (coefficient-free) form of degree `n + 1`.
pub fn exterior_derivative<R: DiffRing>(ring: &R, u: &Form<R::Elem>) -> Result<Form<R::Elem>> {
    check_ring(ring, u)?;
    let n = u.n;
    if u.degree >= n {
        return Ok(Form::zero(ring, n + 1));
    }
    let mut out = Form::zero(ring, u.degree + 1);
    for (i, ui) in u.iter() {
        if ring.is_zero(ui) {
            continue;
        }
        for axis in 0..n {
            let dj = MultiIndex::new(n, vec![axis + 1]).expect("valid axis");
            if let Some((sign, k)) = dj.wedge(&i) {
                let p = ring.partial(ui, axis);
                ring.add_signed(&mut out.coeffs[k.rank()], &p, sign);
            }
        }
    }
    Ok(out)
}

/// `d*_q v = (−1)^{nq+1} ⋆ d_{n−q−1} ⋆ v` for a `(q+1)`-form `v`.
pub fn codifferential<R: DiffRing>(ring: &R, v: &Form<R::Elem>) -> Result<Form<R::Elem>> {
    check_ring(ring, v)?;
    if v.degree == 0 {
        return Err(Error::CodifferentialOfZeroForm);
    }
    if v.degree > v.n {
        return Err(Error::InvalidDegree { degree: v.degree, n: v.n });
    }
    let n = v.n;
    let q = v.degree - 1;
    let s = hodge_star(ring, v)?;
    let ds = exterior_derivative(ring, &s)?;
    let out = hodge_star(ring, &ds)?;
    if (n * q + 1) % 2 == 1 {
        Ok(out.map(|x| {
            let mut acc = ring.zero();
            ring.add_signed(&mut acc, x, -1);
            acc
        }))
    } else {
        Ok(out)
    }
}

/// `Δ_q = d*_q d_q + d_{q−1} d*_{q−1}`.
pub fn hodge_laplacian<R: DiffRing>(ring: &R, u: &Form<R::Elem>) -> Result<Form<R::Elem>> {
    check_ring(ring, u)?;
    let n = u.n;
    let mut out = Form::zero(ring, u.degree);
    if u.degree < n {
        let du = exterior_derivative(ring, u)?;
        out = add(ring, &out, &codifferential(ring, &du)?)?;
    }
    if u.degree >= 1 {
        let su = codifferential(ring, u)?;
        out = add(ring, &out, &exterior_derivative(ring, &su)?)?;
    }
    Ok(out)
}

/// Coefficient-wise scalar Laplacian `Σ_I (Σ_j ∂_j² u_I) dx_I`.
pub fn componentwise_laplacian<R: DiffRing>(ring: &R, u: &Form<R::Elem>) -> Form<R::Elem> {
    u.map(|c| {
        let mut acc = ring.zero();
        for axis in 0..u.n {
            let d1 = ring.partial(c, axis);
            ring.add_signed(&mut acc, &ring.partial(&d1, axis), 1);
        }
        acc
    })
}

fn check_matrix<E>(m: &MatrixCoefficient, u: &Form<E>) -> Result<()> {
    if m.n() != u.n {
        return Err(Error::DimensionMismatch { expected: m.n(), found: u.n });
    }
    if m.degree() != u.degree {
        return Err(Error::DegreeMismatch { expected: m.degree(), found: u.degree });
    }
    Ok(())
}

/// `M u = Σ_I ⋆(u ∧ ⋆M^{(I)}) dx_I`, with `M^{(I)}` the constant `q`-form
/// holding row `I` of the matrix.
pub fn matrix_action<R: CoeffRing>(ring: &R, m: &MatrixCoefficient, u: &Form<R::Elem>) -> Result<Form<R::Elem>> {
    check_ring(ring, u)?;
    check_matrix(m, u)?;
    let mut out = Form::zero(ring, u.degree);
    for (row, index) in MultiIndex::all(u.n, u.degree).iter().enumerate() {
        let m_i = m.row_form(ring, index);
        let top = wedge(ring, u, &hodge_star(ring, &m_i)?)?;
        let scalar = hodge_star(ring, &top)?;
        out.coeffs[row] = scalar.coeffs[0].clone();
    }
    Ok(out)
}

/// Lexicographic matrix–vector product on the coefficient vector.
pub fn matrix_action_direct<R: CoeffRing>(ring: &R, m: &MatrixCoefficient, u: &Form<R::Elem>) -> Result<Form<R::Elem>> {
    check_ring(ring, u)?;
    check_matrix(m, u)?;
    let k = u.coeffs.len();
    let mut out = Form::zero(ring, u.degree);
    for i in 0..k {
        for j in 0..k {
            ring.axpy(&mut out.coeffs[i], m.entry(i, j), &u.coeffs[j]);
        }
    }
    Ok(out)
}

/// Coefficient pair `μ_q = (M_q, M̃_q)`: `M_q` acts on `(q+1)`-forms and
/// `M̃_q` on `(q−1)`-forms. Either may be absent at the ends of the complex.
#[derive(Clone, Debug, PartialEq)]
pub struct LamePair {
    pub m: Option<MatrixCoefficient>,
    pub m_tilde: Option<MatrixCoefficient>,
}

impl LamePair {
    pub fn identity(n: usize, q: usize) -> Self {
        Self::scalar(n, q, 1.0, 1.0)
    }

    /// `(a I, ã I)`.
    pub fn scalar(n: usize, q: usize, a: f64, a_tilde: f64) -> Self {
        let m = (q < n).then(|| MatrixCoefficient::scalar(n, q + 1, a));
        let m_tilde = (q >= 1).then(|| MatrixCoefficient::scalar(n, q - 1, a_tilde));
        Self { m, m_tilde }
    }
}

/// `Δ_{q,μ} u = d*_q M_q d_q u + d_{q−1} M̃_q d*_{q−1} u`.
pub fn lame_laplacian<R: DiffRing>(ring: &R, mu: &LamePair, u: &Form<R::Elem>) -> Result<Form<R::Elem>> {
    check_ring(ring, u)?;
    let n = u.n;
    let q = u.degree;
    let mut out = Form::zero(ring, q);
    if q < n {
        let m = mu.m.as_ref().ok_or_else(|| Error::Parameter(format!("missing M_{q}")))?;
        let du = exterior_derivative(ring, u)?;
        let mdu = matrix_action_direct(ring, m, &du)?;
        out = add(ring, &out, &codifferential(ring, &mdu)?)?;
    }
    if q >= 1 {
        let mt = mu.m_tilde.as_ref().ok_or_else(|| Error::Parameter(format!("missing M̃_{q}")))?;
        let su = codifferential(ring, u)?;
        let msu = matrix_action_direct(ring, mt, &su)?;
        out = add(ring, &out, &exterior_derivative(ring, &msu)?)?;
    }
    Ok(out)
}
