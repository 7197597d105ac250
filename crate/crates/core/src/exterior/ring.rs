//! Coefficient algebras a form can carry: exact polynomials, grid arrays,
//! or plain numbers at a single point.

/// Commutative algebra of form coefficients over the reals.
pub trait CoeffRing {
    type Elem: Clone;

    /// Ambient dimension `n`.
    fn dim(&self) -> usize;
    fn zero(&self) -> Self::Elem;
    fn constant(&self, c: f64) -> Self::Elem;
    /// `acc += sign · x` with `sign ∈ {−1, +1}`.
    fn add_signed(&self, acc: &mut Self::Elem, x: &Self::Elem, sign: i32);
    /// `acc += c · x`.
    fn axpy(&self, acc: &mut Self::Elem, c: f64, x: &Self::Elem);
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, x: &Self::Elem) -> bool;
}

/// Coefficient algebra with partial derivatives `∂/∂x_{axis+1}`.
pub trait DiffRing: CoeffRing {
    fn partial(&self, x: &Self::Elem, axis: usize) -> Self::Elem;
}

/// Real numbers at a single point of `ℝⁿ`.
#[derive(Clone, Copy, Debug)]
pub struct PointRing {
    pub n: usize,
}

impl CoeffRing for PointRing {
    type Elem = f64;

    fn dim(&self) -> usize {
        self.n
    }
    fn zero(&self) -> f64 {
        0.0
    }
    fn constant(&self, c: f64) -> f64 {
        c
    }
    fn add_signed(&self, acc: &mut f64, x: &f64, sign: i32) {
        *acc += sign as f64 * x;
    }
    fn axpy(&self, acc: &mut f64, c: f64, x: &f64) {
        *acc += c * x;
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn is_zero(&self, x: &f64) -> bool {
        *x == 0.0
    }
}

/// First-order jets `[v, ∂_1 v, …, ∂_n v]` at a single point. A partial
/// derivative keeps the value slot exact and marks the unknown second
/// derivatives as `NaN`, so only one derivative may be taken.
#[derive(Clone, Copy, Debug)]
pub struct JetRing {
    pub n: usize,
}

impl CoeffRing for JetRing {
    type Elem = Vec<f64>;

    fn dim(&self) -> usize {
        self.n
    }
    fn zero(&self) -> Vec<f64> {
        vec![0.0; self.n + 1]
    }
    fn constant(&self, c: f64) -> Vec<f64> {
        let mut v = self.zero();
        v[0] = c;
        v
    }
    fn add_signed(&self, acc: &mut Vec<f64>, x: &Vec<f64>, sign: i32) {
        for (a, b) in acc.iter_mut().zip(x) {
            *a += sign as f64 * b;
        }
    }
    fn axpy(&self, acc: &mut Vec<f64>, c: f64, x: &Vec<f64>) {
        for (a, b) in acc.iter_mut().zip(x) {
            *a += c * b;
        }
    }
    fn mul(&self, a: &Vec<f64>, b: &Vec<f64>) -> Vec<f64> {
        let mut out = vec![a[0] * b[0]];
        out.extend((1..=self.n).map(|j| a[0] * b[j] + a[j] * b[0]));
        out
    }
    fn is_zero(&self, x: &Vec<f64>) -> bool {
        x.iter().all(|&v| v == 0.0)
    }
}

impl DiffRing for JetRing {
    fn partial(&self, x: &Vec<f64>, axis: usize) -> Vec<f64> {
        let mut out = vec![f64::NAN; self.n + 1];
        out[0] = x[axis + 1];
        out
    }
}
