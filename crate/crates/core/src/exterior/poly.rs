use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ring::{CoeffRing, DiffRing};

/// Multivariate polynomial with exact rational coefficients. Keys are
/// exponent vectors of length `n`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Vec<u32>, BigRational>,
}

/// Exact rational from an `f64` (every finite double is a dyadic rational).
pub fn rational_from_f64(c: f64) -> BigRational {
    BigRational::from_float(c).expect("finite coefficient")
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(n: usize, c: BigRational) -> Self {
        Self::monomial(vec![0; n], c)
    }

    pub fn int(n: usize, c: i64) -> Self {
        Self::constant(n, BigRational::from_integer(BigInt::from(c)))
    }

    /// `c · x^exps`.
    pub fn monomial(exps: Vec<u32>, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Self { terms }
    }

    /// The coordinate `x_{axis+1}`.
    pub fn var(n: usize, axis: usize) -> Self {
        let mut e = vec![0; n];
        e[axis] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn add_term(&mut self, exps: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn partial(&self, axis: usize) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            if e[axis] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[axis] -= 1;
            out.add_term(e2, c * BigRational::from_integer(BigInt::from(e[axis])));
        }
        out
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let m: f64 = e.iter().zip(x).map(|(&p, &xi)| xi.powi(p as i32)).product();
                c.to_f64().unwrap_or(f64::NAN) * m
            })
            .sum()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| if p == 1 { format!("x{}", i + 1) } else { format!("x{}^{p}", i + 1) })
                .collect();
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{a}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Polynomials in `n` variables.
#[derive(Clone, Copy, Debug)]
pub struct PolyRing {
    pub n: usize,
}

impl CoeffRing for PolyRing {
    type Elem = Poly;

    fn dim(&self) -> usize {
        self.n
    }
    fn zero(&self) -> Poly {
        Poly::zero()
    }
    fn constant(&self, c: f64) -> Poly {
        Poly::constant(self.n, rational_from_f64(c))
    }
    fn add_signed(&self, acc: &mut Poly, x: &Poly, sign: i32) {
        for (e, c) in &x.terms {
            acc.add_term(e.clone(), if sign < 0 { -c } else { c.clone() });
        }
    }
    fn axpy(&self, acc: &mut Poly, c: f64, x: &Poly) {
        let c = rational_from_f64(c);
        for (e, xc) in &x.terms {
            acc.add_term(e.clone(), xc * &c);
        }
    }
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        a.mul(b)
    }
    fn is_zero(&self, x: &Poly) -> bool {
        x.is_zero()
    }
}

impl DiffRing for PolyRing {
    fn partial(&self, x: &Poly, axis: usize) -> Poly {
        x.partial(axis)
    }
}
