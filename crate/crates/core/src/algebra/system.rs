//! Consequences of the homogeneous system `S_{q,μ} u = 0`, derived as
//! explicit left-multiplier combinations of its rows and checked by
//! normalization.

use super::builders::{lame, Coefficients};
use super::expr::Expr;
use super::generator::Gen;
use super::rewrite::Rewriter;
use crate::error::{Error, Result};

/// Outcome of one derivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivationStatus {
    Reduced,
    Stuck,
}

#[derive(Clone, Debug)]
pub struct DerivedIdentity {
    pub name: String,
    pub anchor: &'static str,
    pub status: DerivationStatus,
    /// Normal form of `combination − target`, one entry per nonzero unknown.
    pub residual: Vec<(usize, String)>,
    pub note: Option<String>,
}

/// A linear expression in the unknowns `u_0, …, u_q`; entry `k` maps
/// degree `k` to a common target degree.
#[derive(Clone, Debug)]
struct Row {
    target: usize,
    coeffs: Vec<Expr>,
}

impl Row {
    fn zero(q: usize, target: usize) -> Self {
        Self { target, coeffs: (0..=q).map(|k| Expr::zero(k, target)).collect() }
    }

    fn with(mut self, k: usize, e: Expr) -> Result<Self> {
        self.coeffs[k] = self.coeffs[k].add(&e)?;
        Ok(self)
    }

    fn add(&self, other: &Row) -> Result<Row> {
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a = a.add(b)?;
        }
        Ok(out)
    }

    fn apply(&self, m: &Expr) -> Result<Row> {
        let mut out = Row::zero(self.coeffs.len() - 1, m.target());
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.coeffs[k] = m.compose(c)?;
            }
        }
        Ok(out)
    }
}

fn g(x: Gen) -> Result<Expr> {
    Expr::gen(x)
}

fn wd(x: &[Gen]) -> Result<Expr> {
    Expr::word(x.to_vec())
}

fn hodge(k: usize) -> Result<Expr> {
    lame(k, Coefficients::Identity)
}

struct System {
    q: usize,
    j0: usize,
}

impl System {
    /// Row of output degree `l`: `d*_l u_{l+1} + Δ_{l,μ} u_l + d_{l−1} u_{l−1}`,
    /// the Lamé term present only for `l ≥ j0`.
    fn equation(&self, l: usize) -> Result<Row> {
        let mut row = Row::zero(self.q, l);
        if l < self.q {
            row = row.with(l + 1, g(Gen::Ds(l))?)?;
        }
        if l >= self.j0 {
            row = row.with(l, lame(l, Coefficients::Abstract)?)?;
        }
        if l >= 1 {
            row = row.with(l - 1, g(Gen::D(l - 1))?)?;
        }
        Ok(row)
    }

    fn combine(&self, parts: &[(usize, Expr)]) -> Result<Row> {
        let target = parts[0].1.target();
        let mut acc = Row::zero(self.q, target);
        for (l, m) in parts {
            acc = acc.add(&self.equation(*l)?.apply(m)?)?;
        }
        Ok(acc)
    }
}

struct Candidate {
    name: String,
    anchor: &'static str,
    parts: Vec<(usize, Expr)>,
    target: Vec<(usize, Expr)>,
    note: Option<String>,
}

fn candidates(q: usize, j0: usize) -> Result<Vec<Candidate>> {
    use Gen::*;
    let mut out = Vec::new();
    let c1 = "eq.Sq.q.c1";
    let c2 = "eq.Sq.q.c2";
    for j in 2..=j0 {
        out.push(Candidate {
            name: format!("d{a} ds{a} u{j} = 0", a = j - 1),
            anchor: c1,
            parts: vec![(j - 1, g(D(j - 1))?)],
            target: vec![(j, wd(&[D(j - 1), Ds(j - 1)])?)],
            note: None,
        });
        out.push(Candidate {
            name: format!("ds{b} d{b} u{b} = 0", b = j - 2),
            anchor: c1,
            parts: vec![(j - 1, g(Ds(j - 2))?)],
            target: vec![(j - 2, wd(&[Ds(j - 2), D(j - 2)])?)],
            note: None,
        });
    }
    out.push(Candidate {
        name: format!("ds{q} d{q} ds{q} M{q} d{q} u{q} = 0"),
        anchor: c1,
        parts: vec![(q, wd(&[Ds(q), D(q)])?)],
        target: vec![(q, wd(&[Ds(q), D(q), Ds(q), M(q), D(q)])?)],
        note: None,
    });
    out.push(Candidate {
        name: format!("d{a} ds{a} d{a} Mt{q} ds{a} u{q} + d{a} ds{a} d{a} u{a} = 0", a = q - 1),
        anchor: c1,
        parts: vec![(q, wd(&[D(q - 1), Ds(q - 1)])?)],
        target: vec![
            (q, wd(&[D(q - 1), Ds(q - 1), D(q - 1), Mt(q), Ds(q - 1)])?),
            (q - 1, wd(&[D(q - 1), Ds(q - 1), D(q - 1)])?),
        ],
        note: None,
    });
    for j in (j0 + 1)..=q {
        out.push(Candidate {
            name: format!("d{a} ds{a} u{j} + d{a} ds{a} M{a} d{a} u{a} = 0", a = j - 1),
            anchor: c1,
            parts: vec![(j - 1, g(D(j - 1))?)],
            target: vec![(j, wd(&[D(j - 1), Ds(j - 1)])?), (j - 1, wd(&[D(j - 1), Ds(j - 1), M(j - 1), D(j - 1)])?)],
            note: None,
        });
        out.push(Candidate {
            name: format!("ds{b} d{b} Mt{a} ds{b} u{a} + ds{b} d{b} u{b} = 0", a = j - 1, b = j - 2),
            anchor: c1,
            parts: vec![(j - 1, g(Ds(j - 2))?)],
            target: vec![(j - 1, wd(&[Ds(j - 2), D(j - 2), Mt(j - 1), Ds(j - 2)])?), (j - 2, wd(&[Ds(j - 2), D(j - 2)])?)],
            note: None,
        });
    }
    for j in 0..j0.saturating_sub(1) {
        let mut parts = vec![(j + 1, g(Ds(j))?)];
        if j >= 1 {
            parts.push((j - 1, g(D(j - 1))?));
        }
        out.push(Candidate {
            name: format!("Delta{j} u{j} = 0"),
            anchor: "Prop p.0 proof, harmonic u_j for j <= j0-2",
            parts,
            target: vec![(j, hodge(j)?)],
            note: None,
        });
    }
    // fourth-order system
    if j0 < q {
        let dq = q - 1;
        out.push(Candidate {
            name: format!("Delta{q} Delta{q},mu u{q} + d{dq} ds{dq} d{dq} u{dq} = 0"),
            anchor: c2,
            parts: vec![(q, hodge(q)?)],
            target: vec![(q, hodge(q)?.compose(&lame(q, Coefficients::Abstract)?)?), (dq, wd(&[D(dq), Ds(dq), D(dq)])?)],
            note: None,
        });
    }
    for j in (j0 + 1)..q {
        out.push(Candidate {
            name: format!("Delta{j} Delta{j},mu u{j} + ds{j} d{j} ds{j} u{p} + d{m} ds{m} d{m} u{m} = 0", p = j + 1, m = j - 1),
            anchor: c2,
            parts: vec![(j, hodge(j)?)],
            target: vec![
                (j, hodge(j)?.compose(&lame(j, Coefficients::Abstract)?)?),
                (j + 1, wd(&[Ds(j), D(j), Ds(j)])?),
                (j - 1, wd(&[D(j - 1), Ds(j - 1), D(j - 1)])?),
            ],
            note: None,
        });
    }
    {
        let j = j0;
        let ddd = wd(&[D(j - 1), Ds(j - 1), D(j - 1)])?;
        let mixed = wd(&[Ds(j), M(j), D(j)])?.add(&wd(&[D(j - 1), Ds(j - 1)])?)?;
        let mut target = vec![(j, hodge(j)?.compose(&mixed)?)];
        if j < q {
            target.push((j + 1, wd(&[Ds(j), D(j), Ds(j)])?));
        }
        let upper = if j < q { format!(" + ds{j} d{j} ds{j} u{}", j + 1) } else { String::new() };
        out.push(Candidate {
            name: format!("Delta{j} (ds{j} M{j} d{j} + d{m} ds{m}) u{j}{upper} = 0", m = j - 1),
            anchor: c2,
            parts: vec![(j, hodge(j)?.sub(&wd(&[D(j - 1), Ds(j - 1)])?)?), (j - 1, ddd)],
            target,
            note: None,
        });
    }
    if j0 == 1 {
        out.push(Candidate {
            name: "ds0 d0 u0 = 0".into(),
            anchor: "Prop p.0 proof, exceptional case j0 = 1",
            parts: vec![(1, g(Ds(0))?), (0, wd(&[Ds(0), D(0), Mt(1)])?.neg())],
            target: vec![(0, wd(&[Ds(0), D(0)])?)],
            note: None,
        });
    }
    if j0 == 1 && q == 1 {
        out.push(Candidate {
            name: "d1 ds1 M1 d1 u1 = 0".into(),
            anchor: "Prop p.0 proof, case j0 = q = 1",
            parts: vec![(1, g(D(1))?)],
            target: vec![(1, wd(&[D(1), Ds(1), M(1), D(1)])?)],
            note: Some("the printed line ends in `d_1 d*_1 M_1 d_1` without the trailing u_1; checked with u_1 restored".into()),
        });
    }
    Ok(out)
}

/// Derives the consequences of `S_{q,μ} u = 0` used to prove regularity
/// and reports each as reduced or stuck.
pub fn verify_solution_system(r: &Rewriter, q: usize, j0: usize) -> Result<Vec<DerivedIdentity>> {
    if q == 0 || q > r.n() {
        return Err(Error::InvalidDegree { degree: q, n: r.n() });
    }
    if j0 == 0 || j0 > q {
        return Err(Error::Parameter(format!("j0 = {j0} must satisfy 1 ≤ j0 ≤ q = {q}")));
    }
    let sys = System { q, j0 };
    let mut out = Vec::new();
    for c in candidates(q, j0)? {
        let combo = sys.combine(&c.parts)?;
        let mut target = Row::zero(q, combo.target);
        for (k, e) in c.target {
            target = target.with(k, e)?;
        }
        let mut residual = Vec::new();
        for k in 0..=q {
            let diff = r.normalize(&combo.coeffs[k].sub(&target.coeffs[k])?)?;
            if !diff.is_zero() {
                residual.push((k, diff.to_string()));
            }
        }
        let status = if residual.is_empty() { DerivationStatus::Reduced } else { DerivationStatus::Stuck };
        out.push(DerivedIdentity { name: c.name, anchor: c.anchor, status, residual, note: c.note });
    }
    Ok(out)
}
