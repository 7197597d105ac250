//! Grid realization of block operator matrices over `d`, `d*`, `Φ`, `Φ_μ`,
//! `M`, `M̃` with scalar coefficients.
//!
//! Every word is brought to the form `c · L · Φᵖ` where `L` is a word in
//! `d`, `d*` alone: `Φ` commutes with `d` and `d*`, scalars commute with
//! everything, and `Φ_{k,μ} = a⁻¹ d*d Φ² + ã⁻¹ dd* Φ²`. Powers of `Φ` are
//! then lowered with `ΔΦ = I` (`x y x Φ = x Φ⁰` for alternating letters,
//! and `Δ_0 = d*_0 d_0`, `Δ_n = d_{n−1} d*_{n−1}` at the ends of the
//! complex) until `p ≤ 2`, so `Φᵖ` acts on compactly supported input
//! through the `g` or `B` kernel before any difference operator.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::spec::{FormTuple, StokesSpec};
use crate::algebra::{build_psi_identity_form, build_psi_left, build_psi_right, BlockMatrix, Coefficients, Gen};
use crate::error::{Error, Result};
use crate::exterior::{GridForm, GridSpec};
use crate::kernels::{phi_apply, phi_squared_apply, ConvMethod, ConvolutionPlan, KernelKind, KernelSpec};

/// Convolution plans for `Φ` and `Φ²` on one grid.
pub struct PotentialPlans {
    g: ConvolutionPlan,
    b: ConvolutionPlan,
}

impl PotentialPlans {
    pub fn new(grid: &GridSpec, method: ConvMethod, pad_factor: usize, singular_tol: f64) -> Result<Self> {
        let n = grid.n();
        let g = ConvolutionPlan::new(grid, KernelSpec::new(n, KernelKind::NewtonianG)?, method, pad_factor, singular_tol)?;
        let b = ConvolutionPlan::new(grid, KernelSpec::new(n, KernelKind::BiharmonicB)?, method, pad_factor, singular_tol)?;
        Ok(Self { g, b })
    }

    pub fn grid(&self) -> &GridSpec {
        self.g.grid()
    }

    fn power(&self, p: usize, u: &GridForm) -> Result<GridForm> {
        match p {
            0 => Ok(u.clone()),
            1 => phi_apply(&self.g, u),
            2 => phi_squared_apply(&self.b, u),
            _ => Err(Error::Unsupported(format!("Φ^{p} has no kernel"))),
        }
    }
}

/// `c · letters · Φ^phi`, letters in composition order.
#[derive(Clone, Debug, PartialEq)]
struct Term {
    coef: f64,
    letters: Vec<Gen>,
    phi: usize,
}

impl Term {
    /// Appends a letter; `None` when the product vanishes.
    fn push(mut self, g: Gen, n: usize) -> Option<Term> {
        if matches!(g, Gen::D(k) | Gen::Ds(k) if k >= n) {
            return None;
        }
        let same_kind = matches!(
            (self.letters.last(), g),
            (Some(Gen::D(_)), Gen::D(_)) | (Some(Gen::Ds(_)), Gen::Ds(_))
        );
        if same_kind {
            return None;
        }
        self.letters.push(g);
        Some(self)
    }

    fn lower(mut self, n: usize) -> Term {
        while self.phi > 0 {
            let end_pair = self
                .letters
                .windows(2)
                .position(|w| w == [Gen::Ds(0), Gen::D(0)] || (n >= 1 && w == [Gen::D(n - 1), Gen::Ds(n - 1)]));
            if let Some(i) = end_pair {
                self.letters.drain(i..i + 2);
            } else if self.letters.len() >= 3 {
                self.letters.drain(1..3);
            } else {
                break;
            }
            self.phi -= 1;
        }
        self
    }
}

fn expand(word: &[Gen], coef: f64, n: usize, scalars: &impl Fn(usize) -> Result<(f64, f64)>) -> Result<Vec<Term>> {
    let mut terms = vec![Term { coef, letters: Vec::new(), phi: 0 }];
    for &g in word {
        let mut next = Vec::with_capacity(terms.len());
        for t in terms {
            match g {
                Gen::D(_) | Gen::Ds(_) => next.extend(t.push(g, n)),
                Gen::Phi(_) => next.push(Term { phi: t.phi + 1, ..t }),
                Gen::M(k) => next.push(Term { coef: t.coef * scalars(k)?.0, ..t }),
                Gen::Mt(k) => next.push(Term { coef: t.coef * scalars(k)?.1, ..t }),
                Gen::PhiMu(k) => {
                    let (a, at) = scalars(k)?;
                    if k < n {
                        let u = Term { coef: t.coef / a, phi: t.phi + 2, ..t.clone() };
                        next.extend(u.push(Gen::Ds(k), n).and_then(|u| u.push(Gen::D(k), n)));
                    }
                    if k >= 1 {
                        let u = Term { coef: t.coef / at, phi: t.phi + 2, ..t };
                        next.extend(u.push(Gen::D(k - 1), n).and_then(|u| u.push(Gen::Ds(k - 1), n)));
                    }
                }
            }
        }
        terms = next;
    }
    Ok(terms)
}

/// Terms of one block, like terms merged.
fn compile(e: &crate::algebra::Expr, n: usize, scalars: &impl Fn(usize) -> Result<(f64, f64)>) -> Result<Vec<Term>> {
    let mut merged: BTreeMap<(Vec<Gen>, usize), f64> = BTreeMap::new();
    for (w, &c) in e.terms() {
        for t in expand(w, c as f64, n, scalars)? {
            let t = t.lower(n);
            if t.phi > 2 {
                return Err(Error::Unsupported(format!("word {w:?} leaves Φ^{}", t.phi)));
            }
            *merged.entry((t.letters, t.phi)).or_insert(0.0) += t.coef;
        }
    }
    Ok(merged.into_iter().filter(|(_, c)| *c != 0.0).map(|((letters, phi), coef)| Term { coef, letters, phi }).collect())
}

fn apply_letters(letters: &[Gen], u: &GridForm) -> Result<GridForm> {
    letters.iter().rev().try_fold(u.clone(), |acc, g| match g {
        Gen::D(_) => acc.d(),
        Gen::Ds(_) => acc.codiff(),
        _ => unreachable!("only d and d* remain after compilation"),
    })
}

/// Applies a block matrix to `f`, reading `M_k`, `M̃_k` and `Φ_{k,μ}` from
/// the scalar coefficients of level `k` of `spec`.
pub fn apply_block_matrix(m: &BlockMatrix, spec: &StokesSpec, plans: &PotentialPlans, f: &FormTuple) -> Result<FormTuple> {
    if f.grid() != plans.grid() {
        return Err(Error::GridMismatch("tuple and potential plans use different grids".into()));
    }
    if m.col_degrees() != spec.degrees().as_slice() || f.q() != spec.q() {
        return Err(Error::DegreeMismatch { expected: spec.q(), found: f.q() });
    }
    let n = spec.n();
    let scalars = |level: usize| {
        spec.scalars(level).ok_or_else(|| Error::Unsupported(format!("level {level} has no scalar coefficients")))
    };
    let blocks: Vec<Vec<Vec<Term>>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| compile(m.get(i, j), n, &scalars)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let mut needed: Vec<(usize, usize)> =
        blocks.iter().flat_map(|row| row.iter().enumerate().flat_map(|(j, ts)| ts.iter().map(move |t| (j, t.phi)))).collect();
    needed.sort_unstable();
    needed.dedup();
    let potentials: BTreeMap<(usize, usize), GridForm> = needed
        .par_iter()
        .map(|&(j, p)| plans.power(p, &f.parts()[j]).map(|v| ((j, p), v)))
        .collect::<Result<_>>()?;
    let rows: Vec<GridForm> = blocks
        .par_iter()
        .enumerate()
        .map(|(i, row)| {
            let mut out = GridForm::zero(f.grid(), m.row_degrees()[i]);
            for (j, terms) in row.iter().enumerate() {
                for t in terms {
                    out = out.add(&apply_letters(&t.letters, &potentials[&(j, t.phi)])?.scale(t.coef))?;
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    FormTuple::new(rows)
}

fn require_supported_shape(spec: &StokesSpec) -> Result<(f64, f64)> {
    if spec.j0() != spec.q() {
        return Err(Error::Unsupported(format!("fundamental solutions need j0 = q, got j0 = {}", spec.j0())));
    }
    spec.scalars(spec.q()).ok_or_else(|| Error::Unsupported("fundamental solutions need scalar M_q, M̃_q".into()))
}

/// `Ψ_q f` for identity coefficients, from the blocks
/// `Φ d* d Φ`, `d Φ`, `d* Φ`, `−d* Φ d` and the sub-diagonal `d Φ`, `Φ d*`.
pub fn apply_psi_identity(spec: &StokesSpec, plans: &PotentialPlans, f: &FormTuple) -> Result<FormTuple> {
    if require_supported_shape(spec)? != (1.0, 1.0) {
        return Err(Error::Parameter("apply_psi_identity needs identity coefficients".into()));
    }
    apply_block_matrix(&build_psi_identity_form(spec.n(), spec.q())?, spec, plans, f)
}

/// `Ψ^{(r)}_{q,μ} f` with `M_q = a`, `M̃_q = ã` and `Φ_{q,μ}` from the `B` kernel.
pub fn apply_psi_scalar_lame(spec: &StokesSpec, plans: &PotentialPlans, f: &FormTuple) -> Result<FormTuple> {
    require_supported_shape(spec)?;
    apply_block_matrix(&build_psi_right(spec.n(), spec.q(), Coefficients::Abstract)?, spec, plans, f)
}

/// `Ψ^{(l)}_{q,μ} f = (Ψ^{(r)}_{q,μ})* f`.
pub fn apply_psi_left(spec: &StokesSpec, plans: &PotentialPlans, f: &FormTuple) -> Result<FormTuple> {
    require_supported_shape(spec)?;
    apply_block_matrix(&build_psi_left(spec.n(), spec.q(), Coefficients::Abstract)?, spec, plans, f)
}
