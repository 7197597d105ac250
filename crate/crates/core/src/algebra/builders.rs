use super::block::BlockMatrix;
use super::expr::Expr;
use super::generator::{Gen, Word};
use super::rewrite::Rewriter;
use crate::error::{Error, Result};
use crate::exterior::{exterior_derivative, PolyForm, PolyRing};

/// How the coefficient matrices enter the symbolic operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficients {
    /// Abstract `M_k`, `M̃_k` generators and `Φ_{k,μ}`.
    Abstract,
    /// `M_k = I`, `M̃_k = I`, so `Φ_{k,μ} = Φ_k`.
    Identity,
}

/// Sign flips in the right fundamental solution, used as negative controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsiMutation {
    /// Block `(1,1)`.
    Psi11,
    /// Block `(1,2)`.
    Psi12,
    /// Block `(2,1)`.
    Psi21,
    /// Block `(2,2)`.
    Psi22,
    /// The sub-diagonal blocks `(j+1, j)`, `j ≥ 2`.
    SubDiagonal,
}

impl PsiMutation {
    pub const ALL: [PsiMutation; 5] =
        [PsiMutation::Psi11, PsiMutation::Psi12, PsiMutation::Psi21, PsiMutation::Psi22, PsiMutation::SubDiagonal];

    pub fn name(self) -> &'static str {
        match self {
            PsiMutation::Psi11 => "negate Psi(1,1)",
            PsiMutation::Psi12 => "negate Psi(1,2)",
            PsiMutation::Psi21 => "negate Psi(2,1)",
            PsiMutation::Psi22 => "negate Psi(2,2)",
            PsiMutation::SubDiagonal => "negate Psi(j+1,j), j >= 2",
        }
    }
}

/// Replaces `M`, `M̃` by the identity and `Φ_μ` by `Φ`.
pub fn specialize(e: &Expr, coeff: Coefficients) -> Result<Expr> {
    if coeff == Coefficients::Abstract {
        return Ok(e.clone());
    }
    let raw = e.terms().iter().map(|(w, c)| {
        let word: Word = w
            .iter()
            .filter_map(|g| match *g {
                Gen::M(_) | Gen::Mt(_) => None,
                Gen::PhiMu(k) => Some(Gen::Phi(k)),
                g => Some(g),
            })
            .collect();
        (word, *c)
    });
    Expr::from_terms(e.source(), e.target(), raw)
}

fn word(gens: &[Gen], coeff: Coefficients) -> Result<Expr> {
    specialize(&Expr::word(gens.to_vec())?, coeff)
}

/// `Δ_{k,μ} = d*_k M_k d_k + d_{k−1} M̃_k d*_{k−1}`.
pub fn lame(k: usize, coeff: Coefficients) -> Result<Expr> {
    let mut e = word(&[Gen::Ds(k), Gen::M(k), Gen::D(k)], coeff)?;
    if k >= 1 {
        e = e.add(&word(&[Gen::D(k - 1), Gen::Mt(k), Gen::Ds(k - 1)], coeff)?)?;
    }
    Ok(e)
}

fn degrees(q: usize) -> Vec<usize> {
    (0..=q).rev().collect()
}

fn check_range(n: usize, q: usize, j0: usize) -> Result<()> {
    if q == 0 || q > n {
        return Err(Error::InvalidDegree { degree: q, n });
    }
    if j0 == 0 || j0 > q {
        return Err(Error::Parameter(format!("j0 = {j0} must satisfy 1 ≤ j0 ≤ q = {q}")));
    }
    Ok(())
}

/// The tridiagonal block operator `S_{q,μ}` acting on `(u_q, …, u_0)`.
/// Levels below `j0` carry a zero Laplacian.
pub fn build_stokes(n: usize, q: usize, j0: usize, coeff: Coefficients) -> Result<BlockMatrix> {
    check_range(n, q, j0)?;
    let mut s = BlockMatrix::zero(degrees(q), degrees(q));
    for i in 0..=q {
        let level = q - i;
        if level >= j0 {
            s.set(i, i, lame(level, coeff)?)?;
        }
        if i < q {
            s.set(i, i + 1, Expr::gen(Gen::D(level - 1))?)?;
            s.set(i + 1, i, Expr::gen(Gen::Ds(level - 1))?)?;
        }
    }
    Ok(s)
}

fn inverse_hypothesis(n: usize, q: usize) -> Result<()> {
    if q == 0 || q > n {
        return Err(Error::InvalidDegree { degree: q, n });
    }
    Ok(())
}

/// Right fundamental solution `Ψ^{(r)}_{q,μ}` of `S_{q,μ}` with `j0 = q`.
pub fn build_psi_right(n: usize, q: usize, coeff: Coefficients) -> Result<BlockMatrix> {
    build_psi_right_mutated(n, q, coeff, None)
}

pub fn build_psi_right_mutated(
    n: usize,
    q: usize,
    coeff: Coefficients,
    mutation: Option<PsiMutation>,
) -> Result<BlockMatrix> {
    use Gen::*;
    inverse_hypothesis(n, q)?;
    let sign = |m: PsiMutation| if mutation == Some(m) { -1 } else { 1 };
    let mut psi = BlockMatrix::zero(degrees(q), degrees(q));
    psi.set(0, 0, word(&[Ds(q), M(q), D(q), PhiMu(q), PhiMu(q)], coeff)?.scale(sign(PsiMutation::Psi11)))?;
    psi.set(1, 0, word(&[Ds(q - 1), Phi(q), D(q - 1), Mt(q), Ds(q - 1), PhiMu(q)], coeff)?.scale(sign(PsiMutation::Psi21)))?;
    psi.set(0, 1, word(&[D(q - 1), Phi(q - 1)], coeff)?.scale(sign(PsiMutation::Psi12)))?;
    psi.set(
        1,
        1,
        word(&[Ds(q - 1), Phi(q), D(q - 1), Mt(q), Ds(q - 1), Phi(q), D(q - 1)], coeff)?.scale(-sign(PsiMutation::Psi22)),
    )?;
    for j in 2..=q {
        psi.set(j - 1, j, word(&[D(q - j), Phi(q - j)], coeff)?)?;
        psi.set(j, j - 1, word(&[Phi(q - j), Ds(q - j)], coeff)?.scale(sign(PsiMutation::SubDiagonal)))?;
    }
    Ok(psi)
}

/// `Ψ^{(l)}_{q,μ} = (Ψ^{(r)}_{q,μ})*`.
pub fn build_psi_left(n: usize, q: usize, coeff: Coefficients) -> Result<BlockMatrix> {
    Ok(build_psi_right(n, q, coeff)?.adjoint())
}

/// The identity-matrix form `Ψ_q` with
/// `Ψ^{1,1} = Φ_q d*_q d_q Φ_q`, `Ψ^{2,1} = d*_{q−1} Φ_q` and
/// `Ψ^{2,2} = −d*_{q−1} Φ_q d_{q−1}` (`−I` when `q = 1`).
pub fn build_psi_identity_form(n: usize, q: usize) -> Result<BlockMatrix> {
    use Gen::*;
    inverse_hypothesis(n, q)?;
    let mut psi = build_psi_right(n, q, Coefficients::Identity)?;
    psi.set(0, 0, Expr::word(vec![Phi(q), Ds(q), D(q), Phi(q)])?)?;
    psi.set(1, 0, Expr::word(vec![Ds(q - 1), Phi(q)])?)?;
    let p22 = if q == 1 { Expr::identity(0) } else { Expr::word(vec![Ds(q - 1), Phi(q), D(q - 1)])? };
    psi.set(1, 1, p22.neg())?;
    Ok(psi)
}

/// `A_{q,μ} = I − Ψ^{(r)} S_{q,μ}`, normalized.
pub fn build_defect(r: &Rewriter, q: usize, coeff: Coefficients) -> Result<BlockMatrix> {
    let n = r.n();
    let s = build_stokes(n, q, q, coeff)?;
    let psi = build_psi_right(n, q, coeff)?;
    BlockMatrix::identity(degrees(q)).sub(&psi.mul(&s)?)?.normalize(r)
}

/// Closed-form blocks of the defect: `a11 = d*_q d_q Φ_q − d*_q M_q d_q Φ_{q,μ}`,
/// `a12 = −d*_q M_q d_q Φ_{q,μ} Φ_{q,μ} d_{q−1}`, and
/// `a22 = d*_0 d_0 Φ_0 − M̃_1 d*_0 Φ_{1,μ} d_0` for `q = 1`,
/// `a22 = d*_{q−1} d_{q−1} Φ_{q−1} − d*_{q−1} Φ_q d_{q−1} M̃_q d*_{q−1} Φ_{q,μ} d_{q−1}` otherwise.
/// All other blocks vanish.
pub fn defect_closed_form(n: usize, q: usize, coeff: Coefficients) -> Result<BlockMatrix> {
    use Gen::*;
    inverse_hypothesis(n, q)?;
    let mut a = BlockMatrix::zero(degrees(q), degrees(q));
    a.set(0, 0, word(&[Ds(q), D(q), Phi(q)], coeff)?.sub(&word(&[Ds(q), M(q), D(q), PhiMu(q)], coeff)?)?)?;
    a.set(0, 1, word(&[Ds(q), M(q), D(q), PhiMu(q), PhiMu(q), D(q - 1)], coeff)?.neg())?;
    let second = if q == 1 {
        word(&[Mt(1), Ds(0), PhiMu(1), D(0)], coeff)?
    } else {
        word(&[Ds(q - 1), Phi(q), D(q - 1), Mt(q), Ds(q - 1), PhiMu(q), D(q - 1)], coeff)?
    };
    a.set(1, 1, word(&[Ds(q - 1), D(q - 1), Phi(q - 1)], coeff)?.sub(&second)?)?;
    Ok(a)
}

/// `Ψ_{q,μ} = Ψ^{(r)} + H` with `H = A_{q,μ} (Ψ^{(r)})*`.
pub fn build_psi_bilateral(r: &Rewriter, q: usize, coeff: Coefficients) -> Result<BlockMatrix> {
    let n = r.n();
    let psi = build_psi_right(n, q, coeff)?;
    let h = build_defect(r, q, coeff)?.mul(&psi.adjoint())?;
    psi.add(&h)
}

/// `d_{q−1} M̃_q d_{q−2} ≡ 0` holds iff every row form `M̃^{(J)}_q` is closed.
pub fn check_commute_condition(ring: &PolyRing, m_tilde_rows: &[PolyForm]) -> Result<bool> {
    for form in m_tilde_rows {
        let d = exterior_derivative(ring, form)?;
        if !d.coeffs().iter().all(|p| p.is_zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}
