use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{require, Reader};
use super::report::CheckRecord;
use super::Job;
use crate::algebra::{
    build_defect, build_psi_bilateral, build_psi_left, build_psi_right, build_psi_right_mutated, build_stokes,
    defect_closed_form, verify_solution_system, BlockMatrix, Coefficients, DerivationStatus, Expr, Gen, PsiMutation,
    Rewriter, Strategy, DEFAULT_BUDGET,
};
use crate::error::{Error, Result};
use crate::exterior::{
    binomial, codifferential, componentwise_laplacian, exterior_derivative, hodge_laplacian, is_zero, matrix_action,
    matrix_action_direct, rational_from_f64, Form, MatrixCoefficient, Poly, PolyRing,
};

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraConfig {
    pub n: usize,
    pub qs: Vec<usize>,
    pub abstract_coefficients: bool,
    pub identity_coefficients: bool,
    pub budget: usize,
    pub strategy: Strategy,
    pub corpus_size: usize,
    pub seed: u64,
    pub corrupt_rules: bool,
}

impl AlgebraConfig {
    pub fn from_reader(r: &Reader) -> Result<Self> {
        let n = r.parse_or("n", 4usize)?;
        require((1..=6).contains(&n), || format!("n = {n} outside 1..=6"))?;
        let default_qs: Vec<usize> = (1..=n.min(3)).collect();
        let qs = r.list_or("q", &default_qs)?;
        require(qs.iter().all(|&q| (1..=n).contains(&q)), || format!("q values {qs:?} must lie in 1..={n}"))?;
        let coefficients = r.parse_or("coefficients", "both".to_string())?;
        let (abstract_coefficients, identity_coefficients) = match coefficients.as_str() {
            "both" => (true, true),
            "abstract" => (true, false),
            "identity" => (false, true),
            other => return Err(Error::Config(format!("coefficients: expected both|abstract|identity, got '{other}'"))),
        };
        let strategy = match r.parse_or("rewrite.strategy", "leftmost".to_string())?.as_str() {
            "leftmost" => Strategy::Leftmost,
            "rightmost" => Strategy::Rightmost,
            other => return Err(Error::Config(format!("rewrite.strategy: expected leftmost|rightmost, got '{other}'"))),
        };
        Ok(Self {
            n,
            qs,
            abstract_coefficients,
            identity_coefficients,
            budget: r.parse_or("rewrite.budget", DEFAULT_BUDGET)?,
            strategy,
            corpus_size: r.parse_or("corpus.size", 100usize)?,
            seed: r.parse_or("corpus.seed", 1u64)?,
            corrupt_rules: r.parse_or("test.corrupt_rules", false)?,
        })
    }

    fn rewriter(&self) -> Rewriter {
        let r = Rewriter::new(self.n).with_budget(self.budget).with_strategy(self.strategy);
        if self.corrupt_rules {
            r.corrupted()
        } else {
            r
        }
    }

    fn coefficient_sets(&self, max_abstract_q: usize) -> Vec<(usize, Coefficients)> {
        let mut out = Vec::new();
        for &q in &self.qs {
            if self.abstract_coefficients && q <= max_abstract_q {
                out.push((q, Coefficients::Abstract));
            }
            if self.identity_coefficients {
                out.push((q, Coefficients::Identity));
            }
        }
        out
    }
}

fn label(c: Coefficients) -> &'static str {
    match c {
        Coefficients::Abstract => "abstract",
        Coefficients::Identity => "identity",
    }
}

/// Random polynomial with integer coefficients in `−5..=5` and total degree
/// at most `max_degree`.
pub fn random_poly(rng: &mut impl Rng, n: usize, max_degree: u32) -> Poly {
    let terms = rng.gen_range(0..=4);
    (0..terms).fold(Poly::zero(), |acc, _| {
        let mut exps = vec![0u32; n];
        let mut budget = rng.gen_range(0..=max_degree);
        while budget > 0 {
            exps[rng.gen_range(0..n)] += 1;
            budget -= 1;
        }
        let c = rng.gen_range(-5i32..=5) as f64;
        acc.add(&Poly::monomial(exps, rational_from_f64(c)))
    })
}

pub fn random_poly_form(rng: &mut impl Rng, n: usize, q: usize, max_degree: u32) -> Form<Poly> {
    let coeffs = (0..binomial(n, q)).map(|_| random_poly(rng, n, max_degree)).collect();
    Form::from_coeffs(n, q, coeffs).expect("length matches the basis")
}

/// Counts of forms checked and identities violated on the random corpus.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CorpusOutcome {
    pub forms: usize,
    pub dd_failures: usize,
    pub codiff_failures: usize,
    pub laplace_failures: usize,
    pub matrix_failures: usize,
}

/// Runs `d∘d = 0`, `d*∘d* = 0`, `Δ + componentwise Laplacian = 0` and the
/// two matrix actions on `size` random forms in every dimension `1..=n_max`.
pub fn corpus_checks(n_max: usize, size: usize, seed: u64) -> Result<CorpusOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = CorpusOutcome::default();
    for n in 1..=n_max {
        let ring = PolyRing { n };
        for i in 0..size {
            let q = i % (n + 1);
            let u = random_poly_form(&mut rng, n, q, 3);
            out.forms += 1;
            if !is_zero(&ring, &exterior_derivative(&ring, &exterior_derivative(&ring, &u)?)?) {
                out.dd_failures += 1;
            }
            if q >= 2 && !is_zero(&ring, &codifferential(&ring, &codifferential(&ring, &u)?)?) {
                out.codiff_failures += 1;
            }
            let lap = hodge_laplacian(&ring, &u)?;
            let comp = componentwise_laplacian(&ring, &u);
            if !is_zero(&ring, &crate::exterior::add(&ring, &lap, &comp)?) {
                out.laplace_failures += 1;
            }
            let k = binomial(n, q);
            let mut entries = vec![0.0; k * k];
            for a in 0..k {
                for b in 0..=a {
                    let v = rng.gen_range(-4i32..=4) as f64;
                    entries[a * k + b] = v;
                    entries[b * k + a] = v;
                }
            }
            let m = MatrixCoefficient::new(n, q, entries)?;
            if matrix_action(&ring, &m, &u)? != matrix_action_direct(&ring, &m, &u)? {
                out.matrix_failures += 1;
            }
        }
    }
    Ok(out)
}

fn identity(q: usize) -> BlockMatrix {
    BlockMatrix::identity((0..=q).rev().collect())
}

/// `normalize(S Ψ^{(r)} − I)` and `normalize(Ψ^{(l)} S − I)`.
pub fn inverse_residuals(r: &Rewriter, q: usize, coeff: Coefficients) -> Result<(BlockMatrix, BlockMatrix)> {
    let n = r.n();
    let s = build_stokes(n, q, q, coeff)?;
    let right = s.mul(&build_psi_right(n, q, coeff)?)?.sub(&identity(q))?.normalize(r)?;
    let left = build_psi_left(n, q, coeff)?.mul(&s)?.sub(&identity(q))?.normalize(r)?;
    Ok((right, left))
}

/// `normalize(S Ψ_mut − I)` for a sign-mutated right fundamental solution.
pub fn mutated_residual(r: &Rewriter, q: usize, mutation: PsiMutation) -> Result<BlockMatrix> {
    let n = r.n();
    let s = build_stokes(n, q, q, Coefficients::Identity)?;
    s.mul(&build_psi_right_mutated(n, q, Coefficients::Identity, Some(mutation))?)?.sub(&identity(q))?.normalize(r)
}

/// Residuals of the bilateral solution: defect against its closed form,
/// `S A`, `S Ψ − I` and `Ψ S − I`.
pub fn bilateral_residuals(r: &Rewriter, q: usize, coeff: Coefficients) -> Result<[BlockMatrix; 4]> {
    let n = r.n();
    let a = build_defect(r, q, coeff)?;
    let closed = defect_closed_form(n, q, coeff)?.normalize(r)?;
    let s = build_stokes(n, q, q, coeff)?;
    let sa = s.mul(&a)?.normalize(r)?;
    let psi = build_psi_bilateral(r, q, coeff)?;
    let right = s.mul(&psi)?.sub(&identity(q))?.normalize(r)?;
    let left = psi.mul(&s)?.sub(&identity(q))?.normalize(r)?;
    Ok([a.sub(&closed)?.normalize(r)?, sa, right, left])
}

fn commutation_check(r: &Rewriter) -> Result<Vec<String>> {
    use Gen::*;
    let n = r.n();
    let mut bad = Vec::new();
    for k in 0..n {
        let pairs = [
            (vec![D(k), Phi(k)], vec![Phi(k + 1), D(k)], format!("d{k} Phi{k} = Phi{} d{k}", k + 1)),
            (vec![Ds(k), Phi(k + 1)], vec![Phi(k), Ds(k)], format!("ds{k} Phi{} = Phi{k} ds{k}", k + 1)),
        ];
        for (a, b, name) in pairs {
            let diff = Expr::word(a)?.sub(&Expr::word(b)?)?;
            if !r.normalize(&diff)?.is_zero() {
                bad.push(name);
            }
        }
    }
    Ok(bad)
}

fn record_block(name: String, anchor: &str, residual: Result<BlockMatrix>) -> CheckRecord {
    match residual {
        Ok(m) => {
            let rec = CheckRecord::pass_if(name, anchor, m.is_zero()).metric("nonzero_blocks", m.nonzero_blocks().len());
            if m.is_zero() {
                rec
            } else {
                rec.metric("residual", m.to_string())
            }
        }
        Err(e) => CheckRecord::from_error(name, anchor, &e),
    }
}

pub fn jobs(cfg: &AlgebraConfig) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    let c = cfg.clone();
    jobs.push(Box::new(move || {
        let anchors = [
            ("d∘d = 0 on random polynomial forms", "eq.deRham.0"),
            ("d*∘d* = 0 on random polynomial forms", "eq.deRham.1"),
            ("Δ_q u + componentwise Laplacian u = 0", "eq.Laplace.1"),
            ("matrix action by wedge formula equals matrix product", "eq.multip"),
        ];
        match corpus_checks(c.n, c.corpus_size, c.seed) {
            Ok(o) => {
                let fails = [o.dd_failures, o.codiff_failures, o.laplace_failures, o.matrix_failures];
                anchors
                    .iter()
                    .zip(fails)
                    .map(|((name, anchor), f)| {
                        CheckRecord::pass_if(*name, *anchor, f == 0).metric("forms", o.forms).metric("failures", f)
                    })
                    .collect()
            }
            Err(e) => anchors.iter().map(|(name, anchor)| CheckRecord::from_error(*name, *anchor, &e)).collect(),
        }
    }));
    let c = cfg.clone();
    jobs.push(Box::new(move || {
        let name = "d Φ = Φ d and d* Φ = Φ d* normalize to zero";
        vec![match commutation_check(&c.rewriter()) {
            Ok(bad) => CheckRecord::pass_if(name, "eq.deRham.2", bad.is_empty()).metric("violations", bad.join("; ")),
            Err(e) => CheckRecord::from_error(name, "eq.deRham.2", &e),
        }]
    }));
    for (q, coeff) in cfg.coefficient_sets(usize::MAX) {
        let c = cfg.clone();
        jobs.push(Box::new(move || {
            let names = [
                format!("S Ψ^(r) = I, q={q}, {}", label(coeff)),
                format!("Ψ^(l) S = I, q={q}, {}", label(coeff)),
            ];
            match inverse_residuals(&c.rewriter(), q, coeff) {
                Ok((right, left)) => vec![
                    record_block(names[0].clone(), "Lemma l.3, eq.fund.ide.11", Ok(right)),
                    record_block(names[1].clone(), "Lemma l.3, eq.fund.ide.11.left", Ok(left)),
                ],
                Err(e) => names.iter().map(|nm| CheckRecord::from_error(nm.clone(), "Lemma l.3", &e)).collect(),
            }
        }));
    }
    for (q, coeff) in cfg.coefficient_sets(2).into_iter().filter(|(_, c)| *c == Coefficients::Abstract) {
        let c = cfg.clone();
        jobs.push(Box::new(move || {
            let a_anchor = if q == 1 { "eq.A1" } else { "eq.Aq" };
            let specs = [
                (format!("A = I − Ψ^(r) S matches the closed form, q={q}"), a_anchor),
                (format!("S A = 0, q={q}"), "eq.bilateral.Aq"),
                (format!("S (Ψ^(r) + A Ψ^(r)*) = I, q={q}"), "eq.bilateral.1q"),
                (format!("(Ψ^(r) + A Ψ^(r)*) S = I, q={q}"), "eq.bilateral.1q"),
            ];
            match bilateral_residuals(&c.rewriter(), q, coeff) {
                Ok(blocks) => specs
                    .into_iter()
                    .zip(blocks)
                    .map(|((name, anchor), m)| record_block(name, anchor, Ok(m)))
                    .collect(),
                Err(e) => specs.into_iter().map(|(name, anchor)| CheckRecord::from_error(name, anchor, &e)).collect(),
            }
        }));
    }
    for &q in &cfg.qs {
        let c = cfg.clone();
        jobs.push(Box::new(move || {
            let r = c.rewriter();
            (1..=q)
                .flat_map(|j0| match verify_solution_system(&r, q, j0) {
                    Ok(list) => list
                        .into_iter()
                        .map(|d| {
                            let status = match d.status {
                                DerivationStatus::Reduced => super::report::CheckStatus::Pass,
                                DerivationStatus::Stuck => super::report::CheckStatus::Stuck,
                            };
                            let mut rec = CheckRecord::new(format!("{} (q={q}, j0={j0})", d.name), d.anchor, status);
                            if let Some(note) = d.note {
                                rec = rec.metric("note", note);
                            }
                            if !d.residual.is_empty() {
                                rec = rec.metric("residual", format!("{:?}", d.residual));
                            }
                            rec
                        })
                        .collect::<Vec<_>>(),
                    Err(e) => vec![CheckRecord::from_error(format!("S u = 0 consequences (q={q}, j0={j0})"), "Prop p.0", &e)],
                })
                .collect()
        }));
    }
    let c = cfg.clone();
    jobs.push(Box::new(move || {
        let r = c.rewriter();
        PsiMutation::ALL
            .iter()
            .map(|&m| {
                let name = format!("negative control: {}", m.name());
                let mut broken_at = Vec::new();
                for q in 1..=c.n.min(3) {
                    match mutated_residual(&r, q, m) {
                        Ok(res) if !res.is_zero() => broken_at.push(q),
                        Ok(_) => {}
                        Err(e) => return CheckRecord::from_error(name, "Lemma l.3", &e),
                    }
                }
                let ids: Vec<String> = broken_at.iter().map(|q| q.to_string()).collect();
                CheckRecord::pass_if(name, "Lemma l.3", !broken_at.is_empty()).metric("lemma_fails_at_q", ids.join(","))
            })
            .collect()
    }));
    jobs
}
