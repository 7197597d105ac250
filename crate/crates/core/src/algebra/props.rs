use proptest::prelude::*;

use super::expr::Expr;
use super::generator::{word_type, Gen, Word};
use super::rewrite::{Rewriter, Strategy as RewriteStrategy};

const N: usize = 4;

/// Generators whose source degree is `c`: `d, d*, Φ`, or `d, d*, Φ_μ, M, M̃`.
fn gens_from(c: usize, with_mu: bool) -> Vec<Gen> {
    let mut out = if with_mu { vec![] } else { vec![Gen::Phi(c)] };
    if c < N {
        out.push(Gen::D(c));
    }
    if c >= 1 {
        out.push(Gen::Ds(c - 1));
    }
    if with_mu {
        out.push(Gen::PhiMu(c));
        if c >= 1 {
            out.push(Gen::M(c - 1));
        }
        if c < N {
            out.push(Gen::Mt(c + 1));
        }
    }
    out
}

/// Builds a typed word from right to left out of raw choices.
fn typed_word(start: usize, picks: &[usize], with_mu: bool) -> Word {
    let mut c = start;
    let mut rev = Vec::new();
    for &p in picks {
        let opts = gens_from(c, with_mu);
        let g = opts[p % opts.len()];
        c = g.target();
        rev.push(g);
    }
    rev.reverse();
    rev
}

fn expr_from(start: usize, raw: &[(i64, Vec<usize>)], with_mu: bool) -> Option<Expr> {
    let words: Vec<(Word, i64)> = raw.iter().map(|(c, p)| (typed_word(start, p, with_mu), *c)).collect();
    let (s, t) = match word_type(&words[0].0).ok()? {
        Some(ty) => ty,
        None => (start, start),
    };
    let same: Vec<_> = words
        .into_iter()
        .filter(|(w, _)| word_type(w).ok().flatten().unwrap_or((start, start)) == (s, t))
        .collect();
    Expr::from_terms(s, t, same).ok()
}

fn raw_expr() -> impl proptest::strategy::Strategy<Value = (usize, Vec<(i64, Vec<usize>)>)> {
    (0..=N, prop::collection::vec((-3i64..=3, prop::collection::vec(0usize..6, 0..7)), 1..4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalize_is_idempotent((start, raw) in raw_expr(), mu in any::<bool>()) {
        let Some(e) = expr_from(start, &raw, mu) else { return Ok(()); };
        let r = Rewriter::new(N);
        let once = r.normalize(&e).unwrap();
        prop_assert_eq!(r.normalize(&once).unwrap(), once.clone());
        prop_assert!(r.is_normal(&once));
    }

    #[test]
    fn strategies_reach_the_same_normal_form((start, raw) in raw_expr(), mu in any::<bool>()) {
        let Some(e) = expr_from(start, &raw, mu) else { return Ok(()); };
        let left = Rewriter::new(N).normalize(&e).unwrap();
        let right = Rewriter::new(N).with_strategy(RewriteStrategy::Rightmost).normalize(&e).unwrap();
        prop_assert_eq!(left, right, "expr {}", e);
    }

    #[test]
    fn adjoint_is_an_involution((start, raw) in raw_expr(), mu in any::<bool>()) {
        let Some(e) = expr_from(start, &raw, mu) else { return Ok(()); };
        prop_assert_eq!(e.adjoint().adjoint(), e.clone());
        prop_assert_eq!((e.adjoint().source(), e.adjoint().target()), (e.target(), e.source()));
    }

    #[test]
    fn adjoint_commutes_with_normalize_without_mu((start, raw) in raw_expr()) {
        let Some(e) = expr_from(start, &raw, false) else { return Ok(()); };
        let r = Rewriter::new(N);
        prop_assert_eq!(r.normalize(&e.adjoint()).unwrap(), r.normalize(&e).unwrap().adjoint());
    }

    #[test]
    fn adjoint_commutes_with_normalize_modulo_reduction((start, raw) in raw_expr()) {
        let Some(e) = expr_from(start, &raw, true) else { return Ok(()); };
        let r = Rewriter::new(N);
        let a = r.normalize(&e.adjoint()).unwrap();
        let b = r.normalize(&r.normalize(&e).unwrap().adjoint()).unwrap();
        prop_assert_eq!(a, b, "expr {}", e);
    }

    #[test]
    fn ill_typed_words_are_rejected(word in prop::collection::vec((0usize..6, 0usize..=N), 2..6)) {
        let gens: Word = word
            .iter()
            .map(|&(kind, k)| match kind {
                0 => Gen::D(k),
                1 => Gen::Ds(k),
                2 => Gen::Phi(k),
                3 => Gen::PhiMu(k),
                4 => Gen::M(k),
                _ => Gen::Mt(k.max(1)),
            })
            .collect();
        let consistent = gens.windows(2).all(|p| p[0].source() == p[1].target());
        prop_assert_eq!(word_type(&gens).is_ok(), consistent);
        prop_assert_eq!(Expr::word(gens.clone()).is_ok(), consistent);
        if !consistent {
            let last = *gens.last().unwrap();
            let e = Expr::gen(last).unwrap();
            let head = Expr::word(gens[..gens.len() - 1].to_vec());
            if let Ok(h) = head {
                prop_assert!(h.compose(&e).is_err() || h.source() == e.target());
            }
        }
    }
}
