use std::collections::BTreeMap;

use super::expr::{add_into, Expr};
use super::generator::{Gen, Word};
use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Which redex is contracted first when a word has several.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

/// Oriented rule set for words over `d, d*, Φ, Φ_μ, M, M̃` in ambient
/// dimension `n`.
///
/// Rules, with `P_k = d*_k M_k d_k` and `Q_k = d_{k−1} M̃_k d*_{k−1}`:
///
/// * `d_k = 0`, `d*_k = 0` for `k ≥ n`; `d_{k+1} d_k = 0`, `d*_k d*_{k+1} = 0`;
/// * `d*_{k−1} Φ_{k,μ} d*_k = 0`, `d_k Φ_{k,μ} d_{k−1} = 0`;
/// * `Φ_{k+1} d_k → d_k Φ_k`, `d*_k Φ_{k+1} → Φ_k d*_k`, so `Φ` settles
///   between the `d`s on its left and the `d*`s on its right;
/// * `d*_k d_k Φ_k → I − d_{k−1} Φ_{k−1} d*_{k−1}` and
///   `Φ_k d*_k d_k → I − d_{k−1} Φ_{k−1} d*_{k−1}` (just `I` for `k = 0`),
///   `d_{n−1} Φ_{n−1}^m d*_{n−1} → Φ_n^{m−1}`;
/// * `Φ_{k,μ} X → X Φ_{k,μ}` for `X` one of `P_k`, `Q_k` and
///   `d_{k−1} Φ_{k−1} d*_{k−1}`;
/// * `P_k Φ_{k,μ} → I − Q_k Φ_{k,μ}` (just `I` for `k = 0`),
///   `Q_k Φ_{k,μ} → d_{k−1} Φ_{k−1} d*_{k−1}` (both are the projection
///   onto exact forms), with the variants
///   `d_{k−1} Φ_{k−1}^m M̃_k d*_{k−1} Φ_{k,μ} → d_{k−1} Φ_{k−1}^{m+1} d*_{k−1}` and
///   `Φ_{k,μ} d_{k−1} M̃_k Φ_{k−1}^m d*_{k−1} → d_{k−1} Φ_{k−1}^{m+1} d*_{k−1}`
///   where `Φ` has already moved inside `Q_k`, and
///   `d_{k−1} Φ_{k−1} d*_{k−1} Φ_{k,μ}^m d_{k−1} → Φ_{k,μ}^m d_{k−1}`
///   for `m ≥ 1`.
///
/// Cancellation rules replace one word of a two-term pattern such as
/// `(P + Q)Φ_μ = I` by the other, which is the same as cancelling the pair
/// in the term multiset. The `Φ` rules are closed under the adjoint; the
/// `Φ_μ` commutations are not, since their adjoints would undo them.
#[derive(Clone, Debug)]
pub struct Rewriter {
    n: usize,
    budget: usize,
    strategy: Strategy,
    corrupt: bool,
}

type Replacement = Vec<(Word, i64)>;

impl Rewriter {
    pub fn new(n: usize) -> Self {
        Self { n, budget: DEFAULT_BUDGET, strategy: Strategy::Leftmost, corrupt: false }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    /// Negative control: flips the sign of the `d Φ d*` term in the
    /// `Δ_k Φ_k = I` cancellation.
    pub fn corrupted(mut self) -> Self {
        self.corrupt = true;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Rewrites to a fixed point of the rule set.
    pub fn normalize(&self, e: &Expr) -> Result<Expr> {
        let mut pending: BTreeMap<Word, i64> = e.terms().clone();
        let mut done: BTreeMap<Word, i64> = BTreeMap::new();
        let mut steps = 0usize;
        while let Some((word, c)) = pending.pop_first() {
            match self.step(&word) {
                None => add_into(&mut done, word, c),
                Some(rep) => {
                    steps += 1;
                    if steps > self.budget {
                        return Err(Error::BudgetExceeded(self.budget));
                    }
                    for (w, k) in rep {
                        add_into(&mut pending, w, c * k);
                    }
                }
            }
        }
        Expr::from_terms(e.source(), e.target(), done)
    }

    pub fn is_normal(&self, e: &Expr) -> bool {
        e.terms().keys().all(|w| self.step(w).is_none())
    }

    /// One rewrite of `word`. Rule classes are tried in order (annihilators,
    /// then `Φ` rules, then `Φ_μ` rules); within a class the strategy picks
    /// the position.
    fn step(&self, word: &[Gen]) -> Option<Replacement> {
        for class in [RuleClass::Vanish, RuleClass::Phi, RuleClass::PhiMu] {
            let positions: Box<dyn Iterator<Item = usize>> = match self.strategy {
                Strategy::Leftmost => Box::new(0..word.len()),
                Strategy::Rightmost => Box::new((0..word.len()).rev()),
            };
            for p in positions {
                if let Some((len, rep)) = self.redex_at(&word[p..], class) {
                    let out = rep
                        .into_iter()
                        .map(|(mid, k)| {
                            let mut w = word[..p].to_vec();
                            w.extend(mid);
                            w.extend_from_slice(&word[p + len..]);
                            (w, k)
                        })
                        .collect();
                    return Some(out);
                }
            }
        }
        None
    }

    /// Matches a rule of `class` at the start of `s`; returns the matched
    /// length and the replacement.
    fn redex_at(&self, s: &[Gen], class: RuleClass) -> Option<(usize, Replacement)> {
        match class {
            RuleClass::Vanish => self.vanish_at(s).map(|len| (len, Vec::new())),
            RuleClass::Phi => self.phi_at(s),
            RuleClass::PhiMu => self.phi_mu_at(s),
        }
    }

    fn vanish_at(&self, s: &[Gen]) -> Option<usize> {
        use Gen::*;
        match *s {
            [D(k) | Ds(k), ..] if k >= self.n => Some(1),
            [D(a), D(b), ..] if a == b + 1 => Some(2),
            [Ds(a), Ds(b), ..] if b == a + 1 => Some(2),
            [Ds(a), PhiMu(b), Ds(c), ..] if b == a + 1 && c == b => Some(3),
            [D(a), PhiMu(b), D(c), ..] if a == b && c + 1 == b => Some(3),
            _ => None,
        }
    }

    fn phi_at(&self, s: &[Gen]) -> Option<(usize, Replacement)> {
        use Gen::*;
        let n = self.n;
        // I − d_{k−1} Φ_{k−1} d*_{k−1}, or I alone at k = 0
        let complement = |k: usize, corrupt: bool| {
            let mut rep = vec![(Vec::new(), 1)];
            if k >= 1 {
                rep.push((vec![D(k - 1), Phi(k - 1), Ds(k - 1)], if corrupt { 1 } else { -1 }));
            }
            rep
        };
        match *s {
            [Phi(a), D(b), ..] if a == b + 1 => Some((2, vec![(vec![D(b), Phi(b)], 1)])),
            [Ds(a), Phi(b), ..] if b == a + 1 => Some((2, vec![(vec![Phi(a), Ds(a)], 1)])),
            [Ds(a), D(b), Phi(c), ..] if a == b && b == c => Some((3, complement(a, self.corrupt))),
            [Phi(a), Ds(b), D(c), ..] if a == b && b == c => Some((3, complement(a, self.corrupt))),
            [D(a), Phi(b), ..] if a == b && a + 1 == n => {
                let m = s[1..].iter().take_while(|g| **g == Phi(a)).count();
                (s.get(1 + m) == Some(&Ds(a))).then(|| (2 + m, vec![(vec![Phi(n); m - 1], 1)]))
            }
            _ => None,
        }
    }

    fn phi_mu_at(&self, s: &[Gen]) -> Option<(usize, Replacement)> {
        use Gen::*;
        if let [PhiMu(k), rest @ ..] = s {
            let k = *k;
            if starts_with_p(rest, k) || starts_with_q(rest, k) || starts_with_exact_projection(rest, k) {
                let mut w = rest[..3].to_vec();
                w.push(PhiMu(k));
                return Some((4, vec![(w, 1)]));
            }
        }
        if let [Ds(k), M(_), D(_), PhiMu(_), ..] = *s {
            if starts_with_p(s, k) && s[3] == PhiMu(k) {
                let mut rep = vec![(Vec::new(), 1)];
                if k >= 1 {
                    rep.push((vec![D(k - 1), Mt(k), Ds(k - 1), PhiMu(k)], -1));
                }
                return Some((4, rep));
            }
        }
        if let [D(_), Mt(k), Ds(_), PhiMu(_), ..] = *s {
            if starts_with_q(s, k) && s[3] == PhiMu(k) {
                return Some((4, vec![(vec![D(k - 1), Phi(k - 1), Ds(k - 1)], 1)]));
            }
        }
        // Φ_{k−1}^m M̃_k with Φ already moved inside Q_k
        if let [D(a), ..] = *s {
            let k = a + 1;
            let m = s[1..].iter().take_while(|g| **g == Phi(a)).count();
            if m >= 1 && s[1 + m..].starts_with(&[Mt(k), Ds(a), PhiMu(k)]) {
                let mut w = vec![D(a)];
                w.extend(vec![Phi(a); m + 1]);
                w.push(Ds(a));
                return Some((4 + m, vec![(w, 1)]));
            }
        }
        if let [PhiMu(k), D(a), Mt(b), ..] = *s {
            let m = s[3..].iter().take_while(|g| **g == Phi(a)).count();
            if k == a + 1 && b == k && m >= 1 && s.get(3 + m) == Some(&Ds(a)) {
                let mut w = vec![D(a)];
                w.extend(vec![Phi(a); m + 1]);
                w.push(Ds(a));
                return Some((4 + m, vec![(w, 1)]));
            }
        }
        if let [D(a), Phi(b), Ds(c), PhiMu(k), ..] = *s {
            if a == b && b == c && k == a + 1 {
                let m = s[3..].iter().take_while(|g| **g == PhiMu(k)).count();
                if s.get(3 + m) == Some(&D(a)) {
                    let mut w = vec![PhiMu(k); m];
                    w.push(D(a));
                    return Some((4 + m, vec![(w, 1)]));
                }
            }
        }
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RuleClass {
    Vanish,
    Phi,
    PhiMu,
}

/// `s` starts with `d*_k M_k d_k`.
fn starts_with_p(s: &[Gen], k: usize) -> bool {
    matches!(s, [Gen::Ds(a), Gen::M(b), Gen::D(c), ..] if *a == k && *b == k && *c == k)
}

/// `s` starts with `d_{k−1} Φ_{k−1} d*_{k−1}`.
fn starts_with_exact_projection(s: &[Gen], k: usize) -> bool {
    k >= 1 && matches!(s, [Gen::D(a), Gen::Phi(b), Gen::Ds(c), ..] if *a + 1 == k && *b + 1 == k && *c + 1 == k)
}

/// `s` starts with `d_{k−1} M̃_k d*_{k−1}`.
fn starts_with_q(s: &[Gen], k: usize) -> bool {
    k >= 1 && matches!(s, [Gen::D(a), Gen::Mt(b), Gen::Ds(c), ..] if *a + 1 == k && *b == k && *c + 1 == k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::expr::w;
    use Gen::*;

    #[test]
    fn dd_vanishes() {
        let r = Rewriter::new(3);
        assert!(r.normalize(&w(&[D(1), D(0)]).unwrap()).unwrap().is_zero());
        assert!(r.normalize(&w(&[Ds(0), Ds(1)]).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn laplacian_times_phi_is_identity() {
        let r = Rewriter::new(3);
        let e = w(&[Ds(1), D(1), Phi(1)]).unwrap().add(&w(&[D(0), Ds(0), Phi(1)]).unwrap()).unwrap();
        assert_eq!(r.normalize(&e).unwrap(), Expr::identity(1));
    }

    #[test]
    fn phi_commutes_with_d() {
        let r = Rewriter::new(3);
        let e = w(&[D(1), Phi(1)]).unwrap().sub(&w(&[Phi(2), D(1)]).unwrap()).unwrap();
        assert!(r.normalize(&e).unwrap().is_zero());
    }

    #[test]
    fn top_degree_cancellation() {
        let r = Rewriter::new(2);
        assert_eq!(r.normalize(&w(&[D(1), Ds(1), Phi(2)]).unwrap()).unwrap(), Expr::identity(2));
        let e = w(&[D(1), Mt(2), Ds(1), PhiMu(2)]).unwrap();
        assert_eq!(r.normalize(&e).unwrap(), Expr::identity(2));
        assert!(r.normalize(&w(&[D(2), D(1)]).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn lame_times_phi_mu_is_identity() {
        let r = Rewriter::new(3);
        let e = w(&[Ds(1), M(1), D(1), PhiMu(1)]).unwrap().add(&w(&[D(0), Mt(1), Ds(0), PhiMu(1)]).unwrap()).unwrap();
        assert_eq!(r.normalize(&e).unwrap(), Expr::identity(1));
        let e0 = w(&[Ds(0), M(0), D(0), PhiMu(0)]).unwrap();
        assert_eq!(r.normalize(&e0).unwrap(), Expr::identity(0));
    }

    #[test]
    fn phi_mu_commutes_with_lame_parts() {
        let r = Rewriter::new(3);
        let left = w(&[PhiMu(1), Ds(1), M(1), D(1)]).unwrap();
        let right = w(&[Ds(1), M(1), D(1), PhiMu(1)]).unwrap();
        assert_eq!(r.normalize(&left).unwrap(), r.normalize(&right).unwrap());
    }

    #[test]
    fn strategies_agree_on_critical_overlaps() {
        let words: Vec<Vec<Gen>> = vec![
            vec![Ds(1), D(1), Phi(1), Ds(1)],
            vec![Ds(1), D(1), Phi(1), D(0)],
            vec![Ds(1), M(1), D(1), PhiMu(1), Ds(1), M(1), D(1)],
            vec![Ds(1), M(1), D(1), PhiMu(1), D(0), Mt(1), Ds(0)],
            vec![Ds(0), D(0), Mt(1), Ds(0), PhiMu(1), D(0), Mt(1), Ds(0)],
        ];
        for word in words {
            let e = w(&word).unwrap();
            let a = Rewriter::new(3).normalize(&e).unwrap();
            let b = Rewriter::new(3).with_strategy(Strategy::Rightmost).normalize(&e).unwrap();
            assert_eq!(a, b, "{e}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let r = Rewriter::new(3).with_budget(1);
        let e = w(&[Ds(1), D(1), Phi(1), Ds(1), D(1), Phi(1)]).unwrap();
        assert_eq!(r.normalize(&e), Err(Error::BudgetExceeded(1)));
    }

    #[test]
    fn corrupted_rules_break_the_identity() {
        let r = Rewriter::new(3).corrupted();
        let e = w(&[Ds(1), D(1), Phi(1)]).unwrap().add(&w(&[D(0), Ds(0), Phi(1)]).unwrap()).unwrap();
        assert_ne!(r.normalize(&e).unwrap(), Expr::identity(1));
    }
}
