use std::collections::BTreeMap;
use std::fmt;

use super::generator::{word_type, Gen, Word};
use crate::error::{Error, Result};

/// Formal integer combination of degree-consistent operator words, all
/// mapping `source`-forms to `target`-forms. The empty word is `I`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Expr {
    source: usize,
    target: usize,
    terms: BTreeMap<Word, i64>,
}

impl Expr {
    pub fn zero(source: usize, target: usize) -> Self {
        Self { source, target, terms: BTreeMap::new() }
    }

    pub fn identity(degree: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), 1);
        Self { source: degree, target: degree, terms }
    }

    pub fn gen(g: Gen) -> Result<Self> {
        Self::word(vec![g.checked()?])
    }

    /// A single word with coefficient 1. The empty word needs a degree, use
    /// [`Expr::identity`].
    pub fn word(word: Word) -> Result<Self> {
        for g in &word {
            g.checked()?;
        }
        let (source, target) = word_type(&word)?.ok_or_else(|| Error::IllTyped("empty word has no degree".into()))?;
        let mut terms = BTreeMap::new();
        terms.insert(word, 1);
        Ok(Self { source, target, terms })
    }

    /// Builds from raw terms, checking every word against the declared type.
    pub fn from_terms(source: usize, target: usize, raw: impl IntoIterator<Item = (Word, i64)>) -> Result<Self> {
        let mut e = Self::zero(source, target);
        for (w, c) in raw {
            match word_type(&w)? {
                Some((s, t)) if s == source && t == target => {}
                None if source == target => {}
                _ => return Err(Error::IllTyped(format!("word {} does not map {source} → {target}", show_word(&w)))),
            }
            e.add_term(w, c);
        }
        Ok(e)
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn terms(&self) -> &BTreeMap<Word, i64> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Word, i64> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_term(&mut self, w: Word, c: i64) {
        add_into(&mut self.terms, w, c);
    }

    fn check_parallel(&self, other: &Expr) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::IllTyped(format!(
                "cannot add {}→{} and {}→{}",
                self.source, self.target, other.source, other.target
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Expr) -> Result<Expr> {
        self.check_parallel(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Expr) -> Result<Expr> {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Expr {
        let mut out = Expr::zero(self.source, self.target);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c * k);
        }
        out
    }

    pub fn neg(&self) -> Expr {
        self.scale(-1)
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &Expr) -> Result<Expr> {
        if self.source != other.target {
            return Err(Error::IllTyped(format!(
                "cannot compose {}→{} after {}→{}",
                self.source, self.target, other.source, other.target
            )));
        }
        let mut out = Expr::zero(other.source, self.target);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(w, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Chains `self ∘ g` for a single generator.
    pub fn then_apply_after(&self, g: Gen) -> Result<Expr> {
        self.compose(&Expr::gen(g)?)
    }

    /// Formal adjoint: reverses words and swaps `d ↔ d*`.
    pub fn adjoint(&self) -> Expr {
        let mut out = Expr::zero(self.target, self.source);
        for (w, c) in &self.terms {
            out.add_term(w.iter().rev().map(|g| g.adjoint()).collect(), *c);
        }
        out
    }
}

pub(crate) fn add_into(terms: &mut BTreeMap<Word, i64>, w: Word, c: i64) {
    if c == 0 {
        return;
    }
    let entry = terms.entry(w.clone()).or_insert(0);
    *entry += c;
    if *entry == 0 {
        terms.remove(&w);
    }
}

pub fn show_word(w: &[Gen]) -> String {
    if w.is_empty() {
        return "I".into();
    }
    w.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            let sign = if *c < 0 { "-" } else { "+" };
            if k == 0 {
                if *c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            if a != 1 {
                write!(f, "{a} ")?;
            }
            write!(f, "{}", show_word(w))?;
        }
        Ok(())
    }
}

/// Shorthand for building words in code: `w(&[Gen::D(0), Gen::Phi(0)])`.
pub fn w(gens: &[Gen]) -> Result<Expr> {
    Expr::word(gens.to_vec())
}
