use std::fmt;

use crate::error::{Error, Result};

/// Typed operator generator. The subscript is the one used in the text:
/// `d_q : q → q+1`, `d*_q : q+1 → q`, `M_q` acts on `(q+1)`-forms and
/// `M̃_q` on `(q−1)`-forms, `Φ_q` and `Φ_{q,μ}` act on `q`-forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    D(usize),
    Ds(usize),
    Phi(usize),
    PhiMu(usize),
    M(usize),
    Mt(usize),
}

impl Gen {
    pub fn source(self) -> usize {
        match self {
            Gen::D(q) | Gen::Phi(q) | Gen::PhiMu(q) => q,
            Gen::Ds(q) | Gen::M(q) => q + 1,
            Gen::Mt(q) => q - 1,
        }
    }

    pub fn target(self) -> usize {
        match self {
            Gen::D(q) | Gen::M(q) => q + 1,
            Gen::Ds(q) | Gen::Phi(q) | Gen::PhiMu(q) => q,
            Gen::Mt(q) => q - 1,
        }
    }

    pub fn subscript(self) -> usize {
        match self {
            Gen::D(q) | Gen::Ds(q) | Gen::Phi(q) | Gen::PhiMu(q) | Gen::M(q) | Gen::Mt(q) => q,
        }
    }

    /// Validates the subscript (`M̃_0` does not exist).
    pub fn checked(self) -> Result<Self> {
        if let Gen::Mt(0) = self {
            return Err(Error::IllTyped("Mt0 acts on (−1)-forms".into()));
        }
        Ok(self)
    }

    /// Formal adjoint: `d ↔ d*`, everything else is self-adjoint.
    pub fn adjoint(self) -> Gen {
        match self {
            Gen::D(q) => Gen::Ds(q),
            Gen::Ds(q) => Gen::D(q),
            g => g,
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::D(q) => write!(f, "d{q}"),
            Gen::Ds(q) => write!(f, "ds{q}"),
            Gen::Phi(q) => write!(f, "Phi{q}"),
            Gen::PhiMu(q) => write!(f, "PhiMu{q}"),
            Gen::M(q) => write!(f, "M{q}"),
            Gen::Mt(q) => write!(f, "Mt{q}"),
        }
    }
}

/// Composition `w[0] ∘ w[1] ∘ … ∘ w[k−1]`: the last generator acts first.
pub type Word = Vec<Gen>;

/// Checks that consecutive generators compose and returns
/// `(source, target)` of the word.
pub fn word_type(word: &[Gen]) -> Result<Option<(usize, usize)>> {
    for w in word.windows(2) {
        if w[0].source() != w[1].target() {
            return Err(Error::IllTyped(format!(
                "{} expects degree {} but {} produces degree {}",
                w[0],
                w[0].source(),
                w[1],
                w[1].target()
            )));
        }
    }
    Ok(match (word.first(), word.last()) {
        (Some(first), Some(last)) => Some((last.source(), first.target())),
        _ => None,
    })
}
