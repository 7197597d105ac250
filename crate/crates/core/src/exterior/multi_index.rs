use std::fmt;

use crate::error::{Error, Result};

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Strictly increasing tuple `(i_1, …, i_q)` with entries in `1..=n`,
/// labelling the basis form `dx_{i_1} ∧ … ∧ dx_{i_q}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    n: usize,
    indices: Vec<usize>,
}

impl MultiIndex {
    pub fn new(n: usize, indices: Vec<usize>) -> Result<Self> {
        let increasing = indices.windows(2).all(|w| w[0] < w[1]);
        let in_range = indices.iter().all(|&i| i >= 1 && i <= n);
        if !increasing || !in_range || indices.len() > n {
            return Err(Error::InvalidMultiIndex(indices));
        }
        Ok(Self { n, indices })
    }

    /// The empty multi-index (degree 0).
    pub fn empty(n: usize) -> Self {
        Self { n, indices: Vec::new() }
    }

    /// The full multi-index `(1, …, n)`.
    pub fn full(n: usize) -> Self {
        Self { n, indices: (1..=n).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// All multi-indices of degree `q` in lexicographic order.
    pub fn all(n: usize, q: usize) -> Vec<MultiIndex> {
        let mut out = Vec::with_capacity(binomial(n, q));
        if q > n {
            return out;
        }
        let mut cur: Vec<usize> = (1..=q).collect();
        loop {
            out.push(MultiIndex { n, indices: cur.clone() });
            // advance to the next combination
            let mut pos = q;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                if cur[pos] < n - (q - 1 - pos) {
                    cur[pos] += 1;
                    for j in pos + 1..q {
                        cur[j] = cur[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// Position of this multi-index in the lexicographic list of its degree.
    pub fn rank(&self) -> usize {
        let q = self.degree();
        let mut rank = 0;
        let mut prev = 0;
        for (pos, &i) in self.indices.iter().enumerate() {
            for skipped in prev + 1..i {
                rank += binomial(self.n - skipped, q - pos - 1);
            }
            prev = i;
        }
        rank
    }

    /// Complementary multi-index `{1..n} \ I`, increasing.
    pub fn complement(&self) -> MultiIndex {
        let indices = (1..=self.n).filter(|i| !self.contains(*i)).collect();
        MultiIndex { n: self.n, indices }
    }

    /// Sign and sorted multi-index of `dx_I ∧ dx_J`, or `None` when the
    /// two share an index.
    pub fn wedge(&self, other: &MultiIndex) -> Option<(i32, MultiIndex)> {
        let mut seq: Vec<usize> = self.indices.iter().chain(other.indices.iter()).copied().collect();
        let sign = sort_sign(&mut seq)?;
        Some((sign, MultiIndex { n: self.n, indices: seq }))
    }

    /// `⋆dx_I = sign · dx_{I^c}` with the orientation `dx_1 ∧ … ∧ dx_n`.
    pub fn star(&self) -> (i32, MultiIndex) {
        let c = self.complement();
        let (sign, _) = self.wedge(&c).expect("complement is disjoint");
        (sign, c)
    }
}

/// Sorts `seq` in place by adjacent transpositions and returns the sign of
/// the permutation, or `None` if an entry repeats.
pub fn sort_sign(seq: &mut [usize]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..seq.len() {
        let mut j = i;
        while j > 0 && seq[j - 1] > seq[j] {
            seq.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && seq[j - 1] == seq[j] {
            return None;
        }
    }
    if seq.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.indices.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.indices.iter().map(|i| format!("dx{i}")).collect();
        write!(f, "{}", parts.join("∧"))
    }
}
