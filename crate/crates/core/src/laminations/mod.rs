//! Depth-truncated laminary languages and the support map.

mod leaf;

use std::collections::BTreeSet;
use std::fmt::Write as _;

pub use leaf::{language_of_leaf, LeafDescription};
pub(crate) use leaf::prolongable_seed;

use crate::currents::TruncatedCurrent;
use crate::error::{Error, Result};
use crate::free_group::{Letter, Word};

/// Reduced words of length `1..=depth` closed under inversion and subwords,
/// each word shorter than `depth` extending on both sides inside the set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaminaryLanguage {
    rank: usize,
    depth: usize,
    words: BTreeSet<Word>,
}

impl LaminaryLanguage {
    pub fn new(rank: usize, depth: usize, words: BTreeSet<Word>) -> Result<LaminaryLanguage> {
        if depth == 0 {
            return Err(Error::InvalidLanguage("depth must be at least 1".into()));
        }
        let lang = LaminaryLanguage { rank, depth, words };
        if let Some(problem) = lang.first_violation() {
            return Err(Error::InvalidLanguage(problem));
        }
        Ok(lang)
    }

    pub(crate) fn new_unchecked(rank: usize, depth: usize, words: BTreeSet<Word>) -> LaminaryLanguage {
        let lang = LaminaryLanguage { rank, depth, words };
        debug_assert!(lang.first_violation().is_none(), "{:?}", lang.first_violation());
        lang
    }

    fn first_violation(&self) -> Option<String> {
        for w in &self.words {
            if w.rank() != self.rank {
                return Some(format!("{w} has rank {} not {}", w.rank(), self.rank));
            }
            if w.is_empty() || w.len() > self.depth {
                return Some(format!("{w} has length outside 1..={}", self.depth));
            }
            if !self.words.contains(&w.inverse()) {
                return Some(format!("{} missing (inverse of {w})", w.inverse()));
            }
            if w.len() >= 2 {
                for sub in [w.prefix(w.len() - 1), w.suffix(w.len() - 1)] {
                    if !self.words.contains(&sub) {
                        return Some(format!("{sub} missing (subword of {w})"));
                    }
                }
            }
            if w.len() < self.depth {
                let letters = || Letter::alphabet(self.rank);
                if !letters().filter_map(|x| w.extend_right(x)).any(|v| self.words.contains(&v)) {
                    return Some(format!("{w} has no right extension"));
                }
                if !letters().filter_map(|x| w.extend_left(x)).any(|v| self.words.contains(&v)) {
                    return Some(format!("{w} has no left extension"));
                }
            }
        }
        None
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn words(&self) -> &BTreeSet<Word> {
        &self.words
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.words.contains(w)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn restrict(&self, depth: usize) -> Result<LaminaryLanguage> {
        if depth == 0 || depth > self.depth {
            return Err(Error::DepthOverflow { requested: depth, available: self.depth });
        }
        let words = self.words.iter().filter(|w| w.len() <= depth).cloned().collect();
        Ok(LaminaryLanguage { rank: self.rank, depth, words })
    }

    /// Union at the smaller of the two depths.
    pub fn union(&self, other: &LaminaryLanguage) -> Result<LaminaryLanguage> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch(self.rank, other.rank));
        }
        let depth = self.depth.min(other.depth);
        let words = self.words.union(&other.words).filter(|w| w.len() <= depth).cloned().collect();
        Ok(LaminaryLanguage::new_unchecked(self.rank, depth, words))
    }

    /// `rank=`, `depth=`, then one word per line in shortlex order.
    pub fn to_dump(&self) -> String {
        let mut out = format!("rank={}\ndepth={}\n", self.rank, self.depth);
        for w in &self.words {
            writeln!(out, "{w}").expect("writing to a string");
        }
        out
    }

    pub fn parse_dump(text: &str) -> Result<LaminaryLanguage> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let mut header = |key: &str| -> Result<usize> {
            lines
                .next()
                .and_then(|l| l.strip_prefix(key))
                .and_then(|l| l.strip_prefix('='))
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::Format(format!("expected `{key}=` header")))
        };
        let rank = header("rank")?;
        let depth = header("depth")?;
        let words = lines.map(|l| Word::parse(l, rank)).collect::<Result<BTreeSet<Word>>>()?;
        LaminaryLanguage::new(rank, depth, words)
    }

    /// All windows of length `1..=depth` of the given reduced sequences and
    /// their inverses, unvalidated.
    pub(crate) fn factor_set(rank: usize, depth: usize, sequences: &[&[Letter]]) -> BTreeSet<Word> {
        let mut words = BTreeSet::new();
        for seq in sequences {
            for start in 0..seq.len() {
                for end in start + 1..=(start + depth).min(seq.len()) {
                    let w = Word::from_reduced_unchecked(rank, seq[start..end].to_vec());
                    words.insert(w.inverse());
                    words.insert(w);
                }
            }
        }
        words
    }
}

/// Words of positive value.
pub fn support(mu: &TruncatedCurrent) -> LaminaryLanguage {
    LaminaryLanguage::new_unchecked(mu.rank(), mu.depth(), mu.values().keys().cloned().collect())
}

/// Whether every word of `l1` lies in `l2`, compared at the smaller depth.
pub fn is_sublanguage(l1: &LaminaryLanguage, l2: &LaminaryLanguage) -> Result<bool> {
    if l1.rank != l2.rank {
        return Err(Error::RankMismatch(l1.rank, l2.rank));
    }
    let depth = l1.depth.min(l2.depth);
    Ok(l1.words.iter().filter(|w| w.len() <= depth).all(|w| l2.words.contains(w)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitLanguage {
    /// The restrictions are constant from index `since` on.
    Stabilized { language: LaminaryLanguage, since: usize },
    /// The last two restrictions differ; `last_change` is the final index.
    NotStabilized { last_change: usize },
}

/// Eventual value of the depth-`depth` restrictions. The sequence counts as
/// stabilized when its last two restrictions agree.
pub fn limit_language(seq: &[LaminaryLanguage], depth: usize) -> Result<LimitLanguage> {
    let Some(first) = seq.first() else {
        return Err(Error::EmptyInput("limit_language needs a nonempty sequence"));
    };
    let restricted = seq
        .iter()
        .map(|l| {
            if l.rank != first.rank {
                return Err(Error::RankMismatch(first.rank, l.rank));
            }
            l.restrict(depth)
        })
        .collect::<Result<Vec<_>>>()?;
    let n = restricted.len();
    if n >= 2 && restricted[n - 1] != restricted[n - 2] {
        return Ok(LimitLanguage::NotStabilized { last_change: n - 1 });
    }
    let mut since = n - 1;
    while since > 0 && restricted[since - 1] == restricted[n - 1] {
        since -= 1;
    }
    Ok(LimitLanguage::Stabilized { language: restricted[n - 1].clone(), since })
}
