//! Counting functions `m_n` of finite windows of a biinfinite word.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::{count_windows, ApproximateCurrent, CurrentTable};
use crate::error::{Error, Result};
use crate::free_group::Word;
use crate::laminations::LeafDescription;
use crate::rational::{self, Rational};

/// `m_n` for a window `Z` of length `2n+1`: occurrences in `Z` and `Z⁻¹`
/// divided by `4n+2`, with tolerance `1/(2n+1)`.
pub fn counting_current(z: &Word, depth: usize) -> Result<ApproximateCurrent> {
    let len = z.len();
    if len.is_multiple_of(2) {
        return Err(Error::EvenWindow(len));
    }
    if depth == 0 || depth > len {
        return Err(Error::DepthOverflow { requested: depth, available: len });
    }
    let denominator = 2 * len as i64;
    let rank = z.rank();
    let mut counts: BTreeMap<Word, u64> = BTreeMap::new();
    for side in [z.clone(), z.inverse()] {
        for (window, c) in count_windows(side.letters(), false, depth) {
            *counts.entry(Word::from_reduced_unchecked(rank, window)).or_insert(0) += c;
        }
    }
    let values = counts.into_iter().map(|(w, c)| (w, rational::ratio(c as i64, denominator))).collect();
    let table = CurrentTable::new(rank, depth, values)?;
    ApproximateCurrent::new(table, rational::ratio(1, len as i64))
}

/// Spread of one word's value over the tail of a counting sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordRange {
    pub word: Word,
    pub min: Rational,
    pub max: Rational,
}

#[derive(Clone, Debug)]
pub struct CountingLimit {
    /// `(n, m_n)` with window length `2n+1`.
    pub steps: Vec<(usize, ApproximateCurrent)>,
    /// Per-word ranges over the last half of `steps`.
    pub ranges: Vec<WordRange>,
}

impl CountingLimit {
    pub fn last(&self) -> &ApproximateCurrent {
        &self.steps.last().expect("nonempty").1
    }

    /// Largest `max − min` over all words.
    pub fn spread(&self) -> Rational {
        self.ranges.iter().map(|r| &r.max - &r.min).max().unwrap_or_else(Rational::zero)
    }
}

/// Counting functions of the central windows `Z_n` of a leaf, for
/// `n = max(1, L)·2^(k−1)`, `k = 1..=n_steps`.
pub fn counting_limit(leaf: &LeafDescription, depth: usize, n_steps: usize) -> Result<CountingLimit> {
    if n_steps == 0 {
        return Err(Error::EmptyInput("counting_limit needs at least one step"));
    }
    let mut steps = Vec::with_capacity(n_steps);
    for k in 0..n_steps {
        let n = depth.max(1) << k;
        let z = leaf.central_window(n)?;
        steps.push((n, counting_current(&z, depth)?));
    }
    let tail = &steps[n_steps / 2..];
    let words: BTreeSet<&Word> = tail.iter().flat_map(|(_, m)| m.values().keys()).collect();
    let ranges = words
        .into_iter()
        .map(|w| {
            let vals: Vec<Rational> = tail.iter().map(|(_, m)| m.value(w)).collect();
            WordRange {
                word: w.clone(),
                min: vals.iter().min().cloned().unwrap_or_else(Rational::zero),
                max: vals.iter().max().cloned().unwrap_or_else(Rational::zero),
            }
        })
        .collect();
    Ok(CountingLimit { steps, ranges })
}
