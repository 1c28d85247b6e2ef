//! The action of automorphisms on currents.
//!
//! `α_*μ(w)` is the expected number of occurrences of `w` in `α(X)` that start
//! at a surviving letter of the image of `X₀`, for `X` distributed by `μ`. The
//! engine explores finite windows `W ∋ X₀` of `μ`'s support: letters of the
//! reduced image of `W` farther than the cancellation constant from both ends
//! are letters of `α(X)` for every `X` through `W`, which decides most
//! occurrences, and undecided windows are refined one letter at a time.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

use num_traits::Zero;
use rayon::prelude::*;

use crate::currents::{rational_current, CheckMode, CurrentTable, KolmogorovReport, TruncatedCurrent};
use crate::error::{Error, Result};
use crate::free_group::{Automorphism, Letter, Word};
use crate::rational::{self, Rational};

/// Default total refinement budget for [`push_general`].
pub const DEFAULT_BUDGET: usize = 2_000_000;

/// An interval `[lower, lower + undecided]` containing the true value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedValue {
    pub lower: Rational,
    pub undecided: Rational,
}

impl CertifiedValue {
    pub fn upper(&self) -> Rational {
        &self.lower + &self.undecided
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lower <= x && *x <= self.upper()
    }

    pub fn overlaps(&self, other: &CertifiedValue) -> bool {
        self.lower <= other.upper() && other.lower <= self.upper()
    }

    pub fn is_exact(&self) -> bool {
        self.undecided.is_zero()
    }

    /// `word<TAB>lower<TAB>undecided`.
    pub fn to_line(&self, word: &Word) -> String {
        format!("{word}\t{}\t{}", rational::format(&self.lower), rational::format(&self.undecided))
    }
}

/// `μ_{α(w)}` at depth `depth`.
pub fn push_rational(alpha: &Automorphism, w: &Word, depth: usize) -> Result<TruncatedCurrent> {
    if w.is_empty() {
        return Err(Error::EmptyWord("push_rational"));
    }
    rational_current(&alpha.apply(w)?, depth)
}

/// The cancellation constant used for `α` on `μ`: zero when `α` is positive
/// and every leaf of `μ` is single-signed, the certified constant otherwise.
pub fn effective_cancellation(alpha: &Automorphism, mu: &CurrentTable) -> Result<usize> {
    if alpha.is_positive() && !mu.has_mixed_sign_support() {
        Ok(0)
    } else {
        alpha.cancellation_bound()
    }
}

#[derive(Clone, Debug)]
struct Window {
    letters: Vec<Letter>,
    anchor: usize,
    mass: Rational,
    // indexed by offset in the anchor letter's image
    decided: Vec<Option<bool>>,
}

impl Window {
    fn undecided(&self) -> usize {
        self.decided.iter().filter(|d| d.is_none()).count()
    }

    fn hits(&self) -> usize {
        self.decided.iter().filter(|d| **d == Some(true)).count()
    }
}

enum Side {
    Left,
    Right,
}

struct Engine<'a> {
    alpha: &'a Automorphism,
    mu: &'a CurrentTable,
    target: &'a [Letter],
    cancellation: usize,
}

impl Engine<'_> {
    /// Decides what it can; returns the side to extend if anything is left.
    fn evaluate(&self, win: &mut Window) -> Option<Side> {
        let image = self.alpha.apply_traced(&win.letters);
        let m = image.len();
        let stable_end = m.saturating_sub(self.cancellation);
        let mut need_left = false;
        for (offset, slot) in win.decided.iter_mut().enumerate() {
            if slot.is_some() {
                continue;
            }
            let Some(i) = image.iter().position(|t| t.block == win.anchor && t.offset == offset) else {
                *slot = Some(false);
                continue;
            };
            let mut matched = 0;
            let mut mismatch = false;
            for (k, &y) in self.target.iter().enumerate() {
                if i + k >= stable_end {
                    break;
                }
                if image[i + k].letter != y {
                    mismatch = true;
                    break;
                }
                matched += 1;
            }
            if mismatch {
                *slot = Some(false);
            } else if matched == self.target.len() && i >= self.cancellation {
                *slot = Some(true);
            } else if i < self.cancellation {
                need_left = true;
            }
        }
        match (win.undecided(), need_left) {
            (0, _) => None,
            (_, true) => Some(Side::Left),
            (_, false) => Some(Side::Right),
        }
    }

    fn children(&self, win: &Window, side: Side) -> Vec<Window> {
        let rank = self.mu.rank();
        let mut out = Vec::new();
        for x in Letter::alphabet(rank) {
            let (letters, anchor) = match side {
                Side::Left if win.letters[0] != x.inverse() => {
                    let mut l = Vec::with_capacity(win.letters.len() + 1);
                    l.push(x);
                    l.extend_from_slice(&win.letters);
                    (l, win.anchor + 1)
                }
                Side::Right if *win.letters.last().expect("nonempty window") != x.inverse() => {
                    let mut l = win.letters.clone();
                    l.push(x);
                    (l, win.anchor)
                }
                _ => continue,
            };
            let word = Word::from_reduced_unchecked(rank, letters);
            if let Some(mass) = self.mu.get(&word) {
                out.push(Window { letters: word.into_letters(), anchor, mass: mass.clone(), decided: win.decided.clone() });
            }
        }
        out
    }

    fn roots(&self) -> Vec<Window> {
        let rank = self.mu.rank();
        Letter::alphabet(rank)
            .filter_map(|x| {
                let mass = self.mu.get(&Word::letter(rank, x))?;
                Some(Window {
                    letters: vec![x],
                    anchor: 0,
                    mass: mass.clone(),
                    decided: vec![None; self.alpha.letter_image(x).len()],
                })
            })
            .collect()
    }

    /// Refines until decided, the budget runs out, or (with `strict`) a
    /// window hits the input depth.
    fn run(&self, budget: usize, strict: bool) -> Result<CertifiedValue> {
        let mut lower = Rational::zero();
        let mut undecided = Rational::zero();
        let mut heap: BinaryHeap<Entry> = BinaryHeap::new();
        let mut seq = 0usize;
        let mut push = |heap: &mut BinaryHeap<Entry>, mut win: Window, lower: &mut Rational, undecided: &mut Rational| {
            match self.evaluate(&mut win) {
                None => *lower += &win.mass * rational::int(win.hits() as i64),
                Some(_) if win.letters.len() >= self.mu.depth() => {
                    if strict {
                        return Err(Error::InsufficientDepth {
                            depth: self.mu.depth(),
                            word: Word::from_reduced_unchecked(self.mu.rank(), self.target.to_vec()),
                        });
                    }
                    *lower += &win.mass * rational::int(win.hits() as i64);
                    *undecided += &win.mass * rational::int(win.undecided() as i64);
                }
                Some(side) => {
                    let score = &win.mass * rational::int(win.undecided() as i64);
                    heap.push(Entry { score, seq: Reverse(seq), win, side });
                    seq += 1;
                }
            }
            Ok(())
        };
        for root in self.roots() {
            push(&mut heap, root, &mut lower, &mut undecided)?;
        }
        let mut steps = 0;
        while steps < budget {
            let Some(Entry { win, side, .. }) = heap.pop() else { break };
            steps += 1;
            for child in self.children(&win, side) {
                push(&mut heap, child, &mut lower, &mut undecided)?;
            }
        }
        for Entry { win, .. } in heap {
            lower += &win.mass * rational::int(win.hits() as i64);
            undecided += &win.mass * rational::int(win.undecided() as i64);
        }
        Ok(CertifiedValue { lower, undecided })
    }
}

struct Entry {
    score: Rational,
    seq: Reverse<usize>,
    win: Window,
    side: Side,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.score, self.seq).cmp(&(&other.score, other.seq))
    }
}

/// Evaluates `f` on words of length `1..=depth`, level by level, skipping
/// words with a prefix or suffix already certified zero.
fn by_levels<F>(rank: usize, depth: usize, f: F) -> Result<BTreeMap<Word, CertifiedValue>>
where
    F: Fn(&Word) -> Result<CertifiedValue> + Sync,
{
    let mut out = BTreeMap::new();
    let mut level: Vec<Word> = Word::all_of_length(rank, 1);
    for len in 1..=depth {
        if len > 1 {
            level = level
                .iter()
                .flat_map(|w| Letter::alphabet(rank).filter_map(move |y| w.extend_right(y)))
                .filter(|v| out.contains_key(&v.suffix(len - 1)))
                .collect();
        }
        let results: Vec<Result<CertifiedValue>> = level.par_iter().map(&f).collect();
        let mut next = Vec::new();
        for (w, r) in level.into_iter().zip(results) {
            let v = r?;
            if !v.upper().is_zero() {
                out.insert(w.clone(), v);
                next.push(w);
            }
        }
        level = next;
    }
    Ok(out)
}

/// A rough count of target words, used to split the refinement budget.
fn estimated_targets(mu: &CurrentTable, out_depth: usize) -> usize {
    let two_n = 2 * mu.rank();
    (1..=out_depth).map(|k| mu.values().keys().filter(|w| w.len() == k.min(mu.depth())).count().max(two_n)).sum()
}

fn check_ranks(alpha: &Automorphism, mu: &CurrentTable) -> Result<()> {
    if alpha.rank() != mu.rank() {
        return Err(Error::RankMismatch(alpha.rank(), mu.rank()));
    }
    Ok(())
}

/// The pushforward of a table under a positive automorphism, with its
/// Kolmogorov validation report.
#[derive(Clone, Debug)]
pub struct PushedCurrent {
    pub table: CurrentTable,
    pub report: KolmogorovReport,
}

impl PushedCurrent {
    pub fn into_current(self) -> Result<TruncatedCurrent> {
        TruncatedCurrent::new(self.table)
    }
}

/// Exact `α_*μ` at depth `out_depth` for positive `α`. Fails with
/// [`Error::InsufficientDepth`] if some window cannot be decided within
/// `μ`'s depth.
pub fn push_positive(alpha: &Automorphism, mu: &CurrentTable, out_depth: usize) -> Result<PushedCurrent> {
    check_ranks(alpha, mu)?;
    if !alpha.is_positive() {
        return Err(Error::NotPositive);
    }
    let cancellation = effective_cancellation(alpha, mu)?;
    let certified = by_levels(mu.rank(), out_depth, |w| Engine { alpha, mu, target: w.letters(), cancellation }.run(usize::MAX, true))?;
    let values = certified
        .into_iter()
        .map(|(w, v)| {
            debug_assert!(v.is_exact());
            (w, v.lower)
        })
        .collect();
    let table = CurrentTable::new(mu.rank(), out_depth, values)?;
    let report = table.check(&CheckMode::Exact);
    Ok(PushedCurrent { table, report })
}

/// Certified intervals; absent words are certified zero.
#[derive(Clone, Debug)]
pub struct CertifiedTable {
    pub rank: usize,
    pub depth: usize,
    pub values: BTreeMap<Word, CertifiedValue>,
}

impl CertifiedTable {
    /// Largest undecided mass over all words.
    pub fn max_undecided(&self) -> Rational {
        self.values.values().map(|v| v.undecided.clone()).max().unwrap_or_else(Rational::zero)
    }

    /// Words whose undecided mass exceeds `cap`.
    pub fn over_cap(&self, cap: &Rational) -> Vec<&Word> {
        self.values.iter().filter(|(_, v)| &v.undecided > cap).map(|(w, _)| w).collect()
    }

    /// Lines `word<TAB>lower<TAB>undecided`, skipping words certified zero.
    pub fn get(&self, w: &Word) -> CertifiedValue {
        self.values.get(w).cloned().unwrap_or(CertifiedValue { lower: Rational::zero(), undecided: Rational::zero() })
    }

    pub fn to_lines(&self) -> String {
        self.values
            .iter()
            .filter(|(_, v)| !v.upper().is_zero())
            .map(|(w, v)| v.to_line(w) + "\n")
            .collect()
    }
}

/// Certified intervals for `α_*μ` on every word of length `1..=out_depth`.
/// The budget caps refinement steps in total and is split evenly over the
/// words.
pub fn push_general(alpha: &Automorphism, mu: &CurrentTable, out_depth: usize, budget: usize) -> Result<CertifiedTable> {
    check_ranks(alpha, mu)?;
    let cancellation = effective_cancellation(alpha, mu)?;
    let targets = estimated_targets(mu, out_depth);
    let per_target = (budget / targets.max(1)).max(1);
    let values = by_levels(mu.rank(), out_depth, |w| Engine { alpha, mu, target: w.letters(), cancellation }.run(per_target, false))?;
    Ok(CertifiedTable { rank: mu.rank(), depth: out_depth, values })
}

/// Checks `(αβ)_* = α_* ∘ β_*` on a rational current `μ_w`, exactly.
pub fn left_action_check_word(alpha: &Automorphism, beta: &Automorphism, w: &Word, depth: usize) -> Result<bool> {
    let composed = alpha.compose(beta)?;
    let outer = push_rational(alpha, &beta.apply(w)?, depth)?;
    Ok(outer == push_rational(&composed, w, depth)?)
}

/// Checks `(αβ)_* = α_* ∘ β_*` on a table at depth `depth`. Exact when both
/// are positive; when only `β` is positive the comparison is by overlap of
/// certified intervals.
pub fn left_action_check(alpha: &Automorphism, beta: &Automorphism, mu: &CurrentTable, depth: usize, budget: usize) -> Result<bool> {
    if !beta.is_positive() {
        return Err(Error::Unsupported("the inner automorphism must be positive".into()));
    }
    let composed = alpha.compose(beta)?;
    // The intermediate current is taken as deep as the outer push can use.
    let mut last_error = None;
    for mid in (depth..=mu.depth()).rev() {
        let inner = match push_positive(beta, mu, mid) {
            Ok(p) => p.table,
            Err(e @ Error::InsufficientDepth { .. }) => {
                last_error = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        if alpha.is_positive() {
            let outer = match push_positive(alpha, &inner, depth) {
                Ok(p) => p.table,
                Err(e @ Error::InsufficientDepth { .. }) => {
                    last_error = Some(e);
                    continue;
                }
                Err(e) => return Err(e),
            };
            return Ok(outer == push_positive(&composed, mu, depth)?.table);
        }
        let outer = push_general(alpha, &inner, depth, budget)?;
        let direct = push_general(&composed, mu, depth, budget)?;
        let words: std::collections::BTreeSet<&Word> = outer.values.keys().chain(direct.values.keys()).collect();
        return Ok(words.into_iter().all(|w| outer.get(w).overlaps(&direct.get(w))));
    }
    Err(last_error.unwrap_or(Error::DepthOverflow { requested: depth, available: mu.depth() }))
}
