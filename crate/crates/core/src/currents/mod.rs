//! Depth-truncated Kolmogorov functions: the finite-depth view of geodesic
//! currents on `F_N`.

mod counting;
mod dump;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Deref;

use num_traits::{Signed, Zero};
use serde::Serialize;

pub use counting::{counting_current, counting_limit, CountingLimit, WordRange};
pub use dump::{parse_dump, parse_json, to_dump, to_json, CurrentJson};

use crate::error::{Error, Result};
use crate::free_group::{Letter, Word};
use crate::rational::{self, Rational};

/// A nonnegative table of values on reduced words of length `1..=depth`.
/// Absent words have value zero; zeros are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CurrentTable {
    rank: usize,
    depth: usize,
    values: BTreeMap<Word, Rational>,
}

impl CurrentTable {
    pub fn new(rank: usize, depth: usize, values: BTreeMap<Word, Rational>) -> Result<CurrentTable> {
        if depth == 0 {
            return Err(Error::Format("depth must be at least 1".into()));
        }
        for (w, v) in &values {
            if w.rank() != rank {
                return Err(Error::RankMismatch(rank, w.rank()));
            }
            if w.is_empty() {
                return Err(Error::Format("the identity cannot be a key".into()));
            }
            if w.len() > depth {
                return Err(Error::KeyTooLong { word: w.clone(), depth });
            }
            if v.is_negative() {
                return Err(Error::NegativeValue { word: w.clone(), value: rational::format(v) });
            }
        }
        let values = values.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(CurrentTable { rank, depth, values })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &BTreeMap<Word, Rational> {
        &self.values
    }

    pub fn get(&self, w: &Word) -> Option<&Rational> {
        self.values.get(w)
    }

    pub fn value(&self, w: &Word) -> Rational {
        self.values.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_positive_at(&self, w: &Word) -> bool {
        self.values.contains_key(w)
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Sum of values over words of length `k`.
    pub fn level_sum(&self, k: usize) -> Rational {
        self.values.iter().filter(|(w, _)| w.len() == k).map(|(_, v)| v).sum()
    }

    pub fn restrict(&self, depth: usize) -> Result<CurrentTable> {
        if depth > self.depth || depth == 0 {
            return Err(Error::DepthOverflow { requested: depth, available: self.depth });
        }
        let values = self.values.iter().filter(|(w, _)| w.len() <= depth).map(|(w, v)| (w.clone(), v.clone())).collect();
        Ok(CurrentTable { rank: self.rank, depth, values })
    }

    pub fn scaled(&self, c: &Rational) -> Result<CurrentTable> {
        if c.is_negative() {
            return Err(Error::NegativeValue { word: Word::identity(self.rank), value: rational::format(c) });
        }
        let values = self.values.iter().map(|(w, v)| (w.clone(), v * c)).collect();
        CurrentTable::new(self.rank, self.depth, values)
    }

    /// True if some stored word of length two changes sign, i.e. the
    /// biinfinite words carrying mass are not all single-signed.
    pub fn has_mixed_sign_support(&self) -> bool {
        self.values.keys().any(|w| w.len() == 2 && w.letters()[0].is_positive() != w.letters()[1].is_positive())
    }

    pub fn check(&self, mode: &CheckMode) -> KolmogorovReport {
        check_table(&self.values, self.rank, self.depth, mode)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exact,
    Tolerance(Rational),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
    Symmetry,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub word: Word,
    pub side: Side,
    /// `value(w)` minus the sum over extensions (or minus `value(w⁻¹)`).
    pub defect: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KolmogorovReport {
    pub violations: Vec<Violation>,
    /// Largest absolute Kolmogorov defect seen, violating or not.
    pub max_defect: Rational,
}

impl KolmogorovReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Validates a raw table: every violated Kolmogorov equation, symmetry
/// failure, or triviality is listed.
pub fn check_kolmogorov(
    values: &BTreeMap<Word, Rational>,
    rank: usize,
    depth: usize,
    mode: &CheckMode,
) -> Result<KolmogorovReport> {
    let table = CurrentTable::new(rank, depth, values.clone())?;
    Ok(table.check(mode))
}

fn check_table(values: &BTreeMap<Word, Rational>, rank: usize, depth: usize, mode: &CheckMode) -> KolmogorovReport {
    let tolerance = match mode {
        CheckMode::Exact => Rational::zero(),
        CheckMode::Tolerance(t) => t.clone(),
    };
    let mut report = KolmogorovReport { violations: Vec::new(), max_defect: Rational::zero() };
    if values.is_empty() {
        report.violations.push(Violation { word: Word::identity(rank), side: Side::Zero, defect: Rational::zero() });
        return report;
    }

    let mut right: HashMap<Word, Rational> = HashMap::new();
    let mut left: HashMap<Word, Rational> = HashMap::new();
    for (v, val) in values {
        if v.len() >= 2 {
            *right.entry(v.prefix(v.len() - 1)).or_insert_with(Rational::zero) += val;
            *left.entry(v.suffix(v.len() - 1)).or_insert_with(Rational::zero) += val;
        }
    }
    let candidates: BTreeSet<&Word> = values
        .keys()
        .filter(|w| w.len() < depth)
        .chain(right.keys())
        .chain(left.keys())
        .collect();
    let zero = Rational::zero();
    for w in candidates {
        let val = values.get(w).unwrap_or(&zero);
        for (side, sums) in [(Side::Right, &right), (Side::Left, &left)] {
            let defect = val - sums.get(w).unwrap_or(&zero);
            let size = defect.abs();
            if size > report.max_defect {
                report.max_defect = size.clone();
            }
            if size > tolerance {
                report.violations.push(Violation { word: w.clone(), side, defect });
            }
        }
    }
    for (w, val) in values {
        let inv = w.inverse();
        let other = values.get(&inv).unwrap_or(&zero);
        if other != val && (w < &inv || !values.contains_key(&inv)) {
            report.violations.push(Violation { word: w.clone(), side: Side::Symmetry, defect: val - other });
        }
    }
    report.violations.sort_by(|a, b| (&a.word, a.side).cmp(&(&b.word, b.side)));
    report
}

fn report_error(report: &KolmogorovReport) -> Error {
    let v = &report.violations[0];
    Error::NotACurrent(format!(
        "{} violation(s), first at {} ({:?}, defect {})",
        report.violations.len(),
        v.word,
        v.side,
        rational::format(&v.defect)
    ))
}

/// An exactly Kolmogorov-consistent, symmetric, nonzero table.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedCurrent(CurrentTable);

impl TruncatedCurrent {
    pub fn new(table: CurrentTable) -> Result<TruncatedCurrent> {
        let report = table.check(&CheckMode::Exact);
        if !report.is_valid() {
            return Err(report_error(&report));
        }
        Ok(TruncatedCurrent(table))
    }

    pub fn table(&self) -> &CurrentTable {
        &self.0
    }

    pub fn into_table(self) -> CurrentTable {
        self.0
    }

    pub fn restrict(&self, depth: usize) -> Result<TruncatedCurrent> {
        Ok(TruncatedCurrent(self.0.restrict(depth)?))
    }
}

impl Deref for TruncatedCurrent {
    type Target = CurrentTable;
    fn deref(&self) -> &CurrentTable {
        &self.0
    }
}

impl AsRef<CurrentTable> for TruncatedCurrent {
    fn as_ref(&self) -> &CurrentTable {
        &self.0
    }
}

impl AsRef<CurrentTable> for CurrentTable {
    fn as_ref(&self) -> &CurrentTable {
        self
    }
}

/// Symmetric table satisfying the Kolmogorov equations up to `tolerance`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ApproximateCurrent {
    table: CurrentTable,
    tolerance: Rational,
}

impl ApproximateCurrent {
    pub fn new(table: CurrentTable, tolerance: Rational) -> Result<ApproximateCurrent> {
        let report = table.check(&CheckMode::Tolerance(tolerance.clone()));
        if !report.is_valid() {
            return Err(report_error(&report));
        }
        Ok(ApproximateCurrent { table, tolerance })
    }

    /// Uses the table's own largest defect as the tolerance.
    pub fn with_measured_tolerance(table: CurrentTable) -> Result<ApproximateCurrent> {
        let tolerance = table.check(&CheckMode::Exact).max_defect;
        ApproximateCurrent::new(table, tolerance)
    }

    pub fn table(&self) -> &CurrentTable {
        &self.table
    }

    pub fn tolerance(&self) -> &Rational {
        &self.tolerance
    }
}

impl Deref for ApproximateCurrent {
    type Target = CurrentTable;
    fn deref(&self) -> &CurrentTable {
        &self.table
    }
}

impl AsRef<CurrentTable> for ApproximateCurrent {
    fn as_ref(&self) -> &CurrentTable {
        &self.table
    }
}

/// Counts every window of length `1..=max_len` of a letter sequence. With
/// `cyclic`, windows wrap around and start at each of the `n` positions.
pub(crate) fn count_windows(letters: &[Letter], cyclic: bool, max_len: usize) -> HashMap<Vec<Letter>, u64> {
    let n = letters.len();
    let mut counts: HashMap<Vec<Letter>, u64> = HashMap::new();
    for start in 0..n {
        let mut window = Vec::with_capacity(max_len);
        for j in 0..max_len {
            let pos = start + j;
            if pos >= n && !cyclic {
                break;
            }
            window.push(letters[pos % n]);
            *counts.entry(window.clone()).or_insert(0) += 1;
        }
    }
    counts
}

/// The integer current `μ_w` at depth `depth`: if the cyclic reduction of
/// `w` is `u^m`, each word gets `m` times its occurrences in one period of
/// `…uu…` and `…u⁻¹u⁻¹…`.
pub fn rational_current(w: &Word, depth: usize) -> Result<TruncatedCurrent> {
    if w.is_empty() {
        return Err(Error::EmptyWord("rational_current"));
    }
    let (core, _) = w.cyclic_reduce()?;
    let (root, m) = core.max_root();
    let rank = w.rank();
    let mut values: BTreeMap<Word, Rational> = BTreeMap::new();
    for period in [root.as_word().clone(), root.as_word().inverse()] {
        for (window, count) in count_windows(period.letters(), true, depth) {
            let key = Word::from_reduced_unchecked(rank, window);
            *values.entry(key).or_insert_with(Rational::zero) += rational::int((count * m as u64) as i64);
        }
    }
    TruncatedCurrent::new(CurrentTable::new(rank, depth, values)?)
}

/// Positive combination `Σ c_i μ_i` at the smallest input depth.
pub fn linear_combination(terms: &[(Rational, &TruncatedCurrent)]) -> Result<TruncatedCurrent> {
    let Some((_, first)) = terms.first() else {
        return Err(Error::EmptyInput("linear_combination needs at least one term"));
    };
    let rank = first.rank();
    let depth = terms.iter().map(|(_, mu)| mu.depth()).min().unwrap_or(1);
    let mut values: BTreeMap<Word, Rational> = BTreeMap::new();
    for (c, mu) in terms {
        if mu.rank() != rank {
            return Err(Error::RankMismatch(rank, mu.rank()));
        }
        if !c.is_positive() {
            return Err(Error::NegativeValue { word: Word::identity(rank), value: rational::format(c) });
        }
        for (w, v) in mu.values() {
            if w.len() <= depth {
                *values.entry(w.clone()).or_insert_with(Rational::zero) += c * v;
            }
        }
    }
    TruncatedCurrent::new(CurrentTable::new(rank, depth, values)?)
}

/// `max_{|w| ≤ depth} |μ(w) − ν(w)|`.
pub fn sup_distance(mu: &CurrentTable, nu: &CurrentTable, depth: usize) -> Result<Rational> {
    if mu.rank() != nu.rank() {
        return Err(Error::RankMismatch(mu.rank(), nu.rank()));
    }
    let available = mu.depth().min(nu.depth());
    if depth > available {
        return Err(Error::DepthOverflow { requested: depth, available });
    }
    let zero = Rational::zero();
    let keys: BTreeSet<&Word> = mu.values().keys().chain(nu.values().keys()).filter(|w| w.len() <= depth).collect();
    Ok(keys
        .into_iter()
        .map(|w| (mu.get(w).unwrap_or(&zero) - nu.get(w).unwrap_or(&zero)).abs())
        .max()
        .unwrap_or(zero))
}

/// Scales so the length-one values sum to one.
pub fn normalize(mu: &TruncatedCurrent) -> Result<TruncatedCurrent> {
    let mass = mu.level_sum(1);
    if mass.is_zero() {
        return Err(Error::ZeroCurrent);
    }
    Ok(TruncatedCurrent(mu.scaled(&(Rational::from_integer(1.into()) / mass))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn w(s: &str) -> Word {
        Word::parse(s, 2).unwrap()
    }

    /// Independent oracle: count occurrences in one period of `(u^m)` for both
    /// orientations by scanning the explicit periodic string.
    fn oracle_value(word: &str, v: &str) -> Rational {
        let period = w(word);
        let (core, _) = period.cyclic_reduce().unwrap();
        let core = core.as_word().to_string();
        let pattern = v.to_string();
        let count = |s: &str| {
            let n = s.len();
            let long: String = s.repeat(pattern.len() / n + 2);
            (0..n).filter(|&i| long[i..].starts_with(&pattern)).count()
        };
        let inv: String = core.chars().rev().map(|c| if c.is_ascii_lowercase() { c.to_ascii_uppercase() } else { c.to_ascii_lowercase() }).collect();
        int((count(&core) + count(&inv)) as i64)
    }

    #[test]
    fn mu_a_powers() {
        let mu = rational_current(&w("a"), 3).unwrap();
        for s in ["a", "aa", "aaa", "A", "AA", "AAA"] {
            assert_eq!(mu.value(&w(s)), int(1), "{s}");
        }
        assert_eq!(mu.values().len(), 6);
    }

    #[test]
    fn mu_ab_values() {
        let mu = rational_current(&w("ab"), 3).unwrap();
        for s in ["a", "b", "ab", "ba"] {
            assert_eq!(mu.value(&w(s)), int(1));
        }
        assert_eq!(mu.value(&w("aa")), int(0));
        assert_eq!(mu.value(&w("aB")), int(0));
        for v in Word::all_up_to(2, 3) {
            assert_eq!(mu.value(&v), oracle_value("ab", &v.to_string()), "{v}");
        }
    }

    #[test]
    fn proper_power_scales() {
        let mu = rational_current(&w("a"), 3).unwrap();
        let mu2 = rational_current(&w("aa"), 3).unwrap();
        assert_eq!(mu2.into_table(), mu.scaled(&int(2)).unwrap());
        let abab = rational_current(&w("abab"), 4).unwrap();
        assert_eq!(abab.value(&w("ab")), int(2));
    }

    #[test]
    fn oracle_agreement_on_mixed_words() {
        for word in ["aBaab", "abAB", "aab", "bbbA"] {
            let mu = rational_current(&w(word), 4).unwrap();
            for v in Word::all_up_to(2, 4) {
                assert_eq!(mu.value(&v), oracle_value(word, &v.to_string()), "{word} at {v}");
            }
        }
    }

    #[test]
    fn check_reports_broken_table() {
        let mut values = BTreeMap::new();
        values.insert(w("a"), int(1));
        values.insert(w("A"), int(1));
        let report = check_kolmogorov(&values, 2, 2, &CheckMode::Exact).unwrap();
        assert!(!report.is_valid());
        assert!(report.violations.iter().any(|v| v.word == w("a") && v.side == Side::Right && v.defect == int(1)));

        let mut negative = BTreeMap::new();
        negative.insert(w("a"), int(-1));
        assert!(check_kolmogorov(&negative, 2, 1, &CheckMode::Exact).is_err());

        let mut long = BTreeMap::new();
        long.insert(w("aaa"), int(1));
        assert!(check_kolmogorov(&long, 2, 2, &CheckMode::Exact).is_err());

        let zero = check_kolmogorov(&BTreeMap::new(), 2, 2, &CheckMode::Exact).unwrap();
        assert_eq!(zero.violations[0].side, Side::Zero);
    }

    #[test]
    fn symmetry_violation_is_reported() {
        let mut values = BTreeMap::new();
        values.insert(w("a"), int(1));
        values.insert(w("A"), int(2));
        let report = check_kolmogorov(&values, 2, 1, &CheckMode::Exact).unwrap();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].side, Side::Symmetry);
    }

    #[test]
    fn combinations() {
        let a = rational_current(&w("a"), 3).unwrap();
        let b = rational_current(&w("b"), 3).unwrap();
        let half = linear_combination(&[(ratio(1, 2), &a), (ratio(1, 2), &b)]).unwrap();
        assert_eq!(half.value(&w("a")), ratio(1, 2));
        assert_eq!(half.value(&w("b")), ratio(1, 2));
        assert_eq!(linear_combination(&[(int(1), &a)]).unwrap(), a);
        assert!(linear_combination(&[]).is_err());
        assert!(linear_combination(&[(int(0), &a)]).is_err());

        for n in 2..=6i64 {
            let word = Word::parse(&format!("a{}", "b".repeat(n as usize)), 2).unwrap();
            let mu = rational_current(&word, 3).unwrap();
            let scaled = linear_combination(&[(ratio(1, n), &mu)]).unwrap();
            assert_eq!(scaled.value(&w("b")), int(1));
            assert_eq!(scaled.value(&w("a")), ratio(1, n));
            assert_eq!(sup_distance(&scaled, &b, 1).unwrap(), ratio(1, n));
        }
    }

    #[test]
    fn distances_and_normalization() {
        let a = rational_current(&w("a"), 3).unwrap();
        let b = rational_current(&w("b"), 3).unwrap();
        assert_eq!(sup_distance(&a, &a, 3).unwrap(), int(0));
        assert_eq!(sup_distance(&a, &b, 1).unwrap(), int(1));
        assert!(sup_distance(&a, &b, 4).is_err());

        let na = normalize(&a).unwrap();
        assert_eq!(na.value(&w("a")), ratio(1, 2));
        let a3 = rational_current(&w("aaa"), 3).unwrap();
        assert_eq!(normalize(&a3).unwrap(), na);
        // a, A, b, B each carry 1/2, so the length-one mass is 2.
        let half = linear_combination(&[(ratio(1, 2), &a), (ratio(1, 2), &b)]).unwrap();
        let quarter = linear_combination(&[(ratio(1, 4), &a), (ratio(1, 4), &b)]).unwrap();
        assert_eq!(normalize(&half).unwrap(), quarter);
        assert_eq!(normalize(&quarter).unwrap(), quarter);
    }
}
