//! Transition matrices, Perron-Frobenius data, growth rates and attracting
//! currents of positive automorphisms.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::currents::{count_windows, normalize, rational_current, sup_distance, ApproximateCurrent, CurrentTable, TruncatedCurrent};
use crate::error::{Error, Result};
use crate::free_group::{Automorphism, Letter, Word};
use crate::laminations::prolongable_seed;
use crate::pushforward::push_positive;
use crate::rational::{self, Rational};

/// Power iteration gives up after this many steps.
pub const MAX_POWER_ITERATIONS: usize = 1_000_000;
/// Target max-norm residual of `M·v − λ·v`.
pub const PF_TOLERANCE: f64 = 1e-12;

/// `entry(y, x)` counts occurrences of `y^{±1}` in the image of `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    rank: usize,
    entries: Vec<Vec<u64>>,
    primitive: bool,
}

impl TransitionMatrix {
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Rows are indexed by `y`, columns by `x`.
    pub fn entries(&self) -> &[Vec<u64>] {
        &self.entries
    }

    pub fn entry(&self, y: usize, x: usize) -> u64 {
        self.entries[y][x]
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }
}

pub fn transition_matrix(alpha: &Automorphism) -> Result<TransitionMatrix> {
    if !alpha.is_positive() {
        return Err(Error::NotPositive);
    }
    let n = alpha.rank();
    let mut entries = vec![vec![0u64; n]; n];
    for (x, img) in alpha.images().iter().enumerate() {
        for y in img.letters() {
            entries[y.generator() - 1][x] += 1;
        }
    }
    let primitive = is_primitive(&entries);
    Ok(TransitionMatrix { rank: n, entries, primitive })
}

/// Some power up to the Wielandt bound `N² − 2N + 2` is strictly positive.
fn is_primitive(m: &[Vec<u64>]) -> bool {
    let n = m.len();
    let pattern: Vec<Vec<bool>> = m.iter().map(|row| row.iter().map(|&v| v > 0).collect()).collect();
    let mut power = pattern.clone();
    for _ in 0..(n * n - 2 * n + 2) {
        if power.iter().flatten().all(|&b| b) {
            return true;
        }
        power = (0..n).map(|i| (0..n).map(|j| (0..n).any(|k| power[i][k] && pattern[k][j])).collect()).collect();
    }
    power.iter().flatten().all(|&b| b)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PfData {
    pub lambda: f64,
    /// Right eigenvector, entries summing to one.
    pub right: Vec<f64>,
    /// Left eigenvector, entries summing to one.
    pub left: Vec<f64>,
    /// Max-norm of `M·v − λ·v` for the right vector.
    pub residual: f64,
    pub iterations: usize,
}

fn power_iteration(m: &[Vec<f64>]) -> Result<(f64, Vec<f64>, f64, usize)> {
    let n = m.len();
    let mut v = vec![1.0 / n as f64; n];
    let mut residual = f64::INFINITY;
    for it in 1..=MAX_POWER_ITERATIONS {
        let mv: Vec<f64> = (0..n).map(|i| (0..n).map(|j| m[i][j] * v[j]).sum()).collect();
        let lambda: f64 = mv.iter().sum::<f64>() / v.iter().sum::<f64>();
        residual = (0..n).map(|i| (mv[i] - lambda * v[i]).abs()).fold(0.0, f64::max);
        if residual <= PF_TOLERANCE {
            return Ok((lambda, v, residual, it));
        }
        let total: f64 = mv.iter().sum();
        v = mv.into_iter().map(|x| x / total).collect();
    }
    Err(Error::NoConvergence { iterations: MAX_POWER_ITERATIONS, residual })
}

pub fn pf_eigen(m: &TransitionMatrix) -> Result<PfData> {
    if !m.primitive {
        return Err(Error::NotPrimitive);
    }
    let n = m.rank;
    let a: Vec<Vec<f64>> = m.entries.iter().map(|row| row.iter().map(|&v| v as f64).collect()).collect();
    let at: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect();
    let (lambda, right, residual, iterations) = power_iteration(&a)?;
    let (_, left, _, _) = power_iteration(&at)?;
    Ok(PfData { lambda, right, left, residual, iterations })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthEstimate {
    /// The last length ratio.
    pub estimate: f64,
    /// `|αᵏ(seed)|` for `k = 0..=n_max`.
    pub lengths: Vec<usize>,
    /// `lengths[k+1] / lengths[k]`.
    pub ratios: Vec<f64>,
    /// The final length is at most one.
    pub collapsed: bool,
}

/// Iterates `α` on a letter with free reduction and reports length ratios.
pub fn growth_rate(alpha: &Automorphism, seed: Letter, n_max: usize) -> Result<GrowthEstimate> {
    if n_max < 5 {
        return Err(Error::TooFewIterations(format!("growth_rate needs n_max >= 5, got {n_max}")));
    }
    if seed.generator() > alpha.rank() {
        return Err(Error::RankMismatch(alpha.rank(), seed.generator()));
    }
    let mut w = Word::letter(alpha.rank(), seed);
    let mut lengths = vec![1];
    for _ in 0..n_max {
        w = alpha.apply(&w)?;
        lengths.push(w.len());
        if w.is_empty() {
            break;
        }
    }
    let ratios: Vec<f64> = lengths.windows(2).map(|p| p[1] as f64 / p[0] as f64).collect();
    let last = *lengths.last().expect("nonempty");
    Ok(GrowthEstimate { estimate: *ratios.last().expect("n_max >= 5"), lengths, ratios, collapsed: last <= 1 })
}

fn require_primitive(alpha: &Automorphism) -> Result<TransitionMatrix> {
    let m = transition_matrix(alpha)?;
    if !m.primitive {
        return Err(Error::NotPrimitive);
    }
    Ok(m)
}

#[derive(Clone, Debug)]
pub struct AttractingCurrent {
    pub current: ApproximateCurrent,
    pub seed: Letter,
    /// `|αⁿ(seed)|`.
    pub length: usize,
}

/// Factor frequencies of `αⁿ(seed)` for a prolongable seed:
/// `(occ(w) + occ(w⁻¹)) / (2|αⁿ(seed)|)`, whose length-one total is one.
/// The tolerance is the measured Kolmogorov defect.
pub fn attracting_current(alpha: &Automorphism, depth: usize, n: usize) -> Result<AttractingCurrent> {
    require_primitive(alpha)?;
    let seed = prolongable_seed(alpha)?;
    let rank = alpha.rank();
    let mut w = Word::letter(rank, seed);
    for _ in 0..n {
        w = alpha.apply(&w)?;
    }
    let needed = 10 * (2 * rank).pow(depth as u32);
    if w.len() < needed {
        return Err(Error::TooFewIterations(format!(
            "|α^{n}({seed})| = {} < 10·(2N)^D = {needed}",
            w.len()
        )));
    }
    let counts = count_windows(w.letters(), false, depth);
    let denominator = 2 * w.len() as i64;
    let mut values: BTreeMap<Word, Rational> = BTreeMap::new();
    for (letters, c) in counts {
        let v = Word::from_reduced_unchecked(rank, letters);
        let share = rational::ratio(c as i64, denominator);
        *values.entry(v.inverse()).or_insert_with(Rational::zero) += &share;
        *values.entry(v).or_insert_with(Rational::zero) += share;
    }
    let table = CurrentTable::new(rank, depth, values)?;
    Ok(AttractingCurrent { current: ApproximateCurrent::with_measured_tolerance(table)?, seed, length: w.len() })
}

/// `sup_distance(α_*μ, λ·μ, depth)` for a positive automorphism.
pub fn eigen_residual(alpha: &Automorphism, mu: &CurrentTable, lambda: f64, depth: usize) -> Result<Rational> {
    let pushed = push_positive(alpha, mu, depth)?.table;
    let lambda = Rational::from_float(lambda).ok_or_else(|| Error::Format(format!("λ = {lambda} is not finite")))?;
    let scaled = mu.restrict(depth)?.scaled(&lambda)?;
    sup_distance(&pushed, &scaled, depth)
}

#[derive(Clone, Debug)]
pub struct NorthSouthProbe {
    pub seeds: Vec<Word>,
    /// Normalized `μ_{αⁿ(w)}` per seed.
    pub currents: Vec<TruncatedCurrent>,
    /// Largest pairwise distance after `k` iterations, `k = 0..=n`.
    pub spread: Vec<Rational>,
    /// `(i, j, distance)` at `k = n` for `i < j`.
    pub pairwise: Vec<(usize, usize, Rational)>,
}

impl NorthSouthProbe {
    pub fn max_distance(&self) -> Rational {
        self.spread.last().cloned().unwrap_or_else(Rational::zero)
    }
}

fn pairwise(currents: &[TruncatedCurrent], depth: usize) -> Result<Vec<(usize, usize, Rational)>> {
    let mut out = Vec::new();
    for i in 0..currents.len() {
        for j in i + 1..currents.len() {
            out.push((i, j, sup_distance(&currents[i], &currents[j], depth)?));
        }
    }
    Ok(out)
}

/// Normalized rational currents of `αᵏ(w)` for each seed, `k = 0..=n`.
pub fn north_south_probe(alpha: &Automorphism, seeds: &[Word], depth: usize, n: usize) -> Result<NorthSouthProbe> {
    require_primitive(alpha)?;
    if seeds.is_empty() {
        return Err(Error::EmptyInput("north_south_probe needs at least one seed"));
    }
    let mut words: Vec<Word> = seeds.to_vec();
    let mut spread = Vec::with_capacity(n + 1);
    let mut currents = Vec::new();
    for k in 0..=n {
        if k > 0 {
            words = words.iter().map(|w| alpha.apply(w)).collect::<Result<_>>()?;
        }
        currents = words.iter().map(|w| normalize(&rational_current(w, depth)?)).collect::<Result<Vec<_>>>()?;
        let d = pairwise(&currents, depth)?.into_iter().map(|(_, _, d)| d).max().unwrap_or_else(Rational::zero);
        spread.push(d);
    }
    let pairwise = pairwise(&currents, depth)?;
    Ok(NorthSouthProbe { seeds: seeds.to_vec(), currents, spread, pairwise })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fibonacci, tribonacci, tribonacci_inverse};
    use crate::laminations::{is_sublanguage, language_of_leaf, LaminaryLanguage, LeafDescription};

    /// Largest root of `x³ − x² − x − 1` by bisection.
    fn tribonacci_root() -> f64 {
        let f = |x: f64| x * x * x - x * x - x - 1.0;
        let (mut lo, mut hi) = (1.0, 2.0);
        for _ in 0..200 {
            let mid = (lo + hi) / 2.0;
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    #[test]
    fn matrices() {
        let m = transition_matrix(&tribonacci()).unwrap();
        assert_eq!(m.entries(), &[vec![1, 1, 1], vec![1, 0, 0], vec![0, 1, 0]]);
        assert!(m.is_primitive());
        let id = transition_matrix(&Automorphism::identity(2)).unwrap();
        assert_eq!(id.entries(), &[vec![1, 0], vec![0, 1]]);
        assert!(!id.is_primitive());
        let fib = transition_matrix(&fibonacci()).unwrap();
        assert_eq!(fib.entries(), &[vec![1, 1], vec![1, 0]]);
        assert!(fib.is_primitive());
        assert!(matches!(transition_matrix(&tribonacci_inverse()), Err(Error::NotPositive)));
    }

    #[test]
    fn perron_frobenius() {
        let pf = pf_eigen(&transition_matrix(&tribonacci()).unwrap()).unwrap();
        let l = pf.lambda;
        assert!((l * l * l - l * l - l - 1.0).abs() <= 1e-9);
        assert!((l - tribonacci_root()).abs() <= 1e-10);
        assert!(pf.residual <= PF_TOLERANCE);
        assert!((pf.right.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let fib = pf_eigen(&transition_matrix(&fibonacci()).unwrap()).unwrap();
        assert!((fib.lambda - (1.0 + 5f64.sqrt()) / 2.0).abs() <= 1e-12);
        let swap = Automorphism::new(2, vec![Word::parse("b", 2).unwrap(), Word::parse("a", 2).unwrap()], None).unwrap();
        assert!(matches!(pf_eigen(&transition_matrix(&swap).unwrap()), Err(Error::NotPrimitive)));
    }

    #[test]
    fn growth() {
        let a = Letter::new(1, true);
        let lambda = pf_eigen(&transition_matrix(&tribonacci()).unwrap()).unwrap().lambda;
        let g = growth_rate(&tribonacci(), a, 25).unwrap();
        assert!((g.estimate - lambda).abs() < 1e-3);
        let inv = growth_rate(&tribonacci_inverse(), a, 40).unwrap();
        assert!((1.38..=1.41).contains(&inv.estimate), "{}", inv.estimate);
        let id = growth_rate(&Automorphism::identity(2), a, 6).unwrap();
        assert_eq!(id.estimate, 1.0);
        assert!(id.collapsed);
        assert!(growth_rate(&tribonacci(), a, 4).is_err());
    }

    #[test]
    fn attracting_frequencies() {
        let pf = pf_eigen(&transition_matrix(&tribonacci()).unwrap()).unwrap();
        let mu = attracting_current(&tribonacci(), 1, 20).unwrap();
        for (i, x) in Letter::alphabet(3).filter(|x| x.is_positive()).enumerate() {
            let freq = rational::to_f64(&mu.current.value(&Word::letter(3, x))) * 2.0;
            assert!((freq - pf.right[i]).abs() < 1e-4, "{x}: {freq} vs {}", pf.right[i]);
        }
        assert!(matches!(attracting_current(&tribonacci(), 3, 3), Err(Error::TooFewIterations(_))));
    }

    #[test]
    fn attracting_support_is_legal() {
        let mu = attracting_current(&tribonacci(), 3, 15).unwrap();
        let leaf = LeafDescription::substitution(&tribonacci(), Letter::new(1, true)).unwrap();
        let legal = language_of_leaf(&leaf, 3).unwrap();
        assert!(mu.current.values().keys().all(|w| legal.contains(w)));
        let lang = LaminaryLanguage::new(3, 3, mu.current.values().keys().cloned().collect()).unwrap();
        assert!(is_sublanguage(&lang, &legal).unwrap());
    }

    #[test]
    fn defect_shrinks() {
        let defects: Vec<Rational> = [10, 14, 18].iter().map(|&n| attracting_current(&tribonacci(), 2, n).unwrap().current.tolerance().clone()).collect();
        assert!(defects[0] > defects[1] && defects[1] > defects[2]);
    }

    #[test]
    fn eigen_equation() {
        let pf = pf_eigen(&transition_matrix(&tribonacci()).unwrap()).unwrap();
        let r: Vec<f64> = [10, 15, 20]
            .iter()
            .map(|&n| {
                let mu = attracting_current(&tribonacci(), 2, n).unwrap();
                rational::to_f64(&eigen_residual(&tribonacci(), mu.current.table(), pf.lambda, 2).unwrap())
            })
            .collect();
        assert!(r[1] <= r[0] + 1e-6 && r[2] <= r[1] + 1e-6, "{r:?}");
        assert!(r[2] <= 1e-3);
    }

    #[test]
    fn north_south() {
        let w = |s: &str| Word::parse(s, 3).unwrap();
        let seeds = [w("a"), w("b"), w("ab")];
        let probe = north_south_probe(&tribonacci(), &seeds, 2, 15).unwrap();
        assert!(rational::to_f64(&probe.max_distance()) <= 1e-3);
        let raw = north_south_probe(&tribonacci(), &seeds, 2, 0).unwrap();
        let a = normalize(&rational_current(&w("a"), 2).unwrap()).unwrap();
        let b = normalize(&rational_current(&w("b"), 2).unwrap()).unwrap();
        assert_eq!(raw.pairwise[0].2, sup_distance(&a, &b, 2).unwrap());

        let alpha = tribonacci();
        let reference = alpha.power(12).apply(&w("a")).unwrap();
        let long = alpha.power(10).apply(&w("b")).unwrap();
        let fresh = north_south_probe(&alpha, &[reference.clone(), w("b")], 2, 5).unwrap();
        let warm = north_south_probe(&alpha, &[reference, long], 2, 5).unwrap();
        assert!(warm.max_distance() < fresh.max_distance());
    }
}
