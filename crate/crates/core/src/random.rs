//! Random words, currents and languages for experiments and tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::currents::{linear_combination, rational_current, TruncatedCurrent};
use crate::error::Result;
use crate::free_group::{Letter, Word};
use crate::laminations::{language_of_leaf, LaminaryLanguage, LeafDescription};
use crate::rational;

fn pick<R: Rng + ?Sized>(rng: &mut R, rank: usize, avoid: &[Letter]) -> Letter {
    let choices: Vec<Letter> = Letter::alphabet(rank).filter(|x| !avoid.contains(x)).collect();
    *choices.choose(rng).expect("rank at least 1")
}

/// Uniform among reduced words of length `len`.
pub fn reduced_word<R: Rng + ?Sized>(rng: &mut R, rank: usize, len: usize) -> Word {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    for _ in 0..len {
        let avoid: Vec<Letter> = letters.last().map(|x| x.inverse()).into_iter().collect();
        letters.push(pick(rng, rank, &avoid));
    }
    Word::from_letters(rank, letters).expect("built reduced")
}

/// A cyclically reduced word of length `len ≥ 1`.
pub fn cyclically_reduced_word<R: Rng + ?Sized>(rng: &mut R, rank: usize, len: usize) -> Word {
    loop {
        let w = reduced_word(rng, rank, len);
        if w.is_cyclically_reduced() {
            return w;
        }
    }
}

/// `μ_w` for a random cyclically reduced `w` of length `1..=max_len`.
pub fn rational<R: Rng + ?Sized>(rng: &mut R, rank: usize, depth: usize, max_len: usize) -> Result<TruncatedCurrent> {
    let len = rng.gen_range(1..=max_len);
    rational_current(&cyclically_reduced_word(rng, rank, len), depth)
}

/// A combination of up to `terms` random rational currents with random
/// positive coefficients.
pub fn combination<R: Rng + ?Sized>(rng: &mut R, rank: usize, depth: usize, terms: usize) -> Result<TruncatedCurrent> {
    let count = rng.gen_range(1..=terms);
    let currents = (0..count).map(|_| rational(rng, rank, depth, 6)).collect::<Result<Vec<_>>>()?;
    let coefficients: Vec<_> = (0..count).map(|_| rational::ratio(rng.gen_range(1..=9), rng.gen_range(1..=9))).collect();
    let terms: Vec<_> = coefficients.into_iter().zip(currents.iter()).collect();
    linear_combination(&terms)
}

/// A random leaf: periodic, or eventually periodic with random periods and
/// center chosen so that no junction cancels.
pub fn leaf<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> LeafDescription {
    loop {
        let (l, r, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(0..=3));
        let left = cyclically_reduced_word(rng, rank, l);
        if rng.gen_bool(0.5) {
            return LeafDescription::periodic(&left).expect("cyclically reduced");
        }
        let right = cyclically_reduced_word(rng, rank, r);
        let center = reduced_word(rng, rank, c);
        if let Ok(leaf) = LeafDescription::eventually_periodic(&left, &center, &right) {
            return leaf;
        }
    }
}

/// Union of one to three random leaf languages.
pub fn language<R: Rng + ?Sized>(rng: &mut R, rank: usize, depth: usize) -> Result<LaminaryLanguage> {
    let count = rng.gen_range(1..=3);
    let mut lang = language_of_leaf(&leaf(rng, rank), depth)?;
    for _ in 1..count {
        lang = lang.union(&language_of_leaf(&leaf(rng, rank), depth)?)?;
    }
    Ok(lang)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_objects_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let w = cyclically_reduced_word(&mut rng, 3, 5);
            assert!(w.is_cyclically_reduced() && w.len() == 5);
            combination(&mut rng, 2, 4, 3).unwrap();
            let lang = language(&mut rng, 3, 3).unwrap();
            LaminaryLanguage::new(3, 3, lang.words().clone()).unwrap();
        }
    }
}
