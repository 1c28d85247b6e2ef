//! Finite descriptions of single biinfinite words.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::LaminaryLanguage;
use crate::error::{Error, Result};
use crate::free_group::{is_reduced, Automorphism, CyclicWord, Letter, Word};

/// Substitution words are never grown past this many letters.
const MAX_SUBSTITUTION_LEN: usize = 1 << 26;

/// A biinfinite reduced word. The origin sits after the center word of an
/// eventually periodic leaf (`…LLL C · RRR…`), at the start of a period for a
/// periodic leaf, and at the start of the one-sided fixed point for a
/// substitution leaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeafDescription {
    Periodic { period: CyclicWord },
    EventuallyPeriodic { left: Word, center: Word, right: Word },
    Substitution { automorphism: Automorphism, seed: Letter },
}

fn check_period(p: &Word, what: &str) -> Result<()> {
    if p.is_empty() || !p.is_cyclically_reduced() {
        return Err(Error::InvalidLeaf(format!("{what} period {p} must be nonempty and cyclically reduced")));
    }
    Ok(())
}

impl LeafDescription {
    pub fn periodic(period: &Word) -> Result<LeafDescription> {
        check_period(period, "the")?;
        Ok(LeafDescription::Periodic { period: CyclicWord::new(period.clone())? })
    }

    pub fn eventually_periodic(left: &Word, center: &Word, right: &Word) -> Result<LeafDescription> {
        check_period(left, "left")?;
        check_period(right, "right")?;
        if left.rank() != right.rank() || left.rank() != center.rank() {
            return Err(Error::RankMismatch(left.rank(), right.rank().max(center.rank())));
        }
        let joined: Vec<Letter> = [left.letters(), center.letters(), right.letters()].concat();
        if !is_reduced(&joined) {
            return Err(Error::InvalidLeaf(format!("{left} | {center} | {right} cancels at a junction")));
        }
        Ok(LeafDescription::EventuallyPeriodic { left: left.clone(), center: center.clone(), right: right.clone() })
    }

    pub fn substitution(automorphism: &Automorphism, seed: Letter) -> Result<LeafDescription> {
        if !automorphism.is_positive() {
            return Err(Error::NotPositive);
        }
        if seed.generator() > automorphism.rank() || !seed.is_positive() {
            return Err(Error::InvalidLeaf(format!("seed {seed} is not a basis letter")));
        }
        let image = &automorphism.images()[seed.generator() - 1];
        if image.first() != Some(seed) || image.len() < 2 {
            return Err(Error::NoProlongableSeed);
        }
        Ok(LeafDescription::Substitution { automorphism: automorphism.clone(), seed })
    }

    /// Uses the first prolongable basis letter as seed.
    pub fn substitution_any_seed(automorphism: &Automorphism) -> Result<LeafDescription> {
        let seed = prolongable_seed(automorphism)?;
        LeafDescription::substitution(automorphism, seed)
    }

    pub fn rank(&self) -> usize {
        match self {
            LeafDescription::Periodic { period } => period.rank(),
            LeafDescription::EventuallyPeriodic { center, .. } => center.rank(),
            LeafDescription::Substitution { automorphism, .. } => automorphism.rank(),
        }
    }

    /// The `2n+1` letters at positions `−n..=n` around the origin.
    pub fn central_window(&self, n: usize) -> Result<Word> {
        let len = 2 * n + 1;
        let letters: Vec<Letter> = match self {
            LeafDescription::Periodic { period } => {
                let p = period.letters();
                (-(n as i64)..=n as i64).map(|i| p[i.rem_euclid(p.len() as i64) as usize]).collect()
            }
            LeafDescription::EventuallyPeriodic { left, center, right } => {
                let (l, c, r) = (left.letters(), center.letters(), right.letters());
                (-(n as i64)..=n as i64)
                    .map(|i| {
                        if i >= 0 {
                            r[i as usize % r.len()]
                        } else if i >= -(c.len() as i64) {
                            c[(c.len() as i64 + i) as usize]
                        } else {
                            let back = (-i) as usize - c.len() - 1;
                            l[l.len() - 1 - back % l.len()]
                        }
                    })
                    .collect()
            }
            LeafDescription::Substitution { automorphism, seed } => {
                let mut w = Word::letter(automorphism.rank(), *seed);
                while w.len() < len {
                    w = automorphism.apply(&w)?;
                }
                w.letters()[..len].to_vec()
            }
        };
        Ok(Word::from_reduced_unchecked(self.rank(), letters))
    }

    pub fn from_toml(text: &str) -> Result<LeafDescription> {
        let file: LeafFile = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let rank = file.rank;
        let word = |field: &Option<String>, name: &str| -> Result<Word> {
            let s = field.as_ref().ok_or_else(|| Error::InvalidLeaf(format!("missing field `{name}`")))?;
            Word::parse(s, rank)
        };
        match file.kind.as_str() {
            "periodic" => LeafDescription::periodic(&word(&file.period, "period")?),
            "eventually_periodic" => {
                let center = match &file.center {
                    Some(s) => Word::parse(s, rank)?,
                    None => Word::identity(rank),
                };
                LeafDescription::eventually_periodic(&word(&file.left, "left")?, &center, &word(&file.right, "right")?)
            }
            "substitution" => {
                let images = file.images.as_ref().ok_or_else(|| Error::InvalidLeaf("missing [images]".into()))?;
                let (auto, _) = Automorphism::from_tables(rank, images, file.inverse_images.as_ref())?;
                match &file.seed {
                    Some(s) => {
                        let seed = word(&Some(s.clone()), "seed")?;
                        let [x] = seed.letters() else {
                            return Err(Error::InvalidLeaf(format!("seed {seed} must be one letter")));
                        };
                        LeafDescription::substitution(&auto, *x)
                    }
                    None => LeafDescription::substitution_any_seed(&auto),
                }
            }
            other => Err(Error::InvalidLeaf(format!("unknown kind {other:?}"))),
        }
    }

    pub fn to_toml(&self) -> String {
        let mut file = LeafFile { rank: self.rank(), ..LeafFile::default() };
        match self {
            LeafDescription::Periodic { period } => {
                file.kind = "periodic".into();
                file.period = Some(period.as_word().to_string());
            }
            LeafDescription::EventuallyPeriodic { left, center, right } => {
                file.kind = "eventually_periodic".into();
                file.left = Some(left.to_string());
                file.center = Some(center.to_string());
                file.right = Some(right.to_string());
            }
            LeafDescription::Substitution { automorphism, seed } => {
                let table = |ws: &[Word]| -> BTreeMap<String, String> {
                    ws.iter().enumerate().map(|(i, w)| (Letter::new(i + 1, true).to_string(), w.to_string())).collect()
                };
                file.kind = "substitution".into();
                file.seed = Some(seed.to_string());
                file.images = Some(table(automorphism.images()));
                file.inverse_images = automorphism.inverse_images().map(table);
            }
        }
        toml::to_string(&file).expect("leaf file serializes")
    }
}

pub(crate) fn prolongable_seed(automorphism: &Automorphism) -> Result<Letter> {
    automorphism
        .images()
        .iter()
        .enumerate()
        .map(|(i, img)| (Letter::new(i + 1, true), img))
        .find(|(x, img)| img.first() == Some(*x) && img.len() >= 2)
        .map(|(x, _)| x)
        .ok_or(Error::NoProlongableSeed)
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LeafFile {
    kind: String,
    rank: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    period: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    left: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    center: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    right: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    images: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inverse_images: Option<BTreeMap<String, String>>,
}

/// All subwords of length `1..=depth` of the leaf and of its inverse.
pub fn language_of_leaf(leaf: &LeafDescription, depth: usize) -> Result<LaminaryLanguage> {
    if depth == 0 {
        return Err(Error::InvalidLeaf("depth must be at least 1".into()));
    }
    let rank = leaf.rank();
    let repeat = |p: &Word| -> Vec<Letter> {
        let copies = depth / p.len() + 2;
        p.letters().iter().copied().cycle().take(copies * p.len()).collect()
    };
    let words = match leaf {
        LeafDescription::Periodic { period } => {
            LaminaryLanguage::factor_set(rank, depth, &[&repeat(period.as_word())])
        }
        LeafDescription::EventuallyPeriodic { left, center, right } => {
            let seq = [repeat(left), center.letters().to_vec(), repeat(right)].concat();
            LaminaryLanguage::factor_set(rank, depth, &[&seq])
        }
        LeafDescription::Substitution { automorphism, seed } => {
            let mut w = Word::letter(rank, *seed);
            let mut factors = LaminaryLanguage::factor_set(rank, depth, &[w.letters()]);
            loop {
                w = automorphism.apply(&w)?;
                if w.len() > MAX_SUBSTITUTION_LEN {
                    return Err(Error::InvalidLeaf("factor set did not stabilize".into()));
                }
                let next = LaminaryLanguage::factor_set(rank, depth, &[w.letters()]);
                if next == factors {
                    break next;
                }
                factors = next;
            }
        }
    };
    LaminaryLanguage::new(rank, depth, words).map_err(|e| Error::InvalidLeaf(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::tribonacci;
    use std::collections::BTreeSet;

    fn w(s: &str, rank: usize) -> Word {
        Word::parse(s, rank).unwrap()
    }

    #[test]
    fn isolated_b_language() {
        let leaf = LeafDescription::eventually_periodic(&w("a", 2), &w("b", 2), &w("a", 2)).unwrap();
        let lang = language_of_leaf(&leaf, 2).unwrap();
        let expected: BTreeSet<Word> = ["a", "b", "A", "B", "aa", "ab", "ba", "AA", "BA", "AB"].iter().map(|s| w(s, 2)).collect();
        assert_eq!(lang.words(), &expected);
    }

    #[test]
    fn periodic_powers() {
        for depth in 1..=4 {
            let lang = language_of_leaf(&LeafDescription::periodic(&w("a", 2)).unwrap(), depth).unwrap();
            assert_eq!(lang.len(), 2 * depth);
            assert!(lang.words().iter().all(|v| v.to_string().chars().all(|c| c == 'a') || v.to_string().chars().all(|c| c == 'A')));
        }
    }

    #[test]
    fn tribonacci_factors() {
        let leaf = LeafDescription::substitution(&tribonacci(), Letter::new(1, true)).unwrap();
        let lang = language_of_leaf(&leaf, 2).unwrap();
        for s in ["ab", "ac", "ba", "ca", "aa"] {
            assert!(lang.contains(&w(s, 3)), "{s}");
            assert!(lang.contains(&w(s, 3).inverse()));
        }
        for s in ["bb", "cc", "cb"] {
            assert!(!lang.contains(&w(s, 3)), "{s}");
        }
    }

    #[test]
    fn depth_monotone() {
        let leaves = [
            LeafDescription::periodic(&w("aBab", 2)).unwrap(),
            LeafDescription::eventually_periodic(&w("ab", 2), &w("bb", 2), &w("A", 2)).unwrap(),
            LeafDescription::substitution(&tribonacci(), Letter::new(1, true)).unwrap(),
        ];
        for leaf in &leaves {
            let deep = language_of_leaf(leaf, 5).unwrap();
            for d in 1..5 {
                assert_eq!(deep.restrict(d).unwrap(), language_of_leaf(leaf, d).unwrap());
            }
            assert!(deep.words().iter().all(|v| deep.contains(&v.inverse())));
        }
    }

    #[test]
    fn invalid_descriptions() {
        assert!(LeafDescription::eventually_periodic(&w("a", 2), &w("A", 2), &w("b", 2)).is_err());
        assert!(LeafDescription::eventually_periodic(&w("a", 2), &w("", 2), &w("A", 2)).is_err());
        assert!(LeafDescription::periodic(&w("abA", 2)).is_err());
        assert!(LeafDescription::periodic(&w("", 2)).is_err());
        assert!(matches!(
            LeafDescription::substitution(&tribonacci(), Letter::new(2, true)),
            Err(Error::NoProlongableSeed)
        ));
        assert!(matches!(
            LeafDescription::substitution(&crate::fixtures::tribonacci_inverse(), Letter::new(1, true)),
            Err(Error::NotPositive)
        ));
    }

    #[test]
    fn central_windows() {
        let leaf = LeafDescription::eventually_periodic(&w("ab", 2), &w("bb", 2), &w("a", 2)).unwrap();
        // …abab bb · aaa…
        assert_eq!(leaf.central_window(1).unwrap(), w("baa", 2));
        assert_eq!(leaf.central_window(3).unwrap(), w("bbbaaaa", 2));
        assert_eq!(leaf.central_window(4).unwrap(), w("abbbaaaaa", 2));
        assert!(LeafDescription::eventually_periodic(&w("ab", 2), &w("BB", 2), &w("a", 2)).is_err());
        let sub = LeafDescription::substitution(&tribonacci(), Letter::new(1, true)).unwrap();
        assert_eq!(sub.central_window(3).unwrap(), w("abacaba", 3));
        let per = LeafDescription::periodic(&w("ab", 2)).unwrap();
        assert_eq!(per.central_window(1).unwrap(), w("bab", 2));
    }

    #[test]
    fn toml_round_trip() {
        let leaves = [
            LeafDescription::periodic(&w("ab", 2)).unwrap(),
            LeafDescription::eventually_periodic(&w("a", 2), &w("b", 2), &w("a", 2)).unwrap(),
            LeafDescription::substitution(&tribonacci(), Letter::new(1, true)).unwrap(),
        ];
        for leaf in leaves {
            assert_eq!(LeafDescription::from_toml(&leaf.to_toml()).unwrap(), leaf);
        }
        let text = "kind = \"eventually_periodic\"\nrank = 2\nleft = \"a\"\ncenter = \"b\"\nright = \"a\"\n";
        assert!(LeafDescription::from_toml(text).is_ok());
        assert!(LeafDescription::from_toml("kind = \"spiral\"\nrank = 2\n").is_err());
    }
}
