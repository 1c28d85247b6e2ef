use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::word::{check_rank, push_reduced, Letter, Word};
use crate::error::{Error, Result};

/// Above this many words the exhaustive cancellation search falls back to the
/// coarse Lipschitz bound.
const EXHAUSTIVE_SEARCH_LIMIT: usize = 2_000_000;

/// An automorphism of `F_N` given by basis images, with optional inverse
/// images that are verified on construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Automorphism {
    rank: usize,
    images: Vec<Word>,
    inverse_images: Option<Vec<Word>>,
    // indexed by Letter::code
    letter_images: Vec<Vec<Letter>>,
}

/// A letter of the reduced image of a word, tagged with the position of the
/// source letter (`block`) and its offset inside that letter's image.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) struct TracedLetter {
    pub letter: Letter,
    pub block: usize,
    pub offset: usize,
}

impl Automorphism {
    pub fn new(rank: usize, images: Vec<Word>, inverse_images: Option<Vec<Word>>) -> Result<Automorphism> {
        check_rank(rank)?;
        if images.len() != rank {
            return Err(Error::InvalidAutomorphism(format!(
                "expected {rank} images, got {}",
                images.len()
            )));
        }
        for w in images.iter().chain(inverse_images.iter().flatten()) {
            if w.rank() != rank {
                return Err(Error::RankMismatch(rank, w.rank()));
            }
            if w.is_empty() {
                return Err(Error::InvalidAutomorphism("a basis image is trivial".into()));
            }
        }
        if let Some(inv) = &inverse_images {
            if inv.len() != rank {
                return Err(Error::InvalidAutomorphism(format!(
                    "expected {rank} inverse images, got {}",
                    inv.len()
                )));
            }
        }
        let auto = Automorphism::build(rank, images, inverse_images);
        auto.verify_inverse()?;
        Ok(auto)
    }

    fn build(rank: usize, images: Vec<Word>, inverse_images: Option<Vec<Word>>) -> Automorphism {
        let letter_images = Letter::alphabet(rank)
            .map(|x| {
                let img = &images[x.index0()];
                if x.is_positive() {
                    img.letters().to_vec()
                } else {
                    img.inverse().into_letters()
                }
            })
            .collect();
        Automorphism { rank, images, inverse_images, letter_images }
    }

    pub fn identity(rank: usize) -> Automorphism {
        let images: Vec<Word> = (1..=rank).map(|g| Word::letter(rank, Letter::new(g, true))).collect();
        Automorphism::build(rank, images.clone(), Some(images))
    }

    fn verify_inverse(&self) -> Result<()> {
        let Some(inv) = &self.inverse_images else { return Ok(()) };
        let inverse = Automorphism::build(self.rank, inv.clone(), None);
        for g in 1..=self.rank {
            let x = Word::letter(self.rank, Letter::new(g, true));
            if self.apply(&inverse.apply(&x)?)? != x || inverse.apply(&self.apply(&x)?)? != x {
                return Err(Error::InvalidAutomorphism(format!(
                    "inverse images do not invert generator {x}"
                )));
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn inverse_images(&self) -> Option<&[Word]> {
        self.inverse_images.as_deref()
    }

    /// The inverse automorphism, when inverse images were supplied.
    pub fn inverse(&self) -> Option<Automorphism> {
        self.inverse_images
            .as_ref()
            .map(|inv| Automorphism::build(self.rank, inv.clone(), Some(self.images.clone())))
    }

    pub(crate) fn letter_image(&self, x: Letter) -> &[Letter] {
        &self.letter_images[x.code()]
    }

    /// All basis images are positive words.
    pub fn is_positive(&self) -> bool {
        self.images.iter().all(Word::is_positive)
    }

    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch(self.rank, w.rank()));
        }
        let mut stack = Vec::with_capacity(w.len() * self.max_image_len());
        for &x in w.letters() {
            for &y in self.letter_image(x) {
                push_reduced(&mut stack, y);
            }
        }
        Ok(Word::from_reduced_unchecked(self.rank, stack))
    }

    /// Reduced image of a letter sequence, each surviving letter tagged with
    /// its source position.
    pub(crate) fn apply_traced(&self, letters: &[Letter]) -> Vec<TracedLetter> {
        let mut stack: Vec<TracedLetter> = Vec::new();
        for (block, &x) in letters.iter().enumerate() {
            for (offset, &y) in self.letter_image(x).iter().enumerate() {
                if stack.last().map(|t| t.letter) == Some(y.inverse()) {
                    stack.pop();
                } else {
                    stack.push(TracedLetter { letter: y, block, offset });
                }
            }
        }
        stack
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch(self.rank, other.rank));
        }
        let images = other.images.iter().map(|w| self.apply(w)).collect::<Result<Vec<_>>>()?;
        let inverse_images = match (&self.inverse_images, other.inverse()) {
            (Some(inv), Some(other_inv)) => {
                Some(inv.iter().map(|w| other_inv.apply(w)).collect::<Result<Vec<_>>>()?)
            }
            _ => None,
        };
        Ok(Automorphism::build(self.rank, images, inverse_images))
    }

    pub fn power(&self, k: usize) -> Automorphism {
        let mut acc = Automorphism::identity(self.rank);
        if self.inverse_images.is_none() {
            acc.inverse_images = None;
        }
        for _ in 0..k {
            acc = self.compose(&acc).expect("equal ranks");
        }
        acc
    }

    /// Number of cancelled letter pairs when `α(x)·α(y)` is reduced, maximized
    /// over reduced two-letter words `xy` with `x, y ∈ A^{±1}`.
    pub fn bounded_cancellation(&self) -> usize {
        let mut best = 0;
        for x in Letter::alphabet(self.rank) {
            for y in Letter::alphabet(self.rank) {
                if y == x.inverse() {
                    continue;
                }
                let a = self.letter_image(x);
                let b = self.letter_image(y);
                let c = a.iter().rev().zip(b).take_while(|(p, q)| **p == q.inverse()).count();
                best = best.max(c);
            }
        }
        best
    }

    /// A certified bound on the cancellation between `α(u)` and `α(v)` over
    /// all reduced products `uv`, including infinite rays.
    ///
    /// Positive automorphisms get the exact constant from a finite automaton
    /// search; otherwise inverse images are required.
    pub fn cancellation_bound(&self) -> Result<usize> {
        if self.is_positive() {
            let forward: Vec<Vec<Letter>> = self.images.iter().map(|w| w.letters().to_vec()).collect();
            let backward: Vec<Vec<Letter>> =
                forward.iter().map(|w| w.iter().rev().copied().collect()).collect();
            return Ok(positive_run_cancellation(&forward)?.max(positive_run_cancellation(&backward)?));
        }
        let inverse = self.inverse().ok_or_else(|| {
            Error::NoCancellationBound("non-positive automorphism without inverse images".into())
        })?;
        let lip = self.max_image_len();
        let lip_inv = inverse.max_image_len();
        let window = (lip_inv * (2 * lip).saturating_sub(2)).max(2);
        match self.exhaustive_cancellation(window) {
            Some(c) => Ok(c),
            None => Ok((lip_inv * lip.saturating_sub(1) * lip).max(self.bounded_cancellation())),
        }
    }

    /// Maximum junction cancellation over reduced words of length `<= max_len`,
    /// or `None` if there are too many words to enumerate.
    fn exhaustive_cancellation(&self, max_len: usize) -> Option<usize> {
        let two_n = 2 * self.rank;
        let mut count = 0usize;
        let mut layer = two_n;
        for _ in 1..max_len {
            layer = layer.checked_mul(two_n - 1)?;
            count = count.checked_add(layer)?;
        }
        if count > EXHAUSTIVE_SEARCH_LIMIT {
            return None;
        }
        // cancellation between α(u) and α(v) for reduced uv; by left
        // invariance it suffices to enumerate words z and split points.
        let mut best = 0;
        let mut word: Vec<Letter> = Vec::with_capacity(max_len);
        self.search_words(&mut word, max_len, &mut best);
        Some(best)
    }

    fn search_words(&self, word: &mut Vec<Letter>, max_len: usize, best: &mut usize) {
        if word.len() >= 2 {
            let full = self.image_len(word);
            for j in 1..word.len() {
                let c = (self.image_len(&word[..j]) + self.image_len(&word[j..]) - full) / 2;
                *best = (*best).max(c);
            }
        }
        if word.len() == max_len {
            return;
        }
        for x in Letter::alphabet(self.rank) {
            if word.last() == Some(&x.inverse()) {
                continue;
            }
            word.push(x);
            self.search_words(word, max_len, best);
            word.pop();
        }
    }

    fn image_len(&self, letters: &[Letter]) -> usize {
        let mut stack = Vec::new();
        for &x in letters {
            for &y in self.letter_image(x) {
                push_reduced(&mut stack, y);
            }
        }
        stack.len()
    }

    pub fn from_toml(text: &str) -> Result<(Automorphism, Vec<String>)> {
        let file: AutomorphismFile = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Automorphism::from_tables(file.rank, &file.images, file.inverse_images.as_ref())
    }

    /// Builds from `generator -> word` tables; images that reduce are stored
    /// reduced and reported as warnings.
    pub fn from_tables(
        rank: usize,
        images: &BTreeMap<String, String>,
        inverse_images: Option<&BTreeMap<String, String>>,
    ) -> Result<(Automorphism, Vec<String>)> {
        check_rank(rank)?;
        let mut warnings = Vec::new();
        let mut read = |table: &BTreeMap<String, String>, what: &str| {
            let mut out = Vec::with_capacity(rank);
            for g in 1..=rank {
                let key = Letter::new(g, true).to_string();
                let text = table.get(&key).ok_or_else(|| {
                    Error::InvalidAutomorphism(format!("missing {what} for generator {key}"))
                })?;
                let (w, changed) = Word::parse_reducing(text, rank)?;
                if changed {
                    warnings.push(format!("{what} of {key}: {text} reduced to {w}"));
                }
                out.push(w);
            }
            if let Some(extra) = table.keys().find(|k| {
                k.len() != 1 || Letter::from_char(k.chars().next().unwrap()).is_none_or(|x| !x.is_positive() || x.generator() > rank)
            }) {
                return Err(Error::InvalidAutomorphism(format!("unexpected key {extra:?} in {what}")));
            }
            Ok::<_, Error>(out)
        };
        let images = read(images, "image")?;
        let inverse_images = inverse_images.map(|t| read(t, "inverse image")).transpose()?;
        Ok((Automorphism::new(rank, images, inverse_images)?, warnings))
    }

    pub fn to_toml(&self) -> String {
        let table = |ws: &[Word]| -> BTreeMap<String, String> {
            ws.iter()
                .enumerate()
                .map(|(i, w)| (Letter::new(i + 1, true).to_string(), w.to_string()))
                .collect()
        };
        let file = AutomorphismFile {
            rank: self.rank,
            images: table(&self.images),
            inverse_images: self.inverse_images.as_deref().map(table),
        };
        toml::to_string(&file).expect("automorphism file serializes")
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .images
            .iter()
            .enumerate()
            .map(|(i, w)| format!("{}->{}", Letter::new(i + 1, true), w))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomorphismFile {
    rank: usize,
    images: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inverse_images: Option<BTreeMap<String, String>>,
}

/// Longest common prefix of `img(x P)` and `img(y N)` over positive words with
/// distinct first letters `x != y`, where `images` are positive letter
/// sequences indexed by generator.
///
/// Both sides consume images letter by letter; the unmatched rest of the
/// longer side is the search state. A cycle among states or two sides ending
/// together would mean the map is not injective.
fn positive_run_cancellation(images: &[Vec<Letter>]) -> Result<usize> {
    let mut memo: HashMap<Vec<Letter>, Option<usize>> = HashMap::new();
    let mut best = 0;
    for (x, a) in images.iter().enumerate() {
        for (y, b) in images.iter().enumerate() {
            if x != y {
                best = best.max(match_against(images, a, b, &mut memo)?);
            }
        }
    }
    Ok(best)
}

fn match_against(
    images: &[Vec<Letter>],
    a: &[Letter],
    b: &[Letter],
    memo: &mut HashMap<Vec<Letter>, Option<usize>>,
) -> Result<usize> {
    let c = a.iter().zip(b).take_while(|(p, q)| p == q).count();
    if c < a.len().min(b.len()) {
        return Ok(c);
    }
    if a.len() == b.len() {
        return Err(Error::InvalidAutomorphism("images are not injective on positive words".into()));
    }
    let rest = if a.len() < b.len() { &b[c..] } else { &a[c..] };
    Ok(c + pending_best(images, rest, memo)?)
}

fn pending_best(
    images: &[Vec<Letter>],
    pending: &[Letter],
    memo: &mut HashMap<Vec<Letter>, Option<usize>>,
) -> Result<usize> {
    match memo.get(pending) {
        Some(Some(v)) => return Ok(*v),
        Some(None) => {
            return Err(Error::InvalidAutomorphism("unbounded cancellation between positive images".into()))
        }
        None => {}
    }
    memo.insert(pending.to_vec(), None);
    let mut best = 0;
    for img in images {
        best = best.max(match_against(images, img, pending, memo)?);
    }
    memo.insert(pending.to_vec(), Some(best));
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn w(s: &str) -> Word {
        Word::parse(s, 3).unwrap()
    }

    #[test]
    fn tribonacci_apply() {
        let alpha = fixtures::tribonacci();
        assert_eq!(alpha.apply(&w("c")).unwrap(), w("a"));
        assert_eq!(alpha.apply(&w("A")).unwrap(), w("BA"));
        assert_eq!(alpha.apply(&w("Ab")).unwrap(), w("Bc"));
        let id = Automorphism::identity(3);
        assert_eq!(id.apply(&w("aBcA")).unwrap(), w("aBcA"));
        assert!(alpha.apply(&Word::parse("a", 2).unwrap()).is_err());
    }

    #[test]
    fn compose_examples() {
        let alpha = fixtures::tribonacci();
        let inv = alpha.inverse().unwrap();
        let id = Automorphism::identity(3);
        assert_eq!(alpha.compose(&inv).unwrap().images(), id.images());
        assert_eq!(inv.compose(&alpha).unwrap().images(), id.images());
        assert_eq!(id.compose(&alpha).unwrap().images(), alpha.images());
        // α(α(c)) = α(a) = ab
        assert_eq!(alpha.compose(&alpha).unwrap().apply(&w("c")).unwrap(), w("ab"));
    }

    #[test]
    fn bad_inverse_rejected() {
        let images = vec![w("ab"), w("ac"), w("a")];
        let wrong = vec![w("c"), w("Ca"), w("Cab")];
        assert!(Automorphism::new(3, images, Some(wrong)).is_err());
    }

    #[test]
    fn two_letter_cancellation() {
        assert_eq!(Automorphism::identity(3).bounded_cancellation(), 0);
        // a⁻¹b ↦ b⁻¹a⁻¹·ac
        assert_eq!(fixtures::tribonacci().bounded_cancellation(), 1);
        // ab ↦ c·c⁻¹a
        assert!(fixtures::tribonacci_inverse().bounded_cancellation() >= 1);
    }

    #[test]
    fn certified_cancellation() {
        assert_eq!(Automorphism::identity(2).cancellation_bound().unwrap(), 0);
        assert_eq!(fixtures::tribonacci().cancellation_bound().unwrap(), 1);
        assert_eq!(fixtures::tribonacci_inverse().cancellation_bound().unwrap(), 1);
        let no_inverse = Automorphism::new(2, vec![Word::parse("aB", 2).unwrap(), Word::parse("b", 2).unwrap()], None).unwrap();
        assert!(no_inverse.cancellation_bound().is_err());
    }

    #[test]
    fn cancellation_can_exceed_two_letter_value() {
        // a ↦ a, b ↦ a²b: a⁻²·b ↦ a⁻²·a²b cancels two letters at one junction.
        let p = |s: &str| Word::parse(s, 2).unwrap();
        let alpha = Automorphism::new(2, vec![p("a"), p("aab")], Some(vec![p("a"), p("AAb")])).unwrap();
        assert_eq!(alpha.bounded_cancellation(), 1);
        assert_eq!(alpha.cancellation_bound().unwrap(), 2);
        let inverse = alpha.inverse().unwrap();
        assert_eq!(inverse.cancellation_bound().unwrap(), 2);
        assert_eq!(alpha.exhaustive_cancellation(6).unwrap(), 2);
    }

    #[test]
    fn toml_round_trip() {
        let alpha = fixtures::tribonacci();
        let (back, warnings) = Automorphism::from_toml(&alpha.to_toml()).unwrap();
        assert_eq!(back, alpha);
        assert!(warnings.is_empty());
    }

    #[test]
    fn toml_reduces_images_with_warning() {
        let text = "rank = 2\n[images]\na = \"abB\"\nb = \"b\"\n";
        let (alpha, warnings) = Automorphism::from_toml(text).unwrap();
        assert_eq!(alpha.images()[0], Word::parse("a", 2).unwrap());
        assert_eq!(warnings.len(), 1);
        assert!(Automorphism::from_toml("rank = 2\n[images]\na = \"a\"\n").is_err());
    }
}
