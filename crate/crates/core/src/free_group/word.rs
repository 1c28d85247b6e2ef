use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported rank: one lowercase ASCII letter per generator.
pub const MAX_RANK: usize = 26;

/// A generator or its inverse. Ordered by generator index, positive before
/// negative, so the alphabet of rank 2 sorts as `a < A < b < B`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter {
    index: u8,
    inverse: bool,
}

impl Letter {
    /// `generator` is 1-based.
    pub fn new(generator: usize, positive: bool) -> Letter {
        assert!((1..=MAX_RANK).contains(&generator), "generator {generator} out of range");
        Letter { index: (generator - 1) as u8, inverse: !positive }
    }

    pub fn generator(self) -> usize {
        self.index as usize + 1
    }

    pub(crate) fn index0(self) -> usize {
        self.index as usize
    }

    pub fn is_positive(self) -> bool {
        !self.inverse
    }

    pub fn inverse(self) -> Letter {
        Letter { index: self.index, inverse: !self.inverse }
    }

    /// Dense code in `0..2N`, consistent with the letter order.
    pub fn code(self) -> usize {
        2 * self.index as usize + self.inverse as usize
    }

    pub fn from_code(code: usize) -> Letter {
        Letter { index: (code / 2) as u8, inverse: code % 2 == 1 }
    }

    pub fn to_char(self) -> char {
        let c = (b'a' + self.index) as char;
        if self.inverse {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        if c.is_ascii_lowercase() {
            Some(Letter { index: c as u8 - b'a', inverse: false })
        } else if c.is_ascii_uppercase() {
            Some(Letter { index: c as u8 - b'A', inverse: true })
        } else {
            None
        }
    }

    /// All `2N` letters of the given rank, in letter order.
    pub fn alphabet(rank: usize) -> impl Iterator<Item = Letter> + Clone {
        (0..2 * rank).map(Letter::from_code)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

pub(crate) fn check_rank(rank: usize) -> Result<()> {
    if (1..=MAX_RANK).contains(&rank) {
        Ok(())
    } else {
        Err(Error::BadRank(rank))
    }
}

/// Pushes `x` onto a reduced letter stack, cancelling against the top.
/// Returns true if a cancellation happened.
#[inline]
pub(crate) fn push_reduced(stack: &mut Vec<Letter>, x: Letter) -> bool {
    if stack.last() == Some(&x.inverse()) {
        stack.pop();
        true
    } else {
        stack.push(x);
        false
    }
}

pub(crate) fn is_reduced(letters: &[Letter]) -> bool {
    letters.windows(2).all(|p| p[0] != p[1].inverse())
}

/// A freely reduced word in a fixed basis of the free group of rank `rank`.
///
/// Words are ordered shortlex: first by length, then lexicographically in
/// letter order. The empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank
            .cmp(&other.rank)
            .then(self.letters.len().cmp(&other.letters.len()))
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Word {
    pub fn identity(rank: usize) -> Word {
        Word { rank, letters: Vec::new() }
    }

    pub fn letter(rank: usize, x: Letter) -> Word {
        debug_assert!(x.generator() <= rank);
        Word { rank, letters: vec![x] }
    }

    /// Builds a word from letters that must already be reduced.
    pub fn from_letters(rank: usize, letters: Vec<Letter>) -> Result<Word> {
        check_rank(rank)?;
        if let Some(x) = letters.iter().find(|x| x.generator() > rank) {
            return Err(Error::WordSyntax {
                input: x.to_string(),
                reason: format!("letter beyond rank {rank}"),
            });
        }
        let w = Word { rank, letters };
        if !is_reduced(&w.letters) {
            return Err(Error::NotReduced(w.to_string()));
        }
        Ok(w)
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce(rank: usize, letters: impl IntoIterator<Item = Letter>) -> Result<Word> {
        check_rank(rank)?;
        let mut stack = Vec::new();
        for x in letters {
            if x.generator() > rank {
                return Err(Error::WordSyntax {
                    input: x.to_string(),
                    reason: format!("letter beyond rank {rank}"),
                });
            }
            push_reduced(&mut stack, x);
        }
        Ok(Word { rank, letters: stack })
    }

    pub(crate) fn from_reduced_unchecked(rank: usize, letters: Vec<Letter>) -> Word {
        debug_assert!(is_reduced(&letters));
        Word { rank, letters }
    }

    fn parse_letters(s: &str, rank: usize) -> Result<Vec<Letter>> {
        check_rank(rank)?;
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Vec::new());
        }
        s.chars()
            .map(|c| {
                let x = Letter::from_char(c).ok_or_else(|| Error::WordSyntax {
                    input: s.to_string(),
                    reason: format!("unexpected character {c:?}"),
                })?;
                if x.generator() > rank {
                    return Err(Error::WordSyntax {
                        input: s.to_string(),
                        reason: format!("letter {c} beyond rank {rank}"),
                    });
                }
                Ok(x)
            })
            .collect()
    }

    /// Parses the text syntax (`a..z` generators, `A..Z` inverses, `1` or
    /// empty for the identity). Rejects non-reduced input.
    pub fn parse(s: &str, rank: usize) -> Result<Word> {
        let letters = Self::parse_letters(s, rank)?;
        if !is_reduced(&letters) {
            return Err(Error::NotReduced(s.trim().to_string()));
        }
        Ok(Word { rank, letters })
    }

    /// Parses and freely reduces; the flag reports whether reduction changed
    /// the input.
    pub fn parse_reducing(s: &str, rank: usize) -> Result<(Word, bool)> {
        let letters = Self::parse_letters(s, rank)?;
        let n = letters.len();
        let w = Word::reduce(rank, letters)?;
        let changed = w.len() != n;
        Ok((w, changed))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    /// True when no inverse letter occurs.
    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|x| x.is_positive())
    }

    fn same_rank(&self, other: &Word) -> Result<()> {
        if self.rank == other.rank {
            Ok(())
        } else {
            Err(Error::RankMismatch(self.rank, other.rank))
        }
    }

    /// Reduced form of `self · other`.
    pub fn concat(&self, other: &Word) -> Result<Word> {
        self.same_rank(other)?;
        let mut stack = self.letters.clone();
        for &x in &other.letters {
            push_reduced(&mut stack, x);
        }
        Ok(Word { rank: self.rank, letters: stack })
    }

    pub fn inverse(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|x| x.inverse()).collect(),
        }
    }

    pub fn subword(&self, start: usize, end: usize) -> Word {
        Word { rank: self.rank, letters: self.letters[start..end].to_vec() }
    }

    pub fn prefix(&self, len: usize) -> Word {
        self.subword(0, len)
    }

    pub fn suffix(&self, len: usize) -> Word {
        self.subword(self.len() - len, self.len())
    }

    /// `self · x` if that is reduced.
    pub fn extend_right(&self, x: Letter) -> Option<Word> {
        if self.last() == Some(x.inverse()) {
            return None;
        }
        let mut letters = Vec::with_capacity(self.len() + 1);
        letters.extend_from_slice(&self.letters);
        letters.push(x);
        Some(Word { rank: self.rank, letters })
    }

    /// `x · self` if that is reduced.
    pub fn extend_left(&self, x: Letter) -> Option<Word> {
        if self.first() == Some(x.inverse()) {
            return None;
        }
        let mut letters = Vec::with_capacity(self.len() + 1);
        letters.push(x);
        letters.extend_from_slice(&self.letters);
        Some(Word { rank: self.rank, letters })
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) => self.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    /// Splits the word as `conjugator · core · conjugator⁻¹` with the core in
    /// canonical cyclic form.
    pub fn cyclic_reduce(&self) -> Result<(CyclicWord, Word)> {
        if self.is_empty() {
            return Err(Error::EmptyWord("cyclic_reduce"));
        }
        let n = self.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k] == self.letters[n - 1 - k].inverse() {
            k += 1;
        }
        let outer = self.prefix(k);
        let core = &self.letters[k..n - k];
        let shift = least_rotation(core);
        // core = p·s and the canonical rotation s·p equals p⁻¹·core·p.
        let p = Word { rank: self.rank, letters: core[..shift].to_vec() };
        let mut rotated = core[shift..].to_vec();
        rotated.extend_from_slice(&core[..shift]);
        let conjugator = outer.concat(&p)?;
        Ok((CyclicWord { word: Word { rank: self.rank, letters: rotated } }, conjugator))
    }

    /// Number of (possibly overlapping) positions where `pattern` occurs.
    pub fn occurrences(&self, pattern: &Word) -> Result<usize> {
        if pattern.is_empty() {
            return Err(Error::EmptyWord("occurrences"));
        }
        self.same_rank(pattern)?;
        Ok(self.letters.windows(pattern.len()).filter(|w| *w == pattern.letters()).count())
    }

    /// All reduced words of exactly `len` letters, in shortlex order.
    pub fn all_of_length(rank: usize, len: usize) -> Vec<Word> {
        let mut out = vec![Word::identity(rank)];
        for _ in 0..len {
            out = out
                .iter()
                .flat_map(|w| Letter::alphabet(rank).filter_map(move |x| w.extend_right(x)))
                .collect();
        }
        out
    }

    /// All nonempty reduced words of length at most `max_len`, shortlex.
    pub fn all_up_to(rank: usize, max_len: usize) -> Vec<Word> {
        (1..=max_len).flat_map(|l| Word::all_of_length(rank, l)).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for x in &self.letters {
            write!(f, "{}", x.to_char())?;
        }
        Ok(())
    }
}

/// Start index of the lexicographically least rotation (two-pointer
/// minimum-expression algorithm, linear time).
fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = s[(i + k) % n];
        let b = s[(j + k) % n];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// A cyclically reduced word up to rotation, stored as its least rotation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CyclicWord {
    word: Word,
}

impl CyclicWord {
    /// Canonicalizes a nonempty cyclically reduced word.
    pub fn new(word: Word) -> Result<CyclicWord> {
        if word.is_empty() {
            return Err(Error::EmptyWord("cyclic word"));
        }
        if !word.is_cyclically_reduced() {
            return Err(Error::NotReduced(format!("{word} (cyclically)")));
        }
        let shift = least_rotation(word.letters());
        let mut letters = word.letters[shift..].to_vec();
        letters.extend_from_slice(&word.letters[..shift]);
        Ok(CyclicWord { word: Word { rank: word.rank, letters } })
    }

    pub fn as_word(&self) -> &Word {
        &self.word
    }

    pub fn rank(&self) -> usize {
        self.word.rank
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        self.word.letters()
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord::new(self.word.inverse()).expect("inverse of a cyclic word is cyclically reduced")
    }

    /// `(u, m)` with `self = u^m` and `m` maximal.
    pub fn max_root(&self) -> (CyclicWord, usize) {
        let s = self.letters();
        let n = s.len();
        // KMP failure function gives the smallest period.
        let mut pi = vec![0usize; n];
        for i in 1..n {
            let mut k = pi[i - 1];
            while k > 0 && s[i] != s[k] {
                k = pi[k - 1];
            }
            if s[i] == s[k] {
                k += 1;
            }
            pi[i] = k;
        }
        let period = n - pi[n - 1];
        let p = if n.is_multiple_of(period) { period } else { n };
        // A prefix of a least rotation that tiles it is itself least.
        let root = CyclicWord { word: Word { rank: self.rank(), letters: s[..p].to_vec() } };
        (root, n / p)
    }

    /// Occurrences of `pattern` starting within one period of the biinfinite
    /// periodic word `…ccc…`.
    pub fn occurrences(&self, pattern: &Word) -> Result<usize> {
        if pattern.is_empty() {
            return Err(Error::EmptyWord("cyclic_occurrences"));
        }
        if pattern.rank() != self.rank() {
            return Err(Error::RankMismatch(self.rank(), pattern.rank()));
        }
        let s = self.letters();
        let n = s.len();
        let p = pattern.letters();
        Ok((0..n).filter(|&i| p.iter().enumerate().all(|(j, x)| s[(i + j) % n] == *x)).count())
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.word)
    }
}
