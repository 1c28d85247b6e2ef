//! Reduced words in a fixed basis of `F_N`, cyclic words, and automorphisms
//! acting on words.

mod automorphism;
mod word;

pub use automorphism::Automorphism;
pub use word::{CyclicWord, Letter, Word, MAX_RANK};
pub(crate) use word::is_reduced;
