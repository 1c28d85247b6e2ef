//! Bundled automorphisms.

use crate::free_group::{Automorphism, Word};

pub const TRIBONACCI_TOML: &str = include_str!("../data/tribonacci.toml");
pub const TRIBONACCI_INVERSE_TOML: &str = include_str!("../data/tribonacci_inverse.toml");

/// `a ↦ ab, b ↦ ac, c ↦ a` on `F_3`, with inverse images.
pub fn tribonacci() -> Automorphism {
    Automorphism::from_toml(TRIBONACCI_TOML).expect("bundled file parses").0
}

/// `a ↦ c, b ↦ c⁻¹a, c ↦ c⁻¹b`.
pub fn tribonacci_inverse() -> Automorphism {
    Automorphism::from_toml(TRIBONACCI_INVERSE_TOML).expect("bundled file parses").0
}

/// `a ↦ ab, b ↦ a` on `F_2`.
pub fn fibonacci() -> Automorphism {
    let w = |s: &str| Word::parse(s, 2).expect("static word");
    Automorphism::new(2, vec![w("ab"), w("a")], Some(vec![w("b"), w("Ba")])).expect("fibonacci is invertible")
}
