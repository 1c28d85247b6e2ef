//! Exact computations with geodesic currents on free groups.
//!
//! Currents are handled through their depth-truncated Kolmogorov functions:
//! nonnegative rational tables on reduced words that are symmetric under
//! inversion and additive over one-letter extensions.

pub mod error;
pub mod fixtures;
pub mod free_group;
pub mod rational;

pub mod currents;
pub mod laminations;
pub mod pushforward;
pub mod carrier_lp;
pub mod spectral;

pub mod random;

pub use error::{Error, Result};
pub use free_group::{Automorphism, CyclicWord, Letter, Word};
pub use rational::Rational;
