//! Exact verification kernel for effective pluricanonical bounds of minimal
//! terminal threefolds of Kodaira dimension one.
//!
//! - [`baskets`]: plurigenus formula, `K.c2`, `lambda` and the `chi(mK) >= 0` filter.
//! - [`enumeration`]: exhaustive basket search in a `lambda` window.
//! - [`moduli_search`]: exact minimization of the reduced `deg A` expressions,
//!   the orbifold (Hurwitz) minimum and admissible moduli indices.
//! - [`bounds`]: assembly of the final thresholds for each fiber type.

pub mod baskets;
pub mod bounds;
pub mod enumeration;
pub mod error;
pub mod moduli_search;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
