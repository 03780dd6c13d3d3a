//! Optimal index assignment for K-description scalar quantization.
//!
//! The K side quantizers are translated copies of `Kζ·ℤ`, interleaved so that
//! their union forms the reference quantizer `ζ·ℤ`. Central points in one
//! reference cell are labeled with the cheapest K-tuples whose coordinate
//! vectors are points of the translated root lattice `A_{K-1} + s`; every other
//! cell follows by a translation/permutation rule.
//!
//! Modules:
//!
//! * [`lattice`]: the translated lattice, exact shell enumeration and theta series.
//! * [`quantizer`]: side, central and reference quantizer geometry.
//! * [`labeling`]: the label table, labeling/unlabeling, costs and the brute-force oracle.
//! * [`ia_matrix`]: the two-description IA matrix built from the fundamental pattern.
//! * [`analysis`]: high-rate rate and distortion expressions.
//! * [`sim`]: Monte Carlo erasure-channel simulation and the non-staggered baseline.

pub mod analysis;
pub mod error;
pub mod ia_matrix;
pub mod labeling;
pub mod lattice;
pub mod quantizer;
pub mod sim;

pub use error::{Error, Result};
pub use quantizer::QuantizerConfig;

/// Exact rational numbers used for norms and costs.
pub type Rational = num_rational::Ratio<i64>;
