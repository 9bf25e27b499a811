//! Numerical certification of the comparison theorems and supporting
//! identities over sampled inputs.

mod report;
mod sample;
mod suites;

pub use report::{Check, EqualityCase, Relation, TheoremReport};
pub use sample::{coefficient_box, symmetric, Sampler, DEFAULT_SEED};
pub use suites::*;
