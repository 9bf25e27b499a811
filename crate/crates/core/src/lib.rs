//! Numerical laboratory for the quasi-local energy of axially symmetric
//! spacelike 2-surfaces: reference embeddings, the energy functional and its
//! Euler–Lagrange residual, minimization over time functions, and numerical
//! checks of the comparison inequalities.

pub mod cli;
pub mod error;
pub mod embedding;
pub mod energy;
pub mod geometry;
pub mod optimize;
pub mod physdata;
pub mod registry;
pub mod verify;

pub use error::{Error, Result};
