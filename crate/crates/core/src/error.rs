use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected} nodes, got {actual}")]
    Dimension { expected: usize, actual: usize },

    /// `P^2 - u_θ^2` is not positive, so no convex surface of revolution realizes the metric.
    #[error("metric is not embeddable as a surface of revolution: node {node} (theta = {theta:.6}) has margin {margin:.3e}")]
    NonEmbeddable { node: usize, theta: f64, margin: f64 },

    #[error("mean curvature vector is not spacelike: node {node} (theta = {theta:.6}) has <H,H> = {mean_sq:.3e}")]
    NonSpacelike { node: usize, theta: f64, mean_sq: f64 },

    #[error("radius {r} is not outside the horizon of mass {m} (need r > 2m)")]
    Horizon { m: f64, r: f64 },

    #[error("invalid physical data at node {node}: {field} = {value}")]
    InvalidData { node: usize, field: &'static str, value: f64 },

    #[error("convexity guard violated: margin {margin:.3e}")]
    GuardViolated { margin: f64 },

    #[error("line search failed after backtracking to step {step:.3e}")]
    LineSearch { step: f64 },

    #[error("{path}: row {row}, column `{column}`: {reason}")]
    Table {
        path: PathBuf,
        row: usize,
        column: String,
        reason: String,
    },

    #[error("{path}: node mismatch: {reason}")]
    NodeMismatch { path: PathBuf, reason: String },

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("unknown {kind} `{name}` (available: {available})")]
    Unknown {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("missing input: {0}")]
    Missing(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("report serialization failed: {0}")]
    Serialize(#[from] toml::ser::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
