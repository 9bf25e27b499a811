//! Collocation grid, quadrature, and intrinsic operators for axisymmetric 2-metrics.

mod field;
mod grid;
pub mod legendre;
mod metric;

pub use field::{AxisymTensor, OneFormField, ScalarField};
pub use grid::{Grid, NodeOperator, DEFAULT_NODES, MIN_NODES};
pub use metric::AxisymMetric;

use std::sync::Arc;

use crate::error::Result;

/// Shared Gauss–Legendre grid with `n` interior nodes.
pub fn make_grid(n: usize) -> Result<Arc<Grid>> {
    Grid::new(n).map(Arc::new)
}
