//! P1 finite-element machinery on a [`Mesh`](crate::mesh::Mesh).

mod assembly;
mod function;
mod loads;
mod projection;
mod solver;
mod space;
mod sparse;

pub use assembly::{assemble_full_stiffness, assemble_stiffness, barycentric_gradients, element_stiffness};
pub use function::{CellField, CellwiseFunction, ClippedField, FeFunction};
pub use loads::{
    clipped_norm_squared, load_cellwise, load_clipped_linear, load_point, load_point_in_cell, load_smooth, mass_apply,
};
pub use projection::{cell_means, centroid_project, l2_project_cells};
pub use solver::{factorize, factorize_with, Factorization, SolverKind};
pub use space::FeSpace;
pub use sparse::CsrMatrix;

use crate::{Point, Result};

/// Point evaluation of a nodal field.
pub fn evaluate(u: &FeFunction<'_>, x: Point) -> Result<f64> {
    u.evaluate(x)
}
