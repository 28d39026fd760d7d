use super::function::{CellField, CellwiseFunction, FeFunction};
use crate::mesh::Mesh;
use crate::quadrature::TriangleRule;
use crate::Point;

/// Cellwise L2 projection `π_h`. For a P1 field the cell mean is the mean of
/// the three vertex values.
pub fn l2_project_cells<'m>(mesh: &'m Mesh, v: &FeFunction<'_>) -> CellwiseFunction<'m> {
    let values = (0..mesh.n_cells())
        .map(|k| {
            let [a, b, c] = v.cell_values(k);
            (a + b + c) / 3.0
        })
        .collect();
    CellwiseFunction::new(mesh, values)
}

/// Cell means of an arbitrary field by the degree-6 rule; exact for fields
/// that are polynomial of degree ≤ 6 on every cell.
pub fn cell_means<'m>(mesh: &'m Mesh, field: &impl CellField) -> CellwiseFunction<'m> {
    let rule = TriangleRule::degree6();
    let values = (0..mesh.n_cells())
        .map(|k| {
            rule.points
                .iter()
                .zip(&rule.weights)
                .map(|(b, w)| w * field.value_in_cell(k, *b, mesh.map_to_cell(k, *b)))
                .sum()
        })
        .collect();
    CellwiseFunction::new(mesh, values)
}

/// Centroid projection `R_h`: each cell takes the value of `w` at its centroid.
pub fn centroid_project<'m>(mesh: &'m Mesh, w: impl Fn(Point) -> f64) -> CellwiseFunction<'m> {
    let values = (0..mesh.n_cells())
        .map(|k| w(mesh.cell_centroid(k)))
        .collect();
    CellwiseFunction::new(mesh, values)
}
