use crate::mesh::Mesh;
use crate::{Bounds, Point};

/// Default classification tolerance relative to `b − a`.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellClass {
    /// The control sits at one bound on the whole cell.
    T1,
    /// The control is strictly inside the bounds on the whole cell.
    T2,
    /// Everything else: cells cut by the boundary of the active set.
    T3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellClassification {
    pub classes: Vec<CellClass>,
}

impl CellClassification {
    pub fn count(&self, class: CellClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    pub fn cells(&self, class: CellClass) -> impl Iterator<Item = usize> + '_ {
        self.classes
            .iter()
            .enumerate()
            .filter(move |(_, &c)| c == class)
            .map(|(k, _)| k)
    }
}

/// Samples `control` at the vertices, edge midpoints, and centroid of each cell.
/// `tol` is relative to `b − a` for finite bounds.
pub fn classify_cells(
    mesh: &Mesh,
    control: impl Fn(Point) -> f64,
    bounds: Bounds,
    tol: f64,
) -> CellClassification {
    let width = bounds.width();
    let abs_tol = if width.is_finite() { tol * width } else { tol };
    let samples: [[f64; 3]; 7] = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.5, 0.5, 0.0],
        [0.0, 0.5, 0.5],
        [0.5, 0.0, 0.5],
        [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    ];
    let classes = (0..mesh.n_cells())
        .map(|k| {
            let values = samples.map(|b| control(mesh.map_to_cell(k, b)));
            let at = |bound: f64| values.iter().all(|v| (v - bound).abs() <= abs_tol);
            if at(bounds.lower) || at(bounds.upper) {
                CellClass::T1
            } else if values
                .iter()
                .all(|&v| v > bounds.lower + abs_tol && v < bounds.upper - abs_tol)
            {
                CellClass::T2
            } else {
                CellClass::T3
            }
        })
        .collect();
    CellClassification { classes }
}

/// `Σ_{K ∈ T3} |K| / h`.
pub fn check_assumption_74(classification: &CellClassification, mesh: &Mesh) -> f64 {
    let area: f64 = classification
        .cells(CellClass::T3)
        .map(|k| mesh.cell_area(k))
        .sum();
    area / mesh.h()
}
