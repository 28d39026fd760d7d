use crate::mesh::Mesh;
use crate::{Bounds, Point, Result};

/// A scalar field that can be sampled inside a known cell.
///
/// Discrete fields use the cell index and barycentric coordinates, closed-form
/// fields use the physical point. Quadrature loops always know both.
pub trait CellField {
    fn value_in_cell(&self, cell: usize, bary: [f64; 3], x: Point) -> f64;
}

impl<F: Fn(Point) -> f64> CellField for F {
    fn value_in_cell(&self, _cell: usize, _bary: [f64; 3], x: Point) -> f64 {
        self(x)
    }
}

/// Nodal P1 field, one value per mesh vertex.
#[derive(Debug, Clone)]
pub struct FeFunction<'m> {
    mesh: &'m Mesh,
    values: Vec<f64>,
}

impl<'m> FeFunction<'m> {
    pub fn new(mesh: &'m Mesh, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), mesh.n_vertices());
        FeFunction { mesh, values }
    }

    pub fn zeros(mesh: &'m Mesh) -> Self {
        Self::new(mesh, vec![0.0; mesh.n_vertices()])
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(mesh: &'m Mesh, f: impl Fn(Point) -> f64) -> Self {
        Self::new(mesh, mesh.vertices().iter().map(|&p| f(p)).collect())
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Whether all boundary values vanish, i.e. the function lies in V_h.
    pub fn satisfies_dirichlet(&self) -> bool {
        self.values
            .iter()
            .zip(self.mesh.boundary_flags())
            .all(|(&v, &b)| !b || v == 0.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.mesh, self.values.iter().map(|v| s * v).collect())
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &FeFunction<'_>) -> Self {
        Self::new(
            self.mesh,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + s * b)
                .collect(),
        )
    }

    /// Nodal values of cell `k`.
    pub fn cell_values(&self, k: usize) -> [f64; 3] {
        self.mesh.cells()[k].map(|v| self.values[v])
    }

    /// Point evaluation by barycentric interpolation in the containing cell.
    pub fn evaluate(&self, x: Point) -> Result<f64> {
        let (k, bary) = self.mesh.locate_point(x)?;
        Ok(self.value_in_cell(k, bary, x))
    }
}

impl CellField for FeFunction<'_> {
    fn value_in_cell(&self, cell: usize, bary: [f64; 3], _x: Point) -> f64 {
        let v = self.cell_values(cell);
        bary[0] * v[0] + bary[1] * v[1] + bary[2] * v[2]
    }
}

/// Piecewise constant field, one value per cell.
#[derive(Debug, Clone)]
pub struct CellwiseFunction<'m> {
    mesh: &'m Mesh,
    values: Vec<f64>,
}

impl<'m> CellwiseFunction<'m> {
    pub fn new(mesh: &'m Mesh, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), mesh.n_cells());
        CellwiseFunction { mesh, values }
    }

    pub fn constant(mesh: &'m Mesh, c: f64) -> Self {
        Self::new(mesh, vec![c; mesh.n_cells()])
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(self.mesh, self.values.iter().map(|&v| f(v)).collect())
    }
}

impl CellField for CellwiseFunction<'_> {
    fn value_in_cell(&self, cell: usize, _bary: [f64; 3], _x: Point) -> f64 {
        self.values[cell]
    }
}

/// The implicit control `P_[a,b](-w / alpha)` built from a nodal field `w`.
#[derive(Debug, Clone)]
pub struct ClippedField<'m> {
    pub adjoint: FeFunction<'m>,
    pub alpha: f64,
    pub bounds: Bounds,
}

impl<'m> ClippedField<'m> {
    pub fn new(adjoint: FeFunction<'m>, alpha: f64, bounds: Bounds) -> Self {
        ClippedField {
            adjoint,
            alpha,
            bounds,
        }
    }

    pub fn evaluate(&self, x: Point) -> Result<f64> {
        Ok(self.bounds.project(-self.adjoint.evaluate(x)? / self.alpha))
    }
}

impl CellField for ClippedField<'_> {
    fn value_in_cell(&self, cell: usize, bary: [f64; 3], x: Point) -> f64 {
        self.bounds
            .project(-self.adjoint.value_in_cell(cell, bary, x) / self.alpha)
    }
}
