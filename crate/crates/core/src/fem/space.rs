use super::assembly::assemble_stiffness;
use super::function::FeFunction;
use super::solver::Factorization;
use super::sparse::CsrMatrix;
use crate::mesh::Mesh;
use crate::Result;

/// Interior-vertex numbering of V_h: degrees of freedom follow mesh order,
/// boundary vertices are eliminated.
#[derive(Debug, Clone)]
pub struct FeSpace<'m> {
    mesh: &'m Mesh,
    dof_of_vertex: Vec<Option<usize>>,
    vertex_of_dof: Vec<usize>,
}

impl<'m> FeSpace<'m> {
    pub fn new(mesh: &'m Mesh) -> Self {
        let mut dof_of_vertex = vec![None; mesh.n_vertices()];
        let mut vertex_of_dof = Vec::new();
        for v in 0..mesh.n_vertices() {
            if !mesh.is_boundary(v) {
                dof_of_vertex[v] = Some(vertex_of_dof.len());
                vertex_of_dof.push(v);
            }
        }
        FeSpace {
            mesh,
            dof_of_vertex,
            vertex_of_dof,
        }
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }

    pub fn n_dofs(&self) -> usize {
        self.vertex_of_dof.len()
    }

    pub fn dof(&self, vertex: usize) -> Option<usize> {
        self.dof_of_vertex[vertex]
    }

    pub fn vertex(&self, dof: usize) -> usize {
        self.vertex_of_dof[dof]
    }

    pub fn stiffness(&self) -> Result<CsrMatrix> {
        assemble_stiffness(self)
    }

    /// Interior entries of a vertex-indexed vector.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.vertex_of_dof.iter().map(|&v| full[v]).collect()
    }

    /// Extends interior values by zero on the boundary.
    pub fn extend(&self, interior: &[f64]) -> FeFunction<'m> {
        let mut values = vec![0.0; self.mesh.n_vertices()];
        for (&v, &x) in self.vertex_of_dof.iter().zip(interior) {
            values[v] = x;
        }
        FeFunction::new(self.mesh, values)
    }

    /// Solves `A u = load` for a vertex-indexed load vector.
    pub fn solve(&self, factor: &Factorization, load: &[f64]) -> Result<FeFunction<'m>> {
        let x = factor.solve(&self.restrict(load))?;
        Ok(self.extend(&x))
    }
}
