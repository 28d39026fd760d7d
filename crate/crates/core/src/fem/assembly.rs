use super::sparse::CsrMatrix;
use super::space::FeSpace;
use crate::mesh::Mesh;
use crate::{Error, Point, Result};

/// Gradients of the three barycentric coordinates and the cell area.
pub fn barycentric_gradients(p: [Point; 3]) -> Option<([[f64; 2]; 3], f64)> {
    let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
    let scale = p.iter().map(|q| q[0].abs().max(q[1].abs())).fold(1.0, f64::max);
    if det.abs() <= 1e-14 * scale * scale {
        return None;
    }
    let g = [
        [(p[1][1] - p[2][1]) / det, (p[2][0] - p[1][0]) / det],
        [(p[2][1] - p[0][1]) / det, (p[0][0] - p[2][0]) / det],
        [(p[0][1] - p[1][1]) / det, (p[1][0] - p[0][0]) / det],
    ];
    Some((g, 0.5 * det.abs()))
}

/// Local P1 stiffness matrix `∫_K ∇λ_i · ∇λ_j`.
pub fn element_stiffness(p: [Point; 3]) -> Option<[[f64; 3]; 3]> {
    let (g, area) = barycentric_gradients(p)?;
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
        }
    }
    Some(k)
}

fn local_matrices(mesh: &Mesh) -> Result<Vec<[[f64; 3]; 3]>> {
    (0..mesh.n_cells())
        .map(|k| {
            element_stiffness(mesh.cell_points(k)).ok_or(Error::DegenerateCell {
                cell: k,
                area: mesh.cell_area(k),
            })
        })
        .collect()
}

/// Stiffness matrix over all vertices, before Dirichlet elimination.
pub fn assemble_full_stiffness(mesh: &Mesh) -> Result<CsrMatrix> {
    let locals = local_matrices(mesh)?;
    let mut triplets = Vec::with_capacity(9 * mesh.n_cells());
    for (cell, local) in mesh.cells().iter().zip(&locals) {
        for i in 0..3 {
            for j in 0..3 {
                triplets.push((cell[i], cell[j], local[i][j]));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(mesh.n_vertices(), triplets))
}

/// Stiffness matrix on the interior degrees of freedom of `space`.
pub fn assemble_stiffness(space: &FeSpace<'_>) -> Result<CsrMatrix> {
    let mesh = space.mesh();
    let locals = local_matrices(mesh)?;
    let mut triplets = Vec::with_capacity(9 * mesh.n_cells());
    for (cell, local) in mesh.cells().iter().zip(&locals) {
        for i in 0..3 {
            let Some(di) = space.dof(cell[i]) else { continue };
            for j in 0..3 {
                if let Some(dj) = space.dof(cell[j]) {
                    triplets.push((di, dj, local[i][j]));
                }
            }
        }
    }
    Ok(CsrMatrix::from_triplets(space.n_dofs(), triplets))
}
