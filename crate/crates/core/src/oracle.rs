//! Dense reference solvers for small meshes.
//!
//! These work on the full discrete problem directly, without the reduced
//! coefficient formulation: the cellwise problem as a box-constrained QP in
//! the cell values, solved by projected gradients, and the unconstrained
//! problems as one dense linear KKT system.

use nalgebra::{DMatrix, DVector};

use crate::control::{ControlProblem, Variant};
use crate::fem::{load_cellwise, load_point, load_smooth, CellwiseFunction, FeSpace};
use crate::mesh::Mesh;
use crate::{Error, Result};

/// Iteration cap of the projected-gradient oracle.
pub const QP_MAX_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub cell_values: Vec<f64>,
    pub iterations: usize,
    /// `‖P(q − ∇j(q)) − q‖_∞` at the returned point.
    pub stationarity: f64,
}

struct DenseSetup {
    space_dim: usize,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    stiffness: DMatrix<f64>,
    point_rows: DMatrix<f64>,
    source_rhs: DVector<f64>,
}

fn dense_setup(problem: &ControlProblem, mesh: &Mesh, space: &FeSpace<'_>) -> Result<DenseSetup> {
    let a = space.stiffness()?;
    let n = a.n();
    let mut stiffness = DMatrix::<f64>::zeros(n, n);
    for (i, j, v) in a.iter() {
        stiffness[(i, j)] = v;
    }
    let mut point_rows = DMatrix::<f64>::zeros(problem.n_points(), n);
    for (i, &x) in problem.points().iter().enumerate() {
        let w = space.restrict(&load_point(mesh, x)?);
        for (d, wd) in w.into_iter().enumerate() {
            point_rows[(i, d)] = wd;
        }
    }
    let source_rhs = DVector::from_vec(space.restrict(&load_smooth(mesh, |x| problem.source(x))));
    Ok(DenseSetup {
        space_dim: n,
        lu: stiffness.clone().lu(),
        stiffness,
        point_rows,
        source_rhs,
    })
}

fn lu_solve(setup: &DenseSetup, b: &DVector<f64>) -> Result<DVector<f64>> {
    setup
        .lu
        .solve(b)
        .ok_or_else(|| Error::LinearSolver("dense stiffness matrix is singular".into()))
}

/// Minimizes `½ Σ_i (Σ_K q_K (S_h χ_K)(x_i) + u_f(x_i) − ξ_i)² + (α/2) Σ_K q_K² |K|`
/// over `q ∈ [a,b]^{n_c}` by projected gradients in the `|K|`-weighted metric.
pub fn cellwise_qp(problem: &ControlProblem, mesh: &Mesh, stationarity_tol: f64) -> Result<QpSolution> {
    let space = FeSpace::new(mesh);
    let setup = dense_setup(problem, mesh, &space)?;
    let nc = mesh.n_cells();
    let np = problem.n_points();
    let areas: Vec<f64> = (0..nc).map(|k| mesh.cell_area(k)).collect();

    // G[i][K] = (S_h χ_K)(x_i), one dense solve per cell
    let mut g = DMatrix::<f64>::zeros(np, nc);
    let mut indicator = vec![0.0; nc];
    for k in 0..nc {
        indicator[k] = 1.0;
        let load = load_cellwise(mesh, &CellwiseFunction::new(mesh, indicator.clone()));
        indicator[k] = 0.0;
        let u = lu_solve(&setup, &DVector::from_vec(space.restrict(&load)))?;
        let px = &setup.point_rows * u;
        for i in 0..np {
            g[(i, k)] = px[i];
        }
    }
    let uf = lu_solve(&setup, &setup.source_rhs)?;
    let offset: Vec<f64> = (0..np)
        .map(|i| (setup.point_rows.row(i) * &uf)[0] - problem.targets()[i])
        .collect();

    let alpha = problem.alpha();
    let bounds = problem.bounds();
    let lipschitz = alpha
        + (0..nc)
            .map(|k| (0..np).map(|i| g[(i, k)].powi(2)).sum::<f64>() / areas[k])
            .sum::<f64>();
    let step = 1.0 / lipschitz;

    let gradient = |q: &[f64]| -> Vec<f64> {
        let r: Vec<f64> = (0..np)
            .map(|i| (0..nc).map(|k| g[(i, k)] * q[k]).sum::<f64>() + offset[i])
            .collect();
        (0..nc)
            .map(|k| (0..np).map(|i| r[i] * g[(i, k)]).sum::<f64>() / areas[k] + alpha * q[k])
            .collect()
    };
    let stationarity = |q: &[f64], grad: &[f64]| -> f64 {
        q.iter()
            .zip(grad)
            .map(|(qk, gk)| (bounds.project(qk - gk) - qk).abs())
            .fold(0.0, f64::max)
    };

    let mut q: Vec<f64> = vec![bounds.project(0.0); nc];
    for it in 0..QP_MAX_ITERATIONS {
        let grad = gradient(&q);
        let s = stationarity(&q, &grad);
        if s <= stationarity_tol {
            return Ok(QpSolution {
                cell_values: q,
                iterations: it,
                stationarity: s,
            });
        }
        for k in 0..nc {
            q[k] = bounds.project(q[k] - step * grad[k]);
        }
    }
    Err(Error::Divergence {
        iterations: QP_MAX_ITERATIONS,
        history: vec![stationarity(&q, &gradient(&q))],
    })
}

#[derive(Debug, Clone)]
pub struct KktSolution {
    /// Nodal state values including boundary zeros.
    pub state: Vec<f64>,
    /// Nodal adjoint values including boundary zeros.
    pub adjoint: Vec<f64>,
    /// Cell values (cellwise) or nodal values (variational) of the control.
    pub control: Vec<f64>,
}

/// Solves the unconstrained discrete optimality system as one dense linear
/// system in `(u, z)` (variational) or `(u, z, q)` (cellwise).
pub fn unconstrained_kkt(problem: &ControlProblem, mesh: &Mesh, variant: Variant) -> Result<KktSolution> {
    let bounds = problem.bounds();
    if bounds.lower.is_finite() || bounds.upper.is_finite() {
        return Err(Error::Precondition("KKT oracle needs infinite bounds".into()));
    }
    let space = FeSpace::new(mesh);
    let setup = dense_setup(problem, mesh, &space)?;
    let n = setup.space_dim;
    let alpha = problem.alpha();
    let nc = mesh.n_cells();
    let dtd = setup.point_rows.transpose() * &setup.point_rows;
    let dxi = setup.point_rows.transpose() * DVector::from_column_slice(problem.targets());

    let size = match variant {
        Variant::Variational => 2 * n,
        Variant::Cellwise => 2 * n + nc,
    };
    let mut kkt = DMatrix::<f64>::zeros(size, size);
    let mut rhs = DVector::<f64>::zeros(size);
    kkt.view_mut((0, 0), (n, n)).copy_from(&setup.stiffness);
    kkt.view_mut((n, n), (n, n)).copy_from(&setup.stiffness);
    kkt.view_mut((n, 0), (n, n)).copy_from(&(-&dtd));
    rhs.rows_mut(0, n).copy_from(&setup.source_rhs);
    rhs.rows_mut(n, n).copy_from(&(-&dxi));

    match variant {
        Variant::Variational => {
            // A u + (1/α) M z = F with the interior mass matrix M
            for (k, cell) in mesh.cells().iter().enumerate() {
                let area = mesh.cell_area(k);
                for i in 0..3 {
                    let Some(di) = space.dof(cell[i]) else { continue };
                    for j in 0..3 {
                        if let Some(dj) = space.dof(cell[j]) {
                            let m = if i == j { area / 6.0 } else { area / 12.0 };
                            kkt[(di, n + dj)] += m / alpha;
                        }
                    }
                }
            }
        }
        Variant::Cellwise => {
            // A u − B q = F,  α |K| q_K + (Bᵀ z)_K = 0
            for (k, cell) in mesh.cells().iter().enumerate() {
                let area = mesh.cell_area(k);
                kkt[(2 * n + k, 2 * n + k)] = alpha * area;
                for &v in cell {
                    if let Some(d) = space.dof(v) {
                        kkt[(d, 2 * n + k)] -= area / 3.0;
                        kkt[(2 * n + k, n + d)] += area / 3.0;
                    }
                }
            }
        }
    }
    let x = kkt
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::LinearSolver("KKT matrix is singular".into()))?;
    let state = space.extend(x.rows(0, n).as_slice()).into_values();
    let adjoint = space.extend(x.rows(n, n).as_slice()).into_values();
    let control = match variant {
        Variant::Variational => adjoint.iter().map(|z| -z / alpha).collect(),
        Variant::Cellwise => x.rows(2 * n, nc).iter().copied().collect(),
    };
    Ok(KktSolution {
        state,
        adjoint,
        control,
    })
}
