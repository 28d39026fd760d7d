//! Discrete optimal control with pointwise tracking.
//!
//! The discrete adjoint is a combination `z_h = Σ c_i z_{h,i}` of discrete
//! Green's functions `z_{h,i}` with coefficients `c_i = u_h(x_i) − ξ_i`. The
//! optimality system therefore reduces to `N` equations in `c`:
//!
//! ```text
//! F(c) = c − (u_h(q(c))(x_i) − ξ_i) = 0,
//! ```
//!
//! where `q(c)` is the control obtained from the projection formula for the
//! adjoint `Σ c_i z_{h,i}`. Each evaluation of `F` costs one state solve with
//! the stiffness factorization shared by all solves on the mesh.

use nalgebra::{DMatrix, DVector};

use crate::fem::{
    clipped_norm_squared, factorize_with, l2_project_cells, load_cellwise, load_clipped_linear, load_point,
    load_smooth, CellField, CellwiseFunction, ClippedField, Factorization, FeFunction, FeSpace,
    SolverKind,
};
use crate::mesh::Mesh;
use crate::{Bounds, Error, Point, Result};

pub use crate::bounds::project_interval;

pub type SourceFn = Box<dyn Fn(Point) -> f64 + Send + Sync>;

pub const MAX_ITERATIONS: usize = 200;
pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_DAMPINGS: usize = 5;
const PICARD_FACTOR: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Control given implicitly by `P_[a,b](−z_h/α)`.
    Variational,
    /// Cellwise constant control `P_[a,b](−π_h z_h/α)`.
    Cellwise,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Variational => "variational",
            Variant::Cellwise => "cellwise",
        }
    }
}

/// Tracking points, targets, regularization, control bounds, and source term.
pub struct ControlProblem {
    points: Vec<Point>,
    targets: Vec<f64>,
    alpha: f64,
    bounds: Bounds,
    source: SourceFn,
}

impl std::fmt::Debug for ControlProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ControlProblem")
            .field("points", &self.points)
            .field("targets", &self.targets)
            .field("alpha", &self.alpha)
            .field("bounds", &self.bounds)
            .finish_non_exhaustive()
    }
}

impl ControlProblem {
    pub fn new(
        points: Vec<Point>,
        targets: Vec<f64>,
        alpha: f64,
        bounds: Bounds,
        source: impl Fn(Point) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if points.is_empty() || points.len() != targets.len() {
            return Err(Error::Precondition(format!(
                "need one target per tracking point, got {} points and {} targets",
                points.len(),
                targets.len()
            )));
        }
        for i in 0..points.len() {
            for j in 0..i {
                if points[i] == points[j] {
                    return Err(Error::Precondition(format!("tracking points {j} and {i} coincide")));
                }
            }
        }
        if !(alpha > 0.0) {
            return Err(Error::Precondition(format!("alpha must be positive, got {alpha}")));
        }
        let bounds = Bounds::new(bounds.lower, bounds.upper)?;
        Ok(ControlProblem {
            points,
            targets,
            alpha,
            bounds,
            source: Box::new(source),
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn source(&self, x: Point) -> f64 {
        (self.source)(x)
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }
}

/// The discrete control in either representation.
#[derive(Debug, Clone)]
pub enum ControlRepr<'m> {
    Variational(ClippedField<'m>),
    Cellwise(CellwiseFunction<'m>),
}

impl ControlRepr<'_> {
    pub fn variant(&self) -> Variant {
        match self {
            ControlRepr::Variational(_) => Variant::Variational,
            ControlRepr::Cellwise(_) => Variant::Cellwise,
        }
    }
}

impl CellField for ControlRepr<'_> {
    fn value_in_cell(&self, cell: usize, bary: [f64; 3], x: Point) -> f64 {
        match self {
            ControlRepr::Variational(q) => q.value_in_cell(cell, bary, x),
            ControlRepr::Cellwise(q) => q.value_in_cell(cell, bary, x),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DiscreteSolution<'m> {
    pub control: ControlRepr<'m>,
    pub state: FeFunction<'m>,
    pub adjoint: FeFunction<'m>,
    /// `c_i = u_h(x_i) − ξ_i`.
    pub coefficients: Vec<f64>,
    pub iterations: usize,
    /// `‖F(c)‖_∞` at the returned coefficients.
    pub residual: f64,
    /// `‖F‖_∞` at the initial guess and after every accepted step.
    pub residual_history: Vec<f64>,
    /// Discrete objective at the initial guess and after every accepted step.
    pub objective_history: Vec<f64>,
}

impl DiscreteSolution<'_> {
    pub fn variant(&self) -> Variant {
        self.control.variant()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tol: f64,
    pub solver: SolverKind,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: DEFAULT_TOL,
            solver: SolverKind::Cholesky,
            max_iterations: MAX_ITERATIONS,
        }
    }
}

/// Everything computed from one candidate coefficient vector.
#[derive(Debug, Clone)]
pub struct Evaluation<'m> {
    pub residual: Vec<f64>,
    pub control: ControlRepr<'m>,
    pub state: FeFunction<'m>,
    pub adjoint: FeFunction<'m>,
}

/// Solver state shared by all residual evaluations on one mesh: the
/// factorization, the uncontrolled state `u_f`, and the Green's functions
/// `z_{h,i}`.
pub struct ReducedSystem<'m, 'p> {
    problem: &'p ControlProblem,
    space: FeSpace<'m>,
    factor: Factorization,
    point_weights: Vec<Vec<(usize, f64)>>,
    source_state: FeFunction<'m>,
    greens: Vec<FeFunction<'m>>,
}

impl<'m, 'p> ReducedSystem<'m, 'p> {
    pub fn new(problem: &'p ControlProblem, mesh: &'m Mesh, solver: SolverKind) -> Result<Self> {
        let space = FeSpace::new(mesh);
        let factor = factorize_with(&space.stiffness()?, solver)?;
        let mut point_weights = Vec::with_capacity(problem.n_points());
        let mut greens = Vec::with_capacity(problem.n_points());
        for &x in problem.points() {
            let load = load_point(mesh, x)?;
            point_weights.push(
                load.iter()
                    .enumerate()
                    .filter(|(_, &w)| w != 0.0)
                    .map(|(v, &w)| (v, w))
                    .collect(),
            );
            greens.push(space.solve(&factor, &load)?);
        }
        let source_state = space.solve(&factor, &load_smooth(mesh, |x| problem.source(x)))?;
        Ok(ReducedSystem {
            problem,
            space,
            factor,
            point_weights,
            source_state,
            greens,
        })
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.space.mesh()
    }

    pub fn problem(&self) -> &'p ControlProblem {
        self.problem
    }

    pub fn space(&self) -> &FeSpace<'m> {
        &self.space
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factor
    }

    /// `u_f`, the discrete state for the source alone.
    pub fn source_state(&self) -> &FeFunction<'m> {
        &self.source_state
    }

    /// `z_{h,i}` for every tracking point.
    pub fn greens_functions(&self) -> &[FeFunction<'m>] {
        &self.greens
    }

    /// `v(x_i)` for a nodal field `v`.
    pub fn point_values(&self, v: &FeFunction<'_>) -> Vec<f64> {
        self.point_weights
            .iter()
            .map(|ws| ws.iter().map(|&(vtx, w)| w * v.values()[vtx]).sum())
            .collect()
    }

    /// `c⁰_i = u_f(x_i) − ξ_i`.
    pub fn initial_guess(&self) -> Vec<f64> {
        self.point_values(&self.source_state)
            .iter()
            .zip(self.problem.targets())
            .map(|(u, xi)| u - xi)
            .collect()
    }

    pub fn adjoint(&self, c: &[f64]) -> FeFunction<'m> {
        let mut z = FeFunction::zeros(self.mesh());
        for (ci, zi) in c.iter().zip(&self.greens) {
            z = z.axpy(*ci, zi);
        }
        z
    }

    /// Control from the projection formula of the given variant.
    pub fn control_from_adjoint(&self, adjoint: &FeFunction<'m>, variant: Variant) -> ControlRepr<'m> {
        let (alpha, bounds) = (self.problem.alpha(), self.problem.bounds());
        match variant {
            Variant::Variational => {
                ControlRepr::Variational(ClippedField::new(adjoint.clone(), alpha, bounds))
            }
            Variant::Cellwise => ControlRepr::Cellwise(
                l2_project_cells(self.mesh(), adjoint).map(|m| bounds.project(-m / alpha)),
            ),
        }
    }

    /// `(q, φ_i)` for a control in either representation, integrated exactly.
    pub fn control_load(&self, control: &ControlRepr<'_>) -> Vec<f64> {
        match control {
            ControlRepr::Variational(q) => {
                load_clipped_linear(self.mesh(), &q.adjoint, q.bounds, q.alpha)
            }
            ControlRepr::Cellwise(q) => load_cellwise(self.mesh(), q),
        }
    }

    /// Discrete state `u_f + S_h q`.
    pub fn state(&self, control: &ControlRepr<'_>) -> Result<FeFunction<'m>> {
        let uq = self.space.solve(&self.factor, &self.control_load(control))?;
        Ok(self.source_state.axpy(1.0, &uq))
    }

    pub fn evaluate(&self, c: &[f64], variant: Variant) -> Result<Evaluation<'m>> {
        let adjoint = self.adjoint(c);
        let control = self.control_from_adjoint(&adjoint, variant);
        let state = self.state(&control)?;
        let residual = self
            .point_values(&state)
            .iter()
            .zip(self.problem.targets())
            .zip(c)
            .map(|((u, xi), ci)| ci - (u - xi))
            .collect();
        Ok(Evaluation {
            residual,
            control,
            state,
            adjoint,
        })
    }

    /// `F(c) = c − (u_h(c)(x_i) − ξ_i)`.
    pub fn coefficient_residual(&self, c: &[f64], variant: Variant) -> Result<Vec<f64>> {
        Ok(self.evaluate(c, variant)?.residual)
    }

    /// `½ Σ (u(x_i) − ξ_i)² + (α/2) ‖q‖²`.
    pub fn objective(&self, control: &ControlRepr<'_>, state: &FeFunction<'_>) -> f64 {
        let tracking: f64 = self
            .point_values(state)
            .iter()
            .zip(self.problem.targets())
            .map(|(u, xi)| (u - xi).powi(2))
            .sum();
        let mesh = self.mesh();
        let norm2: f64 = match control {
            ControlRepr::Cellwise(q) => q
                .values()
                .iter()
                .enumerate()
                .map(|(k, v)| v * v * mesh.cell_area(k))
                .sum(),
            ControlRepr::Variational(q) => clipped_norm_squared(mesh, &q.adjoint, q.bounds, q.alpha),
        };
        0.5 * tracking + 0.5 * self.problem.alpha() * norm2
    }

    /// Semismooth Newton on `F` with a forward-difference Jacobian, step
    /// halving, and a damped Picard fallback.
    pub fn solve(&self, variant: Variant, options: &SolveOptions) -> Result<DiscreteSolution<'m>> {
        if !(options.tol >= 1e-13) {
            return Err(Error::Precondition(format!(
                "tolerance must be at least 1e-13, got {:e}",
                options.tol
            )));
        }
        let n = self.problem.n_points();
        let mut c = self.initial_guess();
        let mut current = self.evaluate(&c, variant)?;
        let mut norm = max_norm(&current.residual);
        let mut residual_history = vec![norm];
        let mut objective_history = vec![self.objective(&current.control, &current.state)];
        let mut iterations = 0;

        while norm > options.tol {
            if iterations >= options.max_iterations {
                return Err(Error::Divergence {
                    iterations,
                    history: residual_history,
                });
            }
            iterations += 1;

            let mut jac = DMatrix::<f64>::zeros(n, n);
            for j in 0..n {
                let step = 1e-6 * (1.0 + c[j].abs());
                let mut shifted = c.clone();
                shifted[j] += step;
                let f = self.coefficient_residual(&shifted, variant)?;
                for i in 0..n {
                    jac[(i, j)] = (f[i] - current.residual[i]) / step;
                }
            }
            let rhs = -DVector::from_column_slice(&current.residual);
            let direction = jac.lu().solve(&rhs);

            let mut accepted = None;
            if let Some(dc) = direction {
                let mut lambda = 1.0;
                for _ in 0..=MAX_DAMPINGS {
                    let trial: Vec<f64> = c.iter().zip(dc.iter()).map(|(ci, di)| ci + lambda * di).collect();
                    let eval = self.evaluate(&trial, variant)?;
                    if max_norm(&eval.residual) < norm {
                        accepted = Some((trial, eval));
                        break;
                    }
                    lambda *= 0.5;
                }
            }
            let (next_c, next) = match accepted {
                Some(step) => step,
                None => {
                    let trial: Vec<f64> = c
                        .iter()
                        .zip(&current.residual)
                        .map(|(ci, fi)| ci - PICARD_FACTOR * fi)
                        .collect();
                    let eval = self.evaluate(&trial, variant)?;
                    (trial, eval)
                }
            };
            c = next_c;
            current = next;
            norm = max_norm(&current.residual);
            residual_history.push(norm);
            objective_history.push(self.objective(&current.control, &current.state));
        }

        Ok(DiscreteSolution {
            control: current.control,
            state: current.state,
            adjoint: current.adjoint,
            coefficients: c,
            iterations,
            residual: norm,
            residual_history,
            objective_history,
        })
    }
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves the discrete problem on `mesh` with the direct solver.
pub fn solve_discrete<'m>(
    problem: &ControlProblem,
    mesh: &'m Mesh,
    variant: Variant,
    tol: f64,
) -> Result<DiscreteSolution<'m>> {
    let options = SolveOptions {
        tol,
        ..SolveOptions::default()
    };
    ReducedSystem::new(problem, mesh, options.solver)?.solve(variant, &options)
}

/// Pointwise `α q + z_h`, the L2 representative of the reduced gradient.
#[derive(Debug, Clone, Copy)]
pub struct ReducedGradient<'a, Q> {
    pub control: &'a Q,
    pub adjoint: &'a FeFunction<'a>,
    pub alpha: f64,
}

pub fn reduced_gradient<'a, Q: CellField>(
    control: &'a Q,
    adjoint: &'a FeFunction<'a>,
    alpha: f64,
) -> ReducedGradient<'a, Q> {
    ReducedGradient {
        control,
        adjoint,
        alpha,
    }
}

impl<Q: CellField> CellField for ReducedGradient<'_, Q> {
    fn value_in_cell(&self, cell: usize, bary: [f64; 3], x: Point) -> f64 {
        self.alpha * self.control.value_in_cell(cell, bary, x)
            + self.adjoint.value_in_cell(cell, bary, x)
    }
}

/// Post-processed control `P_[a,b](−z̄_h/α)` from a cellwise solution.
pub fn post_process<'m>(
    solution: &DiscreteSolution<'m>,
    alpha: f64,
    bounds: Bounds,
) -> Result<ClippedField<'m>> {
    match solution.variant() {
        Variant::Cellwise => Ok(ClippedField::new(solution.adjoint.clone(), alpha, bounds)),
        found => Err(Error::WrongVariant {
            expected: Variant::Cellwise.name(),
            found: found.name(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_disc_mesh;

    const X1: Point = [0.5, 0.5];

    fn problem(bounds: Bounds, target: f64, alpha: f64) -> ControlProblem {
        ControlProblem::new(vec![X1], vec![target], alpha, bounds, |_| 0.0).unwrap()
    }

    #[test]
    fn problem_validation() {
        let b = Bounds::symmetric(1.0);
        assert!(ControlProblem::new(vec![X1, X1], vec![0.0, 0.0], 1.0, b, |_| 0.0).is_err());
        assert!(ControlProblem::new(vec![X1], vec![0.0], 0.0, b, |_| 0.0).is_err());
        assert!(ControlProblem::new(vec![X1], vec![], 1.0, b, |_| 0.0).is_err());
        let bad = Bounds { lower: 1.0, upper: 1.0 };
        assert!(ControlProblem::new(vec![X1], vec![0.0], 1.0, bad, |_| 0.0).is_err());
    }

    #[test]
    fn saturated_targets_pin_cellwise_control() {
        let mesh = build_disc_mesh(X1, 0.5, 2).unwrap();
        let bounds = Bounds::symmetric(1.0);
        for (target, pinned) in [(-1e6, -1.0), (1e6, 1.0)] {
            let sol = solve_discrete(&problem(bounds, target, 1.0), &mesh, Variant::Cellwise, 1e-10).unwrap();
            let ControlRepr::Cellwise(q) = &sol.control else { unreachable!() };
            assert!(q.values().iter().all(|&v| v == pinned));
        }
    }

    #[test]
    fn zero_fields_give_zero_gradient() {
        let mesh = build_disc_mesh(X1, 0.5, 1).unwrap();
        let q = CellwiseFunction::constant(&mesh, 0.0);
        let z = FeFunction::zeros(&mesh);
        let g = reduced_gradient(&q, &z, 1.0);
        for k in 0..mesh.n_cells() {
            assert_eq!(g.value_in_cell(k, [0.2, 0.3, 0.5], mesh.cell_centroid(k)), 0.0);
        }
    }

    #[test]
    fn post_processing_requires_cellwise_solution() {
        let mesh = build_disc_mesh(X1, 0.5, 1).unwrap();
        let p = problem(Bounds::symmetric(1.0), -0.5, 1.0);
        let sol = solve_discrete(&p, &mesh, Variant::Variational, 1e-12).unwrap();
        assert!(matches!(
            post_process(&sol, 1.0, p.bounds()),
            Err(Error::WrongVariant { .. })
        ));
        let sol = solve_discrete(&p, &mesh, Variant::Cellwise, 1e-12).unwrap();
        let q = post_process(&sol, 1.0, p.bounds()).unwrap();
        for k in 0..mesh.n_cells() {
            let v = q.value_in_cell(k, [0.6, 0.2, 0.2], mesh.cell_centroid(k));
            assert!((-1.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn post_processing_zero_adjoint() {
        let mesh = build_disc_mesh(X1, 0.5, 1).unwrap();
        let bounds = Bounds::new(0.1, 0.5).unwrap();
        let sol = DiscreteSolution {
            control: ControlRepr::Cellwise(CellwiseFunction::constant(&mesh, 0.1)),
            state: FeFunction::zeros(&mesh),
            adjoint: FeFunction::zeros(&mesh),
            coefficients: vec![0.0],
            iterations: 0,
            residual: 0.0,
            residual_history: vec![],
            objective_history: vec![],
        };
        let q = post_process(&sol, 1.0, bounds).unwrap();
        assert_eq!(q.value_in_cell(3, [0.3, 0.3, 0.4], X1), 0.1);
    }

    #[test]
    fn tolerance_floor() {
        let mesh = build_disc_mesh(X1, 0.5, 1).unwrap();
        let p = problem(Bounds::symmetric(1.0), 0.0, 1.0);
        assert!(solve_discrete(&p, &mesh, Variant::Cellwise, 1e-14).is_err());
    }
}
