use crate::fem::{CellField, FeFunction};
use crate::mesh::{dist, Mesh};
use crate::quadrature::{composite, TriangleRule};
use crate::Point;

/// Uniform subdivision depth of the error quadrature (16 sub-triangles per cell).
pub const DEFAULT_SUBDIVISION: usize = 2;

/// Additional subdivision depth on cells touching the singular point.
pub const SINGULAR_EXTRA_LEVELS: usize = 4;

/// `∫ φ(a − b)` over the mesh with the degree-6 rule on `4^depth` sub-triangles;
/// cells touching `singular` use `depth + extra`.
fn integrate_difference(
    mesh: &Mesh,
    a: &impl CellField,
    b: &impl CellField,
    depth: usize,
    singular: Option<(Point, usize)>,
    phi: impl Fn(f64) -> f64,
) -> f64 {
    let base = TriangleRule::degree6();
    let regular = composite(&base, depth);
    let refined = singular.map(|(_, extra)| composite(&base, depth + extra));
    let touches = |k: usize| match singular {
        Some((x, _)) => mesh.cell_points(k).iter().any(|&p| dist(p, x) <= 1e-13),
        None => false,
    };
    (0..mesh.n_cells())
        .map(|k| {
            let rule = match &refined {
                Some(r) if touches(k) => r,
                _ => &regular,
            };
            let sum: f64 = rule
                .points
                .iter()
                .zip(&rule.weights)
                .map(|(bary, w)| {
                    let x = mesh.map_to_cell(k, *bary);
                    w * phi(a.value_in_cell(k, *bary, x) - b.value_in_cell(k, *bary, x))
                })
                .sum();
            sum * mesh.cell_area(k)
        })
        .sum()
}

/// `‖a − b‖_{L2}` on a uniform subdivision of the given depth.
pub fn l2_difference(mesh: &Mesh, a: &impl CellField, b: &impl CellField, depth: usize) -> f64 {
    integrate_difference(mesh, a, b, depth, None, |d| d * d).sqrt()
}

pub fn l2_norm(mesh: &Mesh, a: &impl CellField, depth: usize) -> f64 {
    l2_difference(mesh, a, &|_: Point| 0.0, depth)
}

/// `‖exact − discrete‖_{L2}` with the default subdivision.
pub fn l2_error_control(mesh: &Mesh, exact: &impl CellField, discrete: &impl CellField) -> f64 {
    l2_difference(mesh, exact, discrete, DEFAULT_SUBDIVISION)
}

pub fn l2_error_control_with(
    mesh: &Mesh,
    exact: &impl CellField,
    discrete: &impl CellField,
    depth: usize,
) -> f64 {
    l2_difference(mesh, exact, discrete, depth)
}

/// `‖exact − fe‖_{L1}`, refining cells around the singular vertex of `exact`.
pub fn l1_error_fe(mesh: &Mesh, exact: &impl CellField, singular: Point, fe: &FeFunction<'_>) -> f64 {
    l1_error_fe_with(mesh, exact, singular, fe, DEFAULT_SUBDIVISION, SINGULAR_EXTRA_LEVELS)
}

pub fn l1_error_fe_with(
    mesh: &Mesh,
    exact: &impl CellField,
    singular: Point,
    fe: &FeFunction<'_>,
    depth: usize,
    extra: usize,
) -> f64 {
    integrate_difference(mesh, exact, fe, depth, Some((singular, extra)), f64::abs)
}
