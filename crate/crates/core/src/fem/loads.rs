//! Right-hand sides `(g, φ_i)` for all vertex hat functions `φ_i`.
//!
//! Every load vector is indexed by mesh vertex; boundary entries are dropped
//! when the vector is restricted to the interior degrees of freedom.

use super::function::{CellwiseFunction, FeFunction};
use crate::mesh::Mesh;
use crate::quadrature::TriangleRule;
use crate::{Bounds, Error, Point, Result};

/// `(f, φ_i)` with the six-point degree-4 rule on every cell.
pub fn load_smooth(mesh: &Mesh, f: impl Fn(Point) -> f64) -> Vec<f64> {
    let rule = TriangleRule::degree4();
    let mut load = vec![0.0; mesh.n_vertices()];
    for (k, cell) in mesh.cells().iter().enumerate() {
        let area = mesh.cell_area(k);
        let mut local = [0.0; 3];
        for (bary, &w) in rule.points.iter().zip(&rule.weights) {
            let fx = f(mesh.map_to_cell(k, *bary)) * w * area;
            for j in 0..3 {
                local[j] += fx * bary[j];
            }
        }
        for j in 0..3 {
            load[cell[j]] += local[j];
        }
    }
    load
}

/// `(q, φ_i)` for a cellwise constant `q`, integrated exactly.
pub fn load_cellwise(mesh: &Mesh, q: &CellwiseFunction<'_>) -> Vec<f64> {
    let mut load = vec![0.0; mesh.n_vertices()];
    for (k, cell) in mesh.cells().iter().enumerate() {
        let share = q.values()[k] * mesh.cell_area(k) / 3.0;
        for &v in cell {
            load[v] += share;
        }
    }
    load
}

/// Consistent mass matrix applied to a nodal field, `(w, φ_i)`.
pub fn mass_apply(mesh: &Mesh, w: &FeFunction<'_>) -> Vec<f64> {
    let mut load = vec![0.0; mesh.n_vertices()];
    for (k, cell) in mesh.cells().iter().enumerate() {
        let area = mesh.cell_area(k);
        let v = w.cell_values(k);
        let sum = v[0] + v[1] + v[2];
        for j in 0..3 {
            load[cell[j]] += area / 12.0 * (v[j] + sum);
        }
    }
    load
}

/// `(P_[a,b](-w/α), φ_i)` integrated exactly.
///
/// On each cell `-w/α` is affine, so the clipped integrand is piecewise
/// affine on at most three convex pieces separated by the level lines
/// `-w/α = a` and `-w/α = b`. Each piece is fan-triangulated and integrated
/// with the exact product rule for affine functions.
pub fn load_clipped_linear(
    mesh: &Mesh,
    w: &FeFunction<'_>,
    bounds: Bounds,
    alpha: f64,
) -> Vec<f64> {
    assert!(alpha > 0.0, "alpha must be positive");
    let mut load = vec![0.0; mesh.n_vertices()];
    for (k, cell) in mesh.cells().iter().enumerate() {
        let g = w.cell_values(k).map(|v| -v / alpha);
        let local = clipped_cell_moments(g, bounds);
        let area = mesh.cell_area(k);
        for j in 0..3 {
            load[cell[j]] += area * local[j];
        }
    }
    load
}

/// A polygon vertex: parent barycentric coordinates plus the affine value there.
#[derive(Clone, Copy, Debug)]
struct Node {
    bary: [f64; 3],
    g: f64,
}

/// The part of a convex polygon where `sign * (g - level) <= 0`.
fn clip(poly: &[Node], level: f64, sign: f64) -> Vec<Node> {
    let inside = |n: &Node| sign * (n.g - level) <= 0.0;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let (pin, qin) = (inside(&p), inside(&q));
        if pin {
            out.push(p);
        }
        if pin != qin {
            let t = (level - p.g) / (q.g - p.g);
            let mut bary = [0.0; 3];
            for j in 0..3 {
                bary[j] = p.bary[j] + t * (q.bary[j] - p.bary[j]);
            }
            out.push(Node { bary, g: level });
        }
    }
    out
}

/// `(1/|K|) ∫_poly v φ_j` for j = 0..3, where `v` is `value` or, when
/// `value` is `None`, the affine function `g` itself.
fn polygon_moments(poly: &[Node], value: Option<f64>, acc: &mut [f64; 3]) {
    if poly.len() < 3 {
        return;
    }
    let v = |n: &Node| value.unwrap_or(n.g);
    for i in 1..poly.len() - 1 {
        let tri = [poly[0], poly[i], poly[i + 1]];
        // area ratio of the sub-triangle to the parent cell
        let [a, b, c] = tri.map(|n| n.bary);
        let ratio = bary_area_ratio([a, b, c]);
        if ratio == 0.0 {
            continue;
        }
        let vs = tri.map(|n| v(&n));
        let vsum: f64 = vs.iter().sum();
        for j in 0..3 {
            let phi = [a[j], b[j], c[j]];
            let psum: f64 = phi.iter().sum();
            let dotp = vs[0] * phi[0] + vs[1] * phi[1] + vs[2] * phi[2];
            acc[j] += ratio / 12.0 * (dotp + vsum * psum);
        }
    }
}

/// Area of a sub-triangle relative to the parent, from barycentric corners.
fn bary_area_ratio([a, b, c]: [[f64; 3]; 3]) -> f64 {
    (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0]))
        .abs()
}

/// Splits the reference cell into the pieces where `P(g)` is `a`, `b`, or `g`.
fn for_each_piece(g: [f64; 3], bounds: Bounds, mut f: impl FnMut(&[Node], Option<f64>)) {
    let corners = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut rest: Vec<Node> = (0..3).map(|j| Node { bary: corners[j], g: g[j] }).collect();
    if bounds.lower.is_finite() {
        f(&clip(&rest, bounds.lower, 1.0), Some(bounds.lower));
        rest = clip(&rest, bounds.lower, -1.0);
    }
    if bounds.upper.is_finite() {
        f(&clip(&rest, bounds.upper, -1.0), Some(bounds.upper));
        rest = clip(&rest, bounds.upper, 1.0);
    }
    f(&rest, None);
}

fn clipped_cell_moments(g: [f64; 3], bounds: Bounds) -> [f64; 3] {
    let mut acc = [0.0; 3];
    for_each_piece(g, bounds, |poly, value| polygon_moments(poly, value, &mut acc));
    acc
}

/// `‖P_[a,b](-w/α)‖²_{L2}` integrated exactly on the same pieces.
pub fn clipped_norm_squared(mesh: &Mesh, w: &FeFunction<'_>, bounds: Bounds, alpha: f64) -> f64 {
    assert!(alpha > 0.0, "alpha must be positive");
    (0..mesh.n_cells())
        .map(|k| {
            let g = w.cell_values(k).map(|v| -v / alpha);
            let mut total = 0.0;
            for_each_piece(g, bounds, |poly, value| total += polygon_square(poly, value));
            total * mesh.cell_area(k)
        })
        .sum()
}

/// `(1/|K|) ∫_poly v²` with `v` as in [`polygon_moments`].
fn polygon_square(poly: &[Node], value: Option<f64>) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let v = |n: &Node| value.unwrap_or(n.g);
    let mut acc = 0.0;
    for i in 1..poly.len() - 1 {
        let tri = [poly[0], poly[i], poly[i + 1]];
        let vs = tri.map(|n| v(&n));
        let sum: f64 = vs.iter().sum();
        let squares: f64 = vs.iter().map(|x| x * x).sum();
        acc += bary_area_ratio(tri.map(|n| n.bary)) / 12.0 * (squares + sum * sum);
    }
    acc
}

/// Hat-function values at `x0` scattered to the vertices of `cell`.
pub fn load_point_in_cell(mesh: &Mesh, x0: Point, cell: usize) -> Vec<f64> {
    let bary = mesh.barycentric(cell, x0);
    let mut load = vec![0.0; mesh.n_vertices()];
    for (j, &v) in mesh.cells()[cell].iter().enumerate() {
        load[v] += bary[j];
    }
    load
}

/// Discrete Dirac load `φ_i(x0)` for a strictly interior point `x0`.
pub fn load_point(mesh: &Mesh, x0: Point) -> Result<Vec<f64>> {
    if mesh.on_boundary(x0) {
        return Err(Error::Precondition(format!(
            "point ({}, {}) is not strictly interior",
            x0[0], x0[1]
        )));
    }
    let (cell, _) = mesh.locate_point(x0)?;
    Ok(load_point_in_cell(mesh, x0, cell))
}
