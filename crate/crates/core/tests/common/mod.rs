use nalgebra::DMatrix;
use pointtrack::fem::FeFunction;
use pointtrack::mesh::Mesh;
use pointtrack::Bounds;

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Golub–Welsch on [0, 1]
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i.abs_diff(j) == 1 {
            let k = i.max(j) as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = m.symmetric_eigen();
    let nodes = eig.eigenvalues.iter().map(|x| 0.5 * (x + 1.0)).collect();
    let weights = (0..n).map(|i| eig.eigenvectors[(0, i)].powi(2)).collect();
    (nodes, weights)
}

fn integrate_1d(lo: f64, hi: f64, breaks: &[f64], rule: &(Vec<f64>, Vec<f64>), f: impl Fn(f64) -> f64) -> f64 {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&b| b > lo && b < hi).collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.windows(2)
        .map(|w| {
            let len = w[1] - w[0];
            rule.0.iter().zip(&rule.1).map(|(x, wt)| wt * len * f(w[0] + len * x)).sum::<f64>()
        })
        .sum()
}

/// `∫_K h(P(g), φ)` by iterated Gauss–Legendre with breakpoints on the level
/// lines, per cell.
fn clipped_cell_integrals(
    mesh: &Mesh,
    w: &FeFunction<'_>,
    bounds: Bounds,
    alpha: f64,
    integrand: impl Fn(f64, [f64; 3]) -> f64,
) -> Vec<f64> {
    let rule = gauss_legendre(6);
    (0..mesh.n_cells())
        .map(|k| {
            let g = w.cell_values(k).map(|v| -v / alpha);
            let (g0, gs, gt) = (g[0], g[1] - g[0], g[2] - g[0]);
            let levels: Vec<f64> = [bounds.lower, bounds.upper].into_iter().filter(|l| l.is_finite()).collect();
            // s where a level line meets t = 0 or t = 1 − s
            let mut outer = Vec::new();
            for &l in &levels {
                if gs != 0.0 {
                    outer.push((l - g0) / gs);
                }
                if gs - gt != 0.0 {
                    outer.push((l - g0 - gt) / (gs - gt));
                }
            }
            let value = integrate_1d(0.0, 1.0, &outer, &rule, |s| {
                let inner: Vec<f64> = if gt != 0.0 {
                    levels.iter().map(|l| (l - g0 - gs * s) / gt).collect()
                } else {
                    Vec::new()
                };
                integrate_1d(0.0, 1.0 - s, &inner, &rule, |t| {
                    integrand(bounds.project(g0 + gs * s + gt * t), [1.0 - s - t, s, t])
                })
            });
            2.0 * mesh.cell_area(k) * value
        })
        .collect()
}

/// `(P(-w/α), φ_i)` for every vertex.
pub fn clipped_oracle(mesh: &Mesh, w: &FeFunction<'_>, bounds: Bounds, alpha: f64) -> Vec<f64> {
    let mut load = vec![0.0; mesh.n_vertices()];
    for j in 0..3 {
        let per_cell = clipped_cell_integrals(mesh, w, bounds, alpha, |p, phi| p * phi[j]);
        for (cell, v) in mesh.cells().iter().zip(per_cell) {
            load[cell[j]] += v;
        }
    }
    load
}

/// `‖P(-w/α)‖²_{L2}`.
#[allow(dead_code)]
pub fn clipped_norm_oracle(mesh: &Mesh, w: &FeFunction<'_>, bounds: Bounds, alpha: f64) -> f64 {
    clipped_cell_integrals(mesh, w, bounds, alpha, |p, _| p * p).iter().sum()
}
