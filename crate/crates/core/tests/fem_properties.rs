use nalgebra::DMatrix;
use pointtrack::fem::{
    clipped_norm_squared, factorize, factorize_with, load_clipped_linear, load_point, load_smooth, FeFunction, FeSpace, SolverKind,
};
use pointtrack::greens::ExactSolution;
use pointtrack::mesh::{build_disc_mesh, Mesh};
use pointtrack::Bounds;
use proptest::prelude::*;
use std::f64::consts::PI;

mod common;
use common::{clipped_norm_oracle, clipped_oracle};

const X1: [f64; 2] = [0.5, 0.5];

fn disc(level: usize) -> Mesh {
    build_disc_mesh(X1, 0.5, level).unwrap()
}

#[test]
fn stiffness_is_symmetric_positive_definite() {
    let mesh = disc(2);
    let a = FeSpace::new(&mesh).stiffness().unwrap();
    assert!(a.asymmetry() <= 1e-14 * a.max_abs());
    let dense = a.to_dense();
    let m = DMatrix::from_fn(a.n(), a.n(), |i, j| dense[i][j]);
    let min = m.symmetric_eigen().eigenvalues.min();
    assert!(min > 0.0, "smallest eigenvalue {min}");
}

#[test]
fn galerkin_residual_is_small() {
    for level in 1..=5 {
        let mesh = disc(level);
        let space = FeSpace::new(&mesh);
        let a = space.stiffness().unwrap();
        let rhs = space.restrict(&load_smooth(&mesh, |x| 1.0 + x[0] * x[1]));
        for kind in [SolverKind::Cholesky, SolverKind::Pcg] {
            let u = factorize_with(&a, kind).unwrap().solve(&rhs).unwrap();
            let r = a.mul_vec(&u);
            let res = r.iter().zip(&rhs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(res <= 1e-9, "level {level} {kind:?}: residual {res:e}");
        }
    }
}

#[test]
fn discrete_maximum_principle() {
    for level in 0..=5 {
        let mesh = disc(level);
        let space = FeSpace::new(&mesh);
        let factor = factorize(&space.stiffness().unwrap()).unwrap();
        let u = space.solve(&factor, &load_smooth(&mesh, |_| 1.0)).unwrap();
        assert!(u.satisfies_dirichlet());
        assert!(u.values().iter().all(|&v| v >= -1e-10), "level {level}");
        let g = space.solve(&factor, &load_point(&mesh, X1).unwrap()).unwrap();
        assert!(g.evaluate(X1).unwrap() > 0.0, "level {level}");
        assert!(g.values().iter().all(|&v| v >= -1e-10), "level {level}");
    }
}

#[test]
fn manufactured_source_loads_are_finite() {
    let exact = ExactSolution::planar(Bounds::symmetric(0.2));
    for level in 0..=4 {
        let mesh = disc(level);
        let load = load_smooth(&mesh, |x| exact.manufactured_f(x));
        assert!(load.iter().all(|v| v.is_finite()));
    }
}

#[test]
fn state_converges_at_the_center() {
    // −Δ cos(π r) in the plane
    let f = |x: [f64; 2]| {
        let r = ((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2)).sqrt();
        if r < 1e-8 {
            2.0 * PI * PI
        } else {
            PI * PI * (PI * r).cos() + PI * (PI * r).sin() / r
        }
    };
    let mesh = disc(6);
    let space = FeSpace::new(&mesh);
    let factor = factorize(&space.stiffness().unwrap()).unwrap();
    let u = space.solve(&factor, &load_smooth(&mesh, f)).unwrap();
    let err = (u.evaluate(X1).unwrap() - 1.0).abs();
    assert!(err < 1e-3, "u_h(x_1) error {err:e}");
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn clipped_load_matches_quadrature_oracle() {
    let mesh = disc(3);
    let w = FeFunction::interpolate(&mesh, |x| 3.0 * (x[0] - 0.4) - 2.0 * (x[1] - 0.55) + (7.0 * x[0]).sin());
    for bounds in [Bounds::symmetric(0.2), Bounds::symmetric(1.0), Bounds::new(-0.5, 0.1).unwrap()] {
        for alpha in [1.0, 0.5, 4.0] {
            let fast = load_clipped_linear(&mesh, &w, bounds, alpha);
            let slow = clipped_oracle(&mesh, &w, bounds, alpha);
            let d = max_diff(&fast, &slow);
            assert!(d <= 1e-12, "{bounds:?} alpha {alpha}: {d:e}");
            let n = clipped_norm_squared(&mesh, &w, bounds, alpha);
            let n_oracle = clipped_norm_oracle(&mesh, &w, bounds, alpha);
            assert!((n - n_oracle).abs() <= 1e-13 * n_oracle.max(1.0), "{bounds:?} alpha {alpha}: norm");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn clipped_load_matches_oracle_for_random_fields(
        coeffs in proptest::collection::vec(-2.0f64..2.0, 4),
        a in -1.0f64..0.0,
        width in 0.01f64..1.5,
        alpha in 0.1f64..5.0,
    ) {
        let mesh = disc(1);
        let w = FeFunction::interpolate(&mesh, |x| {
            coeffs[0] + coeffs[1] * x[0] + coeffs[2] * x[1] + coeffs[3] * (5.0 * x[0] * x[1]).cos()
        });
        let bounds = Bounds::new(a, a + width).unwrap();
        let d = max_diff(&load_clipped_linear(&mesh, &w, bounds, alpha), &clipped_oracle(&mesh, &w, bounds, alpha));
        prop_assert!(d <= 1e-12, "difference {:e}", d);
    }

    #[test]
    fn hat_loads_sum_to_one(r in 0.0f64..0.45, theta in 0.0f64..std::f64::consts::TAU) {
        let mesh = disc(2);
        let x = [0.5 + r * theta.cos(), 0.5 + r * theta.sin()];
        let load = load_point(&mesh, x).unwrap();
        prop_assert!((load.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(load.iter().all(|&v| v >= -1e-12));
    }
}
