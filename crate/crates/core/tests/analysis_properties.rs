use pointtrack::analysis::{
    check_assumption_74, classify_cells, estimate_eoc, l1_error_fe_with, l2_difference, least_squares_order,
    CellClass, DEFAULT_CLASSIFY_TOL, DEFAULT_SUBDIVISION, SINGULAR_EXTRA_LEVELS,
};
use pointtrack::control::{solve_discrete, Variant};
use pointtrack::fem::{factorize, load_point, FeSpace};
use pointtrack::greens::ExactSolution;
use pointtrack::mesh::{build_disc_mesh, dist};
use pointtrack::study::manufactured_problem;
use pointtrack::Bounds;
use proptest::prelude::*;

const X1: [f64; 2] = [0.5, 0.5];

#[test]
fn l2_difference_is_a_metric() {
    let mesh = build_disc_mesh(X1, 0.5, 3).unwrap();
    let f = |x: [f64; 2]| (4.0 * x[0]).sin();
    let g = |x: [f64; 2]| x[1] * x[1];
    let h = |x: [f64; 2]| (x[0] - x[1]).abs();
    let d = |a: &dyn Fn([f64; 2]) -> f64, b: &dyn Fn([f64; 2]) -> f64| {
        l2_difference(&mesh, &|x| a(x), &|x| b(x), DEFAULT_SUBDIVISION)
    };
    assert_eq!(d(&f, &f), 0.0);
    assert!((d(&f, &g) - d(&g, &f)).abs() < 1e-15);
    assert!(d(&f, &h) <= d(&f, &g) + d(&g, &h) + 1e-15);
    assert!(d(&f, &g) > 0.0);
}

#[test]
fn error_quadrature_is_resolved() {
    let exact = ExactSolution::planar(Bounds::symmetric(0.2));
    let problem = manufactured_problem(&exact).unwrap();
    let q_exact = |x: [f64; 2]| exact.exact_control(x);
    let mesh = build_disc_mesh(X1, 0.5, 4).unwrap();
    for variant in [Variant::Cellwise, Variant::Variational] {
        let sol = solve_discrete(&problem, &mesh, variant, 1e-12).unwrap();
        let e = |depth| l2_difference(&mesh, &q_exact, &sol.control, depth);
        let (coarse, default) = (e(DEFAULT_SUBDIVISION - 1), e(DEFAULT_SUBDIVISION));
        assert!((coarse - default).abs() < 1e-3 * default, "{variant:?}: {coarse:e} vs {default:e}");
    }
}

#[test]
fn singular_refinement_is_resolved() {
    let exact = ExactSolution::planar(Bounds::symmetric(1.0));
    let g = |x: [f64; 2]| exact.z1_exact(x);
    for level in [2, 4] {
        let mesh = build_disc_mesh(X1, 0.5, level).unwrap();
        let space = FeSpace::new(&mesh);
        let factor = factorize(&space.stiffness().unwrap()).unwrap();
        let g_h = space.solve(&factor, &load_point(&mesh, X1).unwrap()).unwrap();
        let base = l1_error_fe_with(&mesh, &g, X1, &g_h, DEFAULT_SUBDIVISION, SINGULAR_EXTRA_LEVELS);
        let finer = l1_error_fe_with(&mesh, &g, X1, &g_h, DEFAULT_SUBDIVISION, SINGULAR_EXTRA_LEVELS + 2);
        assert!((base - finer).abs() < 5e-3 * finer, "level {level}: {base:e} vs {finer:e}");
    }
}

#[test]
fn classification_follows_the_active_radius() {
    let exact = ExactSolution::planar(Bounds::symmetric(0.2));
    let r_star = exact.active_radius().unwrap();
    let mut ratios = Vec::new();
    let mut coarse_classes = None;
    let mut coarse_mesh = None;
    for level in 2..=6 {
        let mesh = build_disc_mesh(X1, 0.5, level).unwrap();
        let classes = classify_cells(&mesh, |x| exact.exact_control(x), exact.bounds, DEFAULT_CLASSIFY_TOL);
        for k in 0..mesh.n_cells() {
            let far = mesh.cell_points(k).iter().map(|&p| dist(p, X1)).fold(0.0, f64::max);
            match classes.classes[k] {
                CellClass::T1 => assert!(far <= r_star + 1e-12),
                CellClass::T2 => assert!(dist(mesh.cell_centroid(k), X1) > r_star),
                CellClass::T3 => {}
            }
            if far < r_star {
                assert_eq!(classes.classes[k], CellClass::T1);
            }
        }
        assert!(classes.count(CellClass::T3) > 0);
        // children of fully active cells stay fully active
        if let (Some(cm), Some(cc)) = (&coarse_mesh, &coarse_classes) {
            let cm: &pointtrack::mesh::Mesh = cm;
            let cc: &pointtrack::analysis::CellClassification = cc;
            for k in 0..mesh.n_cells() {
                let (parent, _) = cm.locate_point(mesh.cell_centroid(k)).unwrap();
                if cc.classes[parent] == CellClass::T1 {
                    assert_eq!(classes.classes[k], CellClass::T1);
                }
            }
        }
        ratios.push(check_assumption_74(&classes, &mesh));
        coarse_classes = Some(classes);
        coarse_mesh = Some(mesh);
    }
    let perimeter = 2.0 * std::f64::consts::PI * r_star;
    for r in &ratios {
        assert!(*r > 0.25 * perimeter && *r < 4.0 * perimeter, "ratio {r} vs perimeter {perimeter}");
    }
}

#[test]
fn unbounded_controls_are_all_inactive() {
    let mesh = build_disc_mesh(X1, 0.5, 2).unwrap();
    let classes = classify_cells(&mesh, |x| x[0], Bounds::unbounded(), DEFAULT_CLASSIFY_TOL);
    assert_eq!(classes.count(CellClass::T2), mesh.n_cells());
}

proptest! {
    #[test]
    fn power_laws_have_their_order(p in 0.5f64..3.0, c in 1e-3f64..10.0) {
        let pairs: Vec<(f64, f64)> = (0..5).map(|l| {
            let h = 0.3 / 2f64.powi(l);
            (h, c * h.powf(p))
        }).collect();
        for e in estimate_eoc(&pairs) {
            prop_assert!((e.unwrap() - p).abs() < 1e-10);
        }
        prop_assert!((least_squares_order(&pairs).unwrap() - p).abs() < 1e-10);
    }
}

#[test]
fn study_errors_decrease_with_level() {
    use pointtrack::config::StudyVariant;
    use pointtrack::study::{run_study, study_config};
    for (variant, bound) in [
        (StudyVariant::Cellwise, 1.0),
        (StudyVariant::PostProcessed, 0.2),
        (StudyVariant::Variational, 0.2),
        (StudyVariant::Greens, 1.0),
    ] {
        let records = run_study(&study_config(variant, (1, 5), Bounds::symmetric(bound))).unwrap();
        for w in records.windows(2) {
            assert!(w[1].error < 1.1 * w[0].error, "{variant:?} level {}", w[1].level);
        }
        assert!(records.last().unwrap().error < records[0].error);
    }
}
