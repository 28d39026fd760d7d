//! Convergence studies on the disc with the closed-form solution, and the
//! dense-oracle cross-check.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::analysis::{
    check_assumption_74, classify_cells, estimate_eoc, l1_error_fe_with, l2_difference, l2_norm,
    least_squares_order, ConvergenceRecord, DEFAULT_CLASSIFY_TOL, SINGULAR_EXTRA_LEVELS,
};
use crate::config::{DomainConfig, StudyConfig, StudyVariant};
use crate::control::{post_process, ControlProblem, ControlRepr, ReducedSystem, SolveOptions, Variant};
use crate::fem::{factorize_with, load_point, FeSpace};
use crate::greens::ExactSolution;
use crate::mesh::{build_disc_mesh, Mesh};
use crate::oracle::{cellwise_qp, unconstrained_kkt};
use crate::{Bounds, Error, Point, Result};

/// Header of the study CSV.
pub const CSV_HEADER: &str = "level,h,n_vertices,n_cells,error,eoc";

/// Pass threshold of the oracle check with finite bounds.
pub const QP_ORACLE_TOL: f64 = 1e-8;
/// Pass threshold of the oracle check without bounds.
pub const KKT_ORACLE_TOL: f64 = 1e-10;
/// Stationarity target of the projected-gradient oracle.
pub const QP_STATIONARITY: f64 = 1e-12;

/// The single-point tracking problem whose solution is `exact`.
pub fn manufactured_problem(exact: &ExactSolution) -> Result<ControlProblem> {
    let sol = *exact;
    ControlProblem::new(
        vec![exact.center],
        vec![exact.target()],
        exact.alpha,
        exact.bounds,
        move |x: Point| sol.manufactured_f(x),
    )
}

fn exact_for(config: &StudyConfig) -> Result<ExactSolution> {
    match config.domain {
        DomainConfig::Disc { center, radius } => {
            if config.variant != StudyVariant::Greens && radius != 0.5 {
                return Err(Error::Config(format!(
                    "the manufactured state cos(π|x − x_1|) needs radius 0.5, got {radius}"
                )));
            }
            Ok(ExactSolution {
                center,
                radius,
                ..ExactSolution::planar(config.bounds)
            }
            .with_alpha(config.alpha))
        }
        DomainConfig::UnitSquare => Err(Error::Config(
            "studies need the disc domain (no closed-form solution on the square)".into(),
        )),
    }
}

/// Error and secondary quantities on one level.
fn run_level(config: &StudyConfig, exact: &ExactSolution, level: usize) -> Result<ConvergenceRecord> {
    let mesh = build_disc_mesh(exact.center, exact.radius, level)?;
    let space = FeSpace::new(&mesh);
    let depth = config.subdivision;
    let mut extras = BTreeMap::new();
    let q_exact = |x: Point| exact.exact_control(x);

    let error = match config.variant {
        StudyVariant::Greens => {
            let factor = factorize_with(&space.stiffness()?, config.solver)?;
            let g_h = space.solve(&factor, &load_point(&mesh, exact.center)?)?;
            let g = |x: Point| exact.z1_exact(x);
            extras.insert("greens_l2".into(), l2_norm(&mesh, &g_h, depth));
            l1_error_fe_with(&mesh, &g, exact.center, &g_h, depth, SINGULAR_EXTRA_LEVELS)
        }
        variant => {
            let problem = manufactured_problem(exact)?;
            let system = ReducedSystem::new(&problem, &mesh, config.solver)?;
            let discrete = match variant {
                StudyVariant::Variational => Variant::Variational,
                _ => Variant::Cellwise,
            };
            let options = SolveOptions {
                tol: config.tol,
                solver: config.solver,
                ..SolveOptions::default()
            };
            let solution = system.solve(discrete, &options)?;
            extras.insert("coefficient".into(), solution.coefficients[0]);
            extras.insert("iterations".into(), solution.iterations as f64);
            extras.insert("residual".into(), solution.residual);
            let classes = classify_cells(&mesh, q_exact, config.bounds, DEFAULT_CLASSIFY_TOL);
            extras.insert("t3_ratio".into(), check_assumption_74(&classes, &mesh));
            match variant {
                StudyVariant::PostProcessed => {
                    let cellwise_error = l2_difference(&mesh, &q_exact, &solution.control, depth);
                    extras.insert("cellwise_error".into(), cellwise_error);
                    let q_hat = post_process(&solution, config.alpha, config.bounds)?;
                    l2_difference(&mesh, &q_exact, &q_hat, depth)
                }
                _ => l2_difference(&mesh, &q_exact, &solution.control, depth),
            }
        }
    };

    Ok(ConvergenceRecord {
        level,
        h: mesh.h(),
        n_vertices: mesh.n_vertices(),
        n_cells: mesh.n_cells(),
        n_dofs: space.n_dofs(),
        error,
        eoc: None,
        extras,
    })
}

/// Runs one study and writes the CSV when an output path is configured.
/// Nothing is written if any level fails.
pub fn run_study(config: &StudyConfig) -> Result<Vec<ConvergenceRecord>> {
    config.validate()?;
    let exact = exact_for(config)?;
    let levels: Vec<usize> = (config.levels.0..=config.levels.1).collect();
    let results: Vec<Result<ConvergenceRecord>> = if config.parallel_levels {
        std::thread::scope(|s| {
            let handles: Vec<_> = levels
                .iter()
                .map(|&l| s.spawn(move || run_level(config, &exact, l)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("study worker panicked"))
                .collect()
        })
    } else {
        levels.iter().map(|&l| run_level(config, &exact, l)).collect()
    };
    let results = results.into_iter().zip(&levels).map(|(r, &level)| {
        r.map_err(|e| Error::Level {
            level,
            source: Box::new(e),
        })
    });
    let mut records = results.collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(f64, f64)> = records.iter().map(|r| (r.h, r.error)).collect();
    for (rec, eoc) in records.iter_mut().skip(1).zip(estimate_eoc(&pairs)) {
        rec.eoc = eoc;
    }
    if let Some(path) = &config.output {
        write_csv(path, &records)?;
    }
    Ok(records)
}

fn format_full(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_csv(records: &[ConvergenceRecord]) -> String {
    let mut out = String::new();
    writeln!(out, "{CSV_HEADER}").unwrap();
    for (i, r) in records.iter().enumerate() {
        let eoc = match (i, r.eoc) {
            (0, _) => String::new(),
            (_, Some(e)) => format_full(e),
            (_, None) => "nan".into(),
        };
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.level,
            format_full(r.h),
            r.n_vertices,
            r.n_cells,
            format_full(r.error),
            eoc
        )
        .unwrap();
    }
    out
}

pub fn write_csv(path: &Path, records: &[ConvergenceRecord]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, to_csv(records))?;
    Ok(())
}

/// Least-squares order over the last `n` records.
pub fn tail_order(records: &[ConvergenceRecord], n: usize) -> Option<f64> {
    let start = records.len().saturating_sub(n);
    let pairs: Vec<(f64, f64)> = records[start..].iter().map(|r| (r.h, r.error)).collect();
    least_squares_order(&pairs)
}

/// Human-readable table of a study.
pub fn summary(config: &StudyConfig, records: &[ConvergenceRecord]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "variant {}  alpha {}  bounds [{}, {}]",
        config.variant.as_str(),
        config.alpha,
        config.bounds.lower,
        config.bounds.upper
    )
    .unwrap();
    writeln!(out, "{:>5} {:>12} {:>9} {:>9} {:>14} {:>7}  extras", "level", "h", "vertices", "cells", "error", "eoc").unwrap();
    for r in records {
        let eoc = r.eoc.map(|e| format!("{e:.3}")).unwrap_or_else(|| "-".into());
        let extras: Vec<String> = r.extras.iter().map(|(k, v)| format!("{k}={v:.6e}")).collect();
        writeln!(
            out,
            "{:>5} {:>12.6e} {:>9} {:>9} {:>14.6e} {:>7}  {}",
            r.level,
            r.h,
            r.n_vertices,
            r.n_cells,
            r.error,
            eoc,
            extras.join(" ")
        )
        .unwrap();
    }
    if let Some(order) = tail_order(records, 3) {
        writeln!(out, "least-squares order over the last 3 levels: {order:.4}").unwrap();
    }
    out
}

#[derive(Debug, Clone)]
pub struct OracleLevel {
    pub level: usize,
    pub max_difference: f64,
    pub threshold: f64,
    pub kind: &'static str,
}

impl OracleLevel {
    pub fn passed(&self) -> bool {
        self.max_difference <= self.threshold
    }
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub levels: Vec<OracleLevel>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.levels.iter().all(OracleLevel::passed)
    }
}

/// Compares the cellwise solver with the dense oracle on one mesh.
pub fn oracle_difference(problem: &ControlProblem, mesh: &Mesh, tol: f64) -> Result<OracleLevel> {
    let system = ReducedSystem::new(problem, mesh, Default::default())?;
    let options = SolveOptions {
        tol,
        ..SolveOptions::default()
    };
    let solution = system.solve(Variant::Cellwise, &options)?;
    let ControlRepr::Cellwise(q) = &solution.control else {
        unreachable!("cellwise solve returns a cellwise control")
    };
    let bounds = problem.bounds();
    let unconstrained = !bounds.lower.is_finite() && !bounds.upper.is_finite();
    let (reference, threshold, kind) = if unconstrained {
        let kkt = unconstrained_kkt(problem, mesh, Variant::Cellwise)?;
        (kkt.control, KKT_ORACLE_TOL, "dense-kkt")
    } else {
        let qp = cellwise_qp(problem, mesh, QP_STATIONARITY)?;
        (qp.cell_values, QP_ORACLE_TOL, "projected-gradient")
    };
    let max_difference = q
        .values()
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(OracleLevel {
        level: mesh.level(),
        max_difference,
        threshold,
        kind,
    })
}

/// Oracle cross-check of the cellwise solver on every configured level (≤ 2).
pub fn run_oracle_check(config: &StudyConfig) -> Result<OracleReport> {
    config.validate()?;
    if config.levels.1 > 2 {
        return Err(Error::Config(format!(
            "oracle check is limited to levels ≤ 2, got {}",
            config.levels.1
        )));
    }
    let exact = exact_for(&StudyConfig {
        variant: StudyVariant::Cellwise,
        ..config.clone()
    })?;
    let problem = manufactured_problem(&exact)?;
    let levels = (config.levels.0..=config.levels.1)
        .map(|level| {
            let mesh = build_disc_mesh(exact.center, exact.radius, level)?;
            oracle_difference(&problem, &mesh, config.tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleReport { levels })
}

/// Planar bounds shorthand used by the CLI and tests.
pub fn study_config(variant: StudyVariant, levels: (usize, usize), bounds: Bounds) -> StudyConfig {
    StudyConfig {
        variant,
        levels,
        bounds,
        ..StudyConfig::default()
    }
}
