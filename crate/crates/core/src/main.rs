use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pointtrack::config::{parse_bounds, parse_f64, parse_levels, StudyConfig, StudyVariant};
use pointtrack::control::{post_process, ControlRepr, ReducedSystem, SolveOptions, Variant};
use pointtrack::fem::CellField;
use pointtrack::greens::ExactSolution;
use pointtrack::mesh::{build_disc_mesh, build_unit_square_mesh};
use pointtrack::study::{manufactured_problem, run_oracle_check, run_study, summary};
use pointtrack::{analysis, config::DomainConfig, Error, Result};

#[derive(Parser)]
#[command(name = "pointtrack", version, about = "Pointwise-tracking optimal control convergence studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve on a single level and dump the control, state, and adjoint.
    Solve {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Sweep a range of levels and write the convergence CSV.
    Study {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Cross-check the cellwise solver with the dense oracle (levels ≤ 2).
    Oracle {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Write the mesh of one level as text.
    MeshDump {
        #[arg(long)]
        level: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    variant: Option<String>,
    /// Inclusive range `A..B`.
    #[arg(long)]
    levels: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// `A,B`; `inf` and `-inf` are accepted.
    #[arg(long, allow_hyphen_values = true)]
    bounds: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    parallel_levels: bool,
}

impl Overrides {
    fn resolve(&self) -> Result<StudyConfig> {
        let mut cfg = match &self.config {
            Some(path) => StudyConfig::load(path)?,
            None => StudyConfig::default(),
        };
        if let Some(v) = &self.variant {
            cfg.variant = v.parse()?;
        }
        if let Some(l) = &self.levels {
            cfg.levels = parse_levels(l)?;
        }
        if let Some(a) = &self.alpha {
            cfg.alpha = parse_f64(a)?;
        }
        if let Some(b) = &self.bounds {
            cfg.bounds = parse_bounds(b)?;
        }
        if let Some(o) = &self.out {
            cfg.output = Some(o.clone());
        }
        if let Some(t) = &self.tol {
            cfg.tol = parse_f64(t)?;
        }
        cfg.parallel_levels |= self.parallel_levels;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn solve_single(cfg: &StudyConfig, level: usize) -> Result<()> {
    let DomainConfig::Disc { center, radius } = cfg.domain else {
        return Err(Error::Config("solve needs the disc domain".into()));
    };
    let exact = ExactSolution {
        center,
        radius,
        ..ExactSolution::planar(cfg.bounds)
    }
    .with_alpha(cfg.alpha);
    let variant = match cfg.variant {
        StudyVariant::Variational => Variant::Variational,
        StudyVariant::Cellwise | StudyVariant::PostProcessed => Variant::Cellwise,
        StudyVariant::Greens => {
            return Err(Error::Config("solve supports variational, cellwise, postproc".into()))
        }
    };
    let mesh = build_disc_mesh(center, radius, level)?;
    let problem = manufactured_problem(&exact)?;
    let system = ReducedSystem::new(&problem, &mesh, cfg.solver)?;
    let options = SolveOptions {
        tol: cfg.tol,
        solver: cfg.solver,
        ..SolveOptions::default()
    };
    let solution = system.solve(variant, &options)?;
    let q_exact = |x: [f64; 2]| exact.exact_control(x);
    let post = match cfg.variant {
        StudyVariant::PostProcessed => Some(post_process(&solution, cfg.alpha, cfg.bounds)?),
        _ => None,
    };
    let error = match &post {
        Some(q) => analysis::l2_error_control(&mesh, &q_exact, q),
        None => analysis::l2_error_control(&mesh, &q_exact, &solution.control),
    };
    println!(
        "level {level}: h = {:.6e}, coefficients = {:?}, iterations = {}, residual = {:.3e}, L2 control error = {:.6e}",
        mesh.h(),
        solution.coefficients,
        solution.iterations,
        solution.residual,
        error
    );

    if let Some(path) = &cfg.output {
        let mut out = String::new();
        writeln!(out, "# vertices: index,x,y,state,adjoint").unwrap();
        for (v, p) in mesh.vertices().iter().enumerate() {
            writeln!(
                out,
                "{v},{:.16e},{:.16e},{:.16e},{:.16e}",
                p[0], p[1], solution.state.values()[v], solution.adjoint.values()[v]
            )
            .unwrap();
        }
        writeln!(out, "# cells: index,cx,cy,control_at_centroid").unwrap();
        for k in 0..mesh.n_cells() {
            let c = mesh.cell_centroid(k);
            let b = [1.0 / 3.0; 3];
            let value = match (&post, &solution.control) {
                (Some(q), _) => q.value_in_cell(k, b, c),
                (None, ControlRepr::Cellwise(q)) => q.values()[k],
                (None, control) => control.value_in_cell(k, b, c),
            };
            writeln!(out, "{k},{:.16e},{:.16e},{value:.16e}", c[0], c[1]).unwrap();
        }
        std::fs::write(path, out)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve { overrides, level } => {
            let cfg = overrides.resolve()?;
            solve_single(&cfg, level.unwrap_or(cfg.levels.0))
        }
        Command::Study { overrides } => {
            let cfg = overrides.resolve()?;
            let records = run_study(&cfg)?;
            print!("{}", summary(&cfg, &records));
            Ok(())
        }
        Command::Oracle { overrides } => {
            let cfg = overrides.resolve()?;
            let report = run_oracle_check(&cfg)?;
            for l in &report.levels {
                println!(
                    "level {}: {} max |q_h - oracle| = {:.3e} (threshold {:.0e}) {}",
                    l.level,
                    l.kind,
                    l.max_difference,
                    l.threshold,
                    if l.passed() { "PASS" } else { "FAIL" }
                );
            }
            if report.passed() {
                Ok(())
            } else {
                Err(Error::Precondition("oracle check failed".into()))
            }
        }
        Command::MeshDump { level, out, config } => {
            let cfg = match config {
                Some(p) => StudyConfig::load(&p)?,
                None => StudyConfig::default(),
            };
            let mesh = match cfg.domain {
                DomainConfig::Disc { center, radius } => build_disc_mesh(center, radius, level)?,
                DomainConfig::UnitSquare => build_unit_square_mesh(level)?,
            };
            mesh.write_dump(&out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e.root() {
                Error::Divergence { .. } => ExitCode::from(2),
                Error::Config(_) => ExitCode::from(3),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
