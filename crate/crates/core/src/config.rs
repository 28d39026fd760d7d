//! Flat `key = value` study configuration.
//!
//! Lines starting with `#` are comments and `[section]` headers are ignored,
//! so keys must be unique across the file. Bounds accept `inf` and `-inf`.
//!
//! ```text
//! variant = postproc
//! levels = 2..6
//! alpha = 1
//! bounds = -0.2, 0.2
//! tol = 1e-12
//! output = results/postproc.csv
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::fem::SolverKind;
use crate::mesh::MAX_LEVEL;
use crate::{Bounds, Error, Point, Result};

/// Largest level a study may request.
pub const MAX_STUDY_LEVEL: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainConfig {
    Disc { center: Point, radius: f64 },
    UnitSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyVariant {
    Variational,
    Cellwise,
    PostProcessed,
    Greens,
}

impl StudyVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            StudyVariant::Variational => "variational",
            StudyVariant::Cellwise => "cellwise",
            StudyVariant::PostProcessed => "postproc",
            StudyVariant::Greens => "greens",
        }
    }
}

impl FromStr for StudyVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "variational" => Ok(StudyVariant::Variational),
            "cellwise" => Ok(StudyVariant::Cellwise),
            "postproc" => Ok(StudyVariant::PostProcessed),
            "greens" => Ok(StudyVariant::Greens),
            other => Err(Error::Config(format!("unknown variant '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub domain: DomainConfig,
    pub variant: StudyVariant,
    pub levels: (usize, usize),
    pub alpha: f64,
    pub bounds: Bounds,
    pub tol: f64,
    pub output: Option<PathBuf>,
    pub subdivision: usize,
    pub solver: SolverKind,
    pub parallel_levels: bool,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            domain: DomainConfig::Disc {
                center: [0.5, 0.5],
                radius: 0.5,
            },
            variant: StudyVariant::Cellwise,
            levels: (2, 6),
            alpha: 1.0,
            bounds: Bounds::symmetric(1.0),
            tol: crate::control::DEFAULT_TOL,
            output: None,
            subdivision: crate::analysis::DEFAULT_SUBDIVISION,
            solver: SolverKind::Cholesky,
            parallel_levels: false,
        }
    }
}

pub fn parse_f64(s: &str) -> Result<f64> {
    match s.trim() {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        t => t
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("invalid number '{t}'"))),
    }
}

pub fn format_f64(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:?}")
    }
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid integer '{}'", s.trim())))
}

/// `A..B` (inclusive) or a single level `A`.
pub fn parse_levels(s: &str) -> Result<(usize, usize)> {
    match s.split_once("..") {
        Some((a, b)) => Ok((parse_usize(a)?, parse_usize(b.trim_start_matches('=')) ?)),
        None => {
            let l = parse_usize(s)?;
            Ok((l, l))
        }
    }
}

/// `A,B`.
pub fn parse_bounds(s: &str) -> Result<Bounds> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::Config(format!("bounds must be 'a,b', got '{s}'")))?;
    Ok(Bounds {
        lower: parse_f64(a)?,
        upper: parse_f64(b)?,
    })
}

fn parse_point(s: &str) -> Result<Point> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::Config(format!("point must be 'x,y', got '{s}'")))?;
    Ok([parse_f64(a)?, parse_f64(b)?])
}

impl StudyConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = StudyConfig::default();
        let mut domain_kind = "disc".to_string();
        let mut center = [0.5, 0.5];
        let mut radius = 0.5;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "domain" => domain_kind = value.to_string(),
                "center" => center = parse_point(value)?,
                "radius" => radius = parse_f64(value)?,
                "variant" => cfg.variant = value.parse()?,
                "levels" => cfg.levels = parse_levels(value)?,
                "alpha" => cfg.alpha = parse_f64(value)?,
                "bounds" => cfg.bounds = parse_bounds(value)?,
                "tol" => cfg.tol = parse_f64(value)?,
                "output" => cfg.output = (!value.is_empty()).then(|| PathBuf::from(value)),
                "subdivision" => cfg.subdivision = parse_usize(value)?,
                "solver" => {
                    cfg.solver = match value {
                        "cholesky" => SolverKind::Cholesky,
                        "pcg" => SolverKind::Pcg,
                        other => return Err(Error::Config(format!("unknown solver '{other}'"))),
                    }
                }
                "parallel_levels" => {
                    cfg.parallel_levels = value
                        .parse()
                        .map_err(|_| Error::Config(format!("invalid boolean '{value}'")))?
                }
                other => return Err(Error::Config(format!("unknown key '{other}'"))),
            }
        }
        cfg.domain = match domain_kind.as_str() {
            "disc" => DomainConfig::Disc { center, radius },
            "square" => DomainConfig::UnitSquare,
            other => return Err(Error::Config(format!("unknown domain '{other}'"))),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.levels;
        if lo > hi {
            return Err(Error::Config(format!("empty level range {lo}..{hi}")));
        }
        if hi > MAX_STUDY_LEVEL.min(MAX_LEVEL) {
            return Err(Error::Config(format!("level {hi} exceeds {MAX_STUDY_LEVEL}")));
        }
        if !(self.bounds.lower < self.bounds.upper) {
            return Err(Error::Config(format!(
                "bounds need a < b, got {}, {}",
                format_f64(self.bounds.lower),
                format_f64(self.bounds.upper)
            )));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.tol >= 1e-13) {
            return Err(Error::Config(format!("tol must be at least 1e-13, got {:e}", self.tol)));
        }
        if let DomainConfig::Disc { radius, .. } = self.domain {
            if !(radius > 0.0) {
                return Err(Error::Config(format!("radius must be positive, got {radius}")));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self.domain {
            DomainConfig::Disc { center, radius } => {
                writeln!(out, "domain = disc").unwrap();
                writeln!(out, "center = {}, {}", format_f64(center[0]), format_f64(center[1])).unwrap();
                writeln!(out, "radius = {}", format_f64(radius)).unwrap();
            }
            DomainConfig::UnitSquare => writeln!(out, "domain = square").unwrap(),
        }
        writeln!(out, "variant = {}", self.variant.as_str()).unwrap();
        writeln!(out, "levels = {}..{}", self.levels.0, self.levels.1).unwrap();
        writeln!(out, "alpha = {}", format_f64(self.alpha)).unwrap();
        writeln!(
            out,
            "bounds = {}, {}",
            format_f64(self.bounds.lower),
            format_f64(self.bounds.upper)
        )
        .unwrap();
        writeln!(out, "tol = {}", format_f64(self.tol)).unwrap();
        if let Some(p) = &self.output {
            writeln!(out, "output = {}", p.display()).unwrap();
        }
        writeln!(out, "subdivision = {}", self.subdivision).unwrap();
        let solver = match self.solver {
            SolverKind::Cholesky => "cholesky",
            SolverKind::Pcg => "pcg",
        };
        writeln!(out, "solver = {solver}").unwrap();
        writeln!(out, "parallel_levels = {}", self.parallel_levels).unwrap();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_comments_and_infinite_bounds() {
        let cfg = StudyConfig::parse(
            "# study\n[problem]\nvariant = variational\nbounds = -inf, 0.2\n\n[run]\nlevels = 1..3 # sweep\n",
        )
        .unwrap();
        assert_eq!(cfg.variant, StudyVariant::Variational);
        assert_eq!(cfg.bounds.lower, f64::NEG_INFINITY);
        assert_eq!(cfg.bounds.upper, 0.2);
        assert_eq!(cfg.levels, (1, 3));
    }

    #[test]
    fn rejects_invalid_configs() {
        assert!(StudyConfig::parse("levels = 4..2").is_err());
        assert!(StudyConfig::parse("levels = 2..9").is_err());
        assert!(StudyConfig::parse("bounds = 1, -1").is_err());
        assert!(StudyConfig::parse("bogus = 1").is_err());
        assert!(StudyConfig::parse("alpha = -1").is_err());
        assert!(StudyConfig::parse("tol = 1e-15").is_err());
        assert!(StudyConfig::parse("variant").is_err());
    }

    #[test]
    fn single_level() {
        assert_eq!(parse_levels("3").unwrap(), (3, 3));
        assert_eq!(parse_levels("2..=5").unwrap(), (2, 5));
    }
}
