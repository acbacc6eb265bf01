//! `radsum` command-line front end: reads points or a distance matrix,
//! runs one of the solvers and prints text, JSON or SVG.

pub mod json;
pub mod svg;
pub mod text;

use std::ffi::OsString;
use std::fmt;
use std::io::{Read, Write};

use clap::{Parser, ValueEnum};
use radsum::cover::CycleCover;
use radsum::geometry::{solve_euclidean_with, GeometricOptions};
use radsum::metric::{parse_matrix, parse_points, MetricInstance, Norm};
use radsum::oracle::{check_feasible, lp_slack_report};
use radsum::solver::{check_optimality_certificate, solve_general, BallAssignment};
use radsum::transforms::{lower_bounded_radii, star_embedding};
use radsum::{tolerance, Error};

/// Coordinate inputs at least this large go to the geometric solver under
/// `--accel auto`.
pub const AUTO_GEOMETRIC_MIN_POINTS: usize = 64;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Nonoverlapping balls with maximum radius sum.
    Radii,
    /// Non-contractive star embedding with minimum total hub distance.
    Star,
    /// Minimum-weight cycle cover.
    Cover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Accel {
    Auto,
    General,
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricArg {
    Norm(Norm),
    Matrix,
}

impl fmt::Display for MetricArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricArg::Norm(n) => write!(f, "{n}"),
            MetricArg::Matrix => f.write_str("matrix"),
        }
    }
}

fn parse_metric(s: &str) -> Result<MetricArg, String> {
    match s {
        "l1" => Ok(MetricArg::Norm(Norm::L1)),
        "l2" => Ok(MetricArg::Norm(Norm::L2)),
        "linf" => Ok(MetricArg::Norm(Norm::LInf)),
        "matrix" => Ok(MetricArg::Matrix),
        _ => {
            let p = s
                .strip_prefix("lp:")
                .ok_or_else(|| format!("unknown metric '{s}' (l1, l2, linf, lp:<p>, matrix)"))?;
            let p: f64 = p.parse().map_err(|_| format!("bad exponent in '{s}'"))?;
            Norm::from_exponent(p)
                .map(MetricArg::Norm)
                .map_err(|e| e.to_string())
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "radsum",
    version,
    about = "Maximum radius sum of nonoverlapping balls and minimum cycle covers"
)]
pub struct RunConfig {
    /// Input file, or '-' for standard input. Points are one per line,
    /// coordinates separated by whitespace; a matrix file has the point
    /// count on its first line and then one row per line. '#' starts a
    /// comment.
    pub input: String,
    #[arg(long, value_enum, default_value_t = Mode::Radii)]
    pub mode: Mode,
    /// l2, l1, linf, lp:<p> or matrix.
    #[arg(long, value_parser = parse_metric, default_value = "l2")]
    pub metric: MetricArg,
    #[arg(long, value_enum, default_value_t = Accel::Auto)]
    pub accel: Accel,
    /// Lower bound on every radius (radii mode only).
    #[arg(long)]
    pub min_radius: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub out: Option<String>,
    /// Seed for the geometric solver's separator sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Re-verify the result with the independent checks; exit 4 on failure.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::RadiusTooLarge { .. } => EXIT_INFEASIBLE,
            Error::Empty
            | Error::DimensionMismatch { .. }
            | Error::NotSquare { .. }
            | Error::NonFinite(..)
            | Error::Asymmetric { .. }
            | Error::NegativeEntry { .. }
            | Error::NonzeroDiagonal { .. }
            | Error::TriangleViolation { .. }
            | Error::InvalidNorm(_)
            | Error::TooFewPoints { .. }
            | Error::NotCoordinates
            | Error::InvalidRadius(_)
            | Error::Parse { .. } => EXIT_INPUT,
            _ => EXIT_INTERNAL,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// Which solver produced the radii.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    General,
    Geometric,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::General => "general",
            Engine::Geometric => "geometric",
        }
    }
}

#[derive(Debug, Clone)]
pub struct StarPart {
    pub hub: Vec<f64>,
    pub total: f64,
    pub diameter: f64,
    pub negative_hubs: Vec<usize>,
}

/// A solved run, ready to print.
#[derive(Debug, Clone)]
pub struct Solution {
    pub mode: Mode,
    pub engine: Engine,
    pub points: Option<Vec<Vec<f64>>>,
    /// Radii in the instance the cover lives in: the input for plain runs,
    /// the transformed metric for `--min-radius` and star mode.
    pub assignment: BallAssignment,
    /// Final radii for `--min-radius` (inner radii plus the bound).
    pub radii: Vec<f64>,
    pub value: f64,
    pub min_radius: Option<f64>,
    pub star: Option<StarPart>,
    pub certificate: &'static str,
}

pub fn load_instance(text: &str, metric: MetricArg) -> Result<MetricInstance, CliError> {
    let inst = match metric {
        MetricArg::Matrix => MetricInstance::from_matrix(&parse_matrix(text)?)?,
        MetricArg::Norm(norm) => MetricInstance::from_points(&parse_points(text)?, norm)?,
    };
    Ok(inst)
}

fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.min_radius.is_some() && cfg.mode != Mode::Radii {
        return Err(CliError::input("--min-radius requires --mode radii"));
    }
    let general_only = cfg.mode == Mode::Star || cfg.min_radius.is_some();
    if cfg.accel == Accel::Geometric {
        if cfg.metric == MetricArg::Matrix {
            return Err(CliError::input("--accel geometric needs coordinate input"));
        }
        if general_only {
            return Err(CliError::input(
                "--accel geometric is not available with --mode star or --min-radius",
            ));
        }
    }
    if cfg.format == Format::Svg && cfg.mode == Mode::Star {
        return Err(CliError::input(
            "--format svg supports radii and cover modes only",
        ));
    }
    Ok(())
}

/// Solves the configured problem on `inst`.
pub fn solve(cfg: &RunConfig, inst: &MetricInstance) -> Result<Solution, CliError> {
    validate(cfg)?;
    let points = inst.points();
    if cfg.format == Format::Svg && inst.dim() != Some(2) {
        return Err(CliError::input("--format svg needs two-dimensional points"));
    }
    let certify = |inst: &MetricInstance, radii: &[f64]| {
        check_optimality_certificate(inst, radii).verdict.as_str()
    };
    if cfg.mode == Mode::Star {
        let s = star_embedding(inst)?;
        let certificate = certify(&s.transformed, &s.inner.radii);
        return Ok(Solution {
            mode: cfg.mode,
            engine: Engine::General,
            points,
            radii: s.inner.radii.clone(),
            value: s.inner.value,
            assignment: s.inner,
            min_radius: None,
            star: Some(StarPart {
                hub: s.hub,
                total: s.total,
                diameter: s.diameter,
                negative_hubs: s.negative_hubs,
            }),
            certificate,
        });
    }
    if let Some(delta) = cfg.min_radius {
        let s = lower_bounded_radii(inst, delta)?;
        let certificate = certify(&s.transformed, &s.inner.radii);
        return Ok(Solution {
            mode: cfg.mode,
            engine: Engine::General,
            points,
            radii: s.radii,
            value: s.value,
            assignment: s.inner,
            min_radius: Some(delta),
            star: None,
            certificate,
        });
    }
    let engine = match cfg.accel {
        Accel::General => Engine::General,
        Accel::Geometric => Engine::Geometric,
        Accel::Auto if inst.is_coordinates() && inst.len() >= AUTO_GEOMETRIC_MIN_POINTS => {
            Engine::Geometric
        }
        Accel::Auto => Engine::General,
    };
    let assignment = match engine {
        Engine::General => solve_general(inst)?,
        Engine::Geometric => {
            let opts = GeometricOptions {
                seed: cfg.seed,
                ..GeometricOptions::default()
            };
            solve_euclidean_with(inst, &opts)?
        }
    };
    Ok(Solution {
        mode: cfg.mode,
        engine,
        points,
        radii: assignment.radii.clone(),
        value: assignment.value,
        certificate: certify(inst, &assignment.radii),
        assignment,
        min_radius: None,
        star: None,
    })
}

/// Independent re-verification behind `--check`. Returns the list of
/// failed checks.
pub fn verify(inst: &MetricInstance, sol: &Solution) -> Vec<String> {
    let mut failures = Vec::new();
    let slack = |base: &MetricInstance, radii: &[f64], cover: &CycleCover| {
        let mut failures = Vec::new();
        let r = lp_slack_report(base, radii, cover);
        if !r.feasible {
            failures.push("radii overlap or are negative".to_string());
        }
        if r.max_gap > r.tolerance {
            failures.push(format!("cover edge not tight (gap {})", r.max_gap));
        }
        if r.value_mismatch {
            failures.push(format!(
                "radius sum {} differs from half the cover weight {}",
                r.value, r.half_cover_weight
            ));
        }
        failures
    };
    match (&sol.star, sol.min_radius) {
        (Some(star), _) => {
            let t = star_transformed(inst, star.diameter);
            failures.extend(slack(&t, &sol.assignment.radii, &sol.assignment.cover));
            let eps = tolerance::feasibility(star.diameter);
            let n = inst.len();
            for i in 0..n {
                for j in i + 1..n {
                    if star.hub[i] + star.hub[j] < inst.dist(i, j) - eps {
                        failures.push(format!("hub distances contract pair {i}-{j}"));
                    }
                }
                if star.hub[i] > star.diameter + eps {
                    failures.push(format!("hub distance {i} exceeds the diameter"));
                }
            }
        }
        (None, Some(delta)) => {
            let report = check_feasible(inst, &sol.radii);
            if !report.feasible {
                failures.push("radii overlap in the input metric".to_string());
            }
            if sol.radii.iter().any(|&r| r < delta - report.tolerance) {
                failures.push(format!("a radius is below the bound {delta}"));
            }
            if let Ok(s) = lower_bounded_radii(inst, delta) {
                failures.extend(slack(
                    &s.transformed,
                    &sol.assignment.radii,
                    &sol.assignment.cover,
                ));
            }
        }
        (None, None) => failures.extend(slack(inst, &sol.radii, &sol.assignment.cover)),
    }
    failures
}

fn star_transformed(inst: &MetricInstance, diameter: f64) -> MetricInstance {
    let n = inst.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        2.0 * diameter - inst.dist(i, j)
                    }
                })
                .collect()
        })
        .collect();
    MetricInstance::from_matrix(&rows).expect("flipped metric is a metric")
}

pub fn render(cfg: &RunConfig, sol: &Solution) -> Result<String, CliError> {
    match cfg.format {
        Format::Text => Ok(text::render_text(sol)),
        Format::Json => Ok(json::emit_json(sol)),
        Format::Svg => {
            let points = sol
                .points
                .as_ref()
                .ok_or_else(|| CliError::input("--format svg needs coordinate input"))?;
            svg::render_svg(points, &sol.radii, &sol.assignment.cover).map_err(CliError::input)
        }
    }
}

/// Parses, solves, optionally checks and renders.
pub fn execute(cfg: &RunConfig, input: &str) -> Result<String, CliError> {
    let inst = load_instance(input, cfg.metric)?;
    let sol = solve(cfg, &inst)?;
    if cfg.check {
        let failures = verify(&inst, &sol);
        if !failures.is_empty() {
            return Err(CliError {
                code: EXIT_CHECK_FAILED,
                message: format!("check failed: {}", failures.join("; ")),
            });
        }
    }
    render(cfg, &sol)
}

/// Entry point shared by the binary and the tests. Returns the exit code.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let input = if cfg.input == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map(|_| s)
    } else {
        std::fs::read_to_string(&cfg.input)
    };
    let input = match input {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(stderr, "radsum: cannot read {}: {e}", cfg.input);
            return EXIT_INPUT;
        }
    };
    let output = match execute(&cfg, &input) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(stderr, "radsum: {}", e.message);
            return e.code;
        }
    };
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, output.as_bytes()),
        None => stdout.write_all(output.as_bytes()),
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "radsum: cannot write output: {e}");
            EXIT_INTERNAL
        }
    }
}
