//! Batch front end: problem files in, JSON reports and SVG figures out.
//!
//! Exit codes: 0 on success, 2 when certification could not complete within
//! its budgets, 3 on bad input.

mod problem;
mod report;
mod svg;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::interval::Precision;
use crate::polysys::parse_rational;
use crate::projection::{project_neighborhood, project_region, ProjectionMap};
use crate::tracker::track_curve;

pub use problem::{parse_problem, CurveSpec, ParamOverrides, ProblemFile};
pub use report::{bounds, decimal, CrossingEntry, ErrorReport, Metadata, TubeEntry, TubeReport, DIGITS};
pub use svg::render as render_svg;

#[derive(Debug, Parser)]
#[command(name = "curvecert", version, about = "Certified curve tracking and plane projections")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Track the curve and report its tubes.
    Track(RunArgs),
    /// Track the curve, then certify the crossings of its plane projection.
    Project(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Problem file (JSON).
    pub problem: PathBuf,
    /// Refinement tolerance, e.g. `1/32`.
    #[arg(long)]
    pub rho: Option<String>,
    #[arg(long)]
    pub tau: Option<String>,
    /// Initial step length.
    #[arg(long)]
    pub step: Option<String>,
    /// Initial certification radius.
    #[arg(long)]
    pub radius: Option<String>,
    /// Write an SVG figure here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Highest working precision in bits.
    #[arg(long)]
    pub max_precision: Option<u32>,
}

/// Result of a command: the report and the optional figure.
#[derive(Debug, Clone)]
pub struct Output {
    pub report: TubeReport,
    pub svg: Option<String>,
}

/// Exit code for a failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::StepBudgetExceeded(_)
        | Error::RefinementBudgetExceeded(_)
        | Error::MaxRestarts { .. }
        | Error::PrecisionExhausted { .. }
        | Error::PrecisionNeeded { .. }
        | Error::UncertifiedStart(_)
        | Error::SingularMidpoint
        | Error::TangentVertical
        | Error::AllMinorsDegenerate
        | Error::ZeroInCone
        | Error::DivisionByIntervalContainingZero => 2,
        _ => 3,
    }
}

fn overrides(args: &RunArgs, problem: &ProblemFile) -> Result<ParamOverrides> {
    let mut o = problem.params.clone();
    let set = |slot: &mut Option<rug::Rational>, v: &Option<String>| -> Result<()> {
        if let Some(v) = v {
            *slot = Some(parse_rational(v)?);
        }
        Ok(())
    };
    set(&mut o.rho, &args.rho)?;
    set(&mut o.tau, &args.tau)?;
    set(&mut o.step, &args.step)?;
    set(&mut o.radius, &args.radius)?;
    if args.max_precision.is_some() {
        o.max_precision = args.max_precision;
    }
    Ok(o)
}

/// Runs a command without touching the file system for output.
pub fn execute(command: &Command) -> Result<Output> {
    let (name, args) = match command {
        Command::Track(a) => ("track", a),
        Command::Project(a) => ("project", a),
    };
    let problem = parse_problem(&args.problem)?;
    let params = overrides(args, &problem)?.apply(crate::tracker::TrackParams::default())?;
    let system = problem.system()?;
    let projection = match (name, &problem.projection) {
        (_, Some(m)) => m.clone(),
        ("project", None) => return Err(Error::InvalidParameter("the problem has no projection".into())),
        _ => ProjectionMap::coordinates(system.nvars(), 0, 1)?,
    };
    let started = Instant::now();
    let mut nbhd = track_curve(&system, &problem.start_point, &problem.region, &params)?;
    let crossings = if name == "project" {
        Some(project_neighborhood(&mut nbhd, &projection)?)
    } else {
        None
    };
    let wall = started.elapsed();
    let report = TubeReport::new(
        name,
        problem.lifted_variables(),
        &nbhd,
        crossings.as_ref().map(|c| (&projection, c)),
        wall,
    );
    let svg = args.svg.as_ref().map(|_| {
        let frame = project_region(&projection, &problem.region.to_box(Precision::MIN));
        svg::render(&nbhd, &projection, &frame, crossings.as_ref())
    });
    Ok(Output { report, svg })
}

fn write_file(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Runs a parsed command line, writing the report to `--json` or `stdout`.
/// Returns the process exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> i32 {
    let args = match &cli.command {
        Command::Track(a) | Command::Project(a) => a,
    };
    let emit = |text: String, stdout: &mut dyn Write| -> Result<()> {
        match &args.json {
            Some(path) => write_file(path, &text),
            None => writeln!(stdout, "{text}").map_err(|e| Error::Io(e.to_string())),
        }
    };
    let outcome = execute(&cli.command).and_then(|out| {
        if let (Some(path), Some(svg)) = (&args.svg, &out.svg) {
            write_file(path, svg)?;
        }
        emit(out.report.to_json(), stdout)
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            let body = serde_json::to_string_pretty(&ErrorReport::new(&e)).expect("plain data serializes");
            let _ = emit(body, stdout);
            exit_code(&e)
        }
    }
}

/// Entry point of the binary.
pub fn main() -> i32 {
    let cli = Cli::parse();
    run(&cli, &mut std::io::stdout().lock())
}
