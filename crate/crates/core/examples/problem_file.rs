//! Runs the command-line pipeline on a problem file and prints a summary of
//! the JSON report. Defaults to the figure-eight problem.
//!
//!     cargo run --release --example problem_file -- examples/problems/cubic.json

use std::path::PathBuf;

use curvecert::cli::{execute, parse_problem, Command, RunArgs};

fn main() -> curvecert::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/problems/figure_eight.json"));
    let problem = parse_problem(&path)?;
    println!("{}", problem.to_json());

    let args = RunArgs {
        problem: path,
        rho: None,
        tau: None,
        step: None,
        radius: None,
        svg: None,
        json: None,
        max_precision: None,
    };
    let command = if problem.projection.is_some() { Command::Project(args) } else { Command::Track(args) };
    let out = execute(&command)?;
    let r = &out.report;
    println!(
        "{}: {} tubes, {}, {} iterations, rho {}",
        r.command,
        r.tubes.len(),
        r.closure,
        r.metadata.iterations,
        r.metadata.rho
    );
    if let Some(crossings) = &r.crossings {
        for c in crossings {
            println!("crossing in {:?}", c.bounds);
        }
    }
    if let Some(t) = r.tubes.first() {
        println!("first tube: {:?}", t.bounds);
    }
    Ok(())
}
