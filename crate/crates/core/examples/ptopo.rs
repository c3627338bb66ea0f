//! The parametric curve `(T^8 - 8T^6 + 20T^4 - 16T^2 + 2, T^7 - 7T^5 + 14T^3 - 7T)`
//! lifted to `R^3` by adding `T` as a coordinate, then projected back to
//! the plane. Its image has 21 transverse crossings.
//!
//! Takes a few tens of seconds in release mode.

use std::time::Instant;

use curvecert::polysys::{parametric_to_implicit, parse_polynomial};
use curvecert::projection::{certified_plane_curve, ProjectionMap};
use curvecert::tracker::{Domain, TrackParams};
use rug::Rational;

fn main() -> curvecert::Result<()> {
    let t = ["T".to_string()];
    let gamma = [
        parse_polynomial("T^8 - 8*T^6 + 20*T^4 - 16*T^2 + 2", &t)?,
        parse_polynomial("T^7 - 7*T^5 + 14*T^3 - 7*T", &t)?,
    ];
    let system = parametric_to_implicit(&gamma)?;
    let start = [Rational::from(2), Rational::from(0), Rational::from(0)];
    let q = |n: i64, d: i64| Rational::from((n, d));
    let domain = Domain::new(vec![q(-3, 1), q(-3, 1), q(-21, 10)], vec![q(3, 1), q(3, 1), q(21, 10)])?;
    let m = ProjectionMap::coordinates(3, 0, 1)?;

    let started = Instant::now();
    let (nbhd, report) = certified_plane_curve(&system, &start, &domain, &m, &TrackParams::default())?;
    println!(
        "{} tubes ({}), {} iterations, {} crossings in {:.1?}",
        nbhd.len(),
        nbhd.closure(),
        nbhd.stats().iterations,
        report.crossings.len(),
        started.elapsed()
    );
    let mut points: Vec<(f64, f64)> = report
        .crossings
        .iter()
        .map(|c| {
            let e = c.enclosure.to_f64();
            (e[0], e[1])
        })
        .collect();
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    for (x, y) in points {
        println!("  ({x:+.5}, {y:+.5})");
    }
    Ok(())
}
