//! The space quintic `x = 13/10 z^3 - z^5, y = z^3 - z` projected to the `(x, y)` plane.
//! With `rho = 1/8` the projected tubes overlap in places and must be refined
//! before every overlap is excluded; with `rho = 1/32` none survive.

use std::time::Instant;

use curvecert::polysys::PolySystem;
use curvecert::projection::{certified_plane_curve, ProjectionMap};
use curvecert::tracker::{Domain, TrackParams};
use rug::Rational;

fn main() -> curvecert::Result<()> {
    let system = PolySystem::parse(&["x + z^5 - 13/10*z^3", "y - z^3 + z"], &["x", "y", "z"])?;
    let start = [Rational::from(0), Rational::from(0), Rational::from(0)];
    let domain = Domain::cube(3, 2)?;
    let m = ProjectionMap::coordinates(3, 0, 1)?;
    for rho in [Rational::from((1, 8)), Rational::from((1, 32))] {
        let params = TrackParams { rho: rho.clone(), ..TrackParams::default() };
        let t = Instant::now();
        let (nbhd, report) = certified_plane_curve(&system, &start, &domain, &m, &params)?;
        println!(
            "rho = {rho}: {} tubes after {} iterations, {} overlapping pairs, {} not confirmed, \
             {} segments refined, {} crossings ({:.2?})",
            nbhd.len(),
            nbhd.stats().iterations,
            report.initial_pairs,
            report.not_confirmed,
            report.refinements,
            report.crossings.len(),
            t.elapsed()
        );
    }
    Ok(())
}
