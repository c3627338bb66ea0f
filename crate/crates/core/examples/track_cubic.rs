use std::time::Instant;

use curvecert::polysys::PolySystem;
use curvecert::tracker::{track_curve, Domain, TrackParams};
use rug::Rational;

fn main() -> curvecert::Result<()> {
    let system = PolySystem::parse(&["x^3 - 27/10*x - y^2 + 2"], &["x", "y"])?;
    let start = [Rational::from(1), Rational::from((5477, 10000))];
    let domain = Domain::cube(2, 3)?;
    let t = Instant::now();
    let nbhd = track_curve(&system, &start, &domain, &TrackParams::default())?;
    println!(
        "{} tubes, {}, {} iterations, {:?}, {} restarts, rho = {}, {:.2?}",
        nbhd.len(),
        nbhd.closure(),
        nbhd.stats().iterations,
        nbhd.stats(),
        nbhd.stats().restarts,
        nbhd.rho(),
        t.elapsed()
    );
    Ok(())
}
