//! A closed degree-eight curve with nearly touching lobes. Tracking needs
//! thousands of tubes; run in release mode.

use std::time::Instant;

use curvecert::polysys::PolySystem;
use curvecert::tracker::{track_curve, Domain, TrackParams};
use rug::Rational;

const CURVE: &str = "x^8 - 1/100*x^6 + 4*x^6*y^2 - 1785/100*x^4*y^2 + 6*x^4*y^4 \
                     + 1185/100*x^2*y^4 + 4*x^2*y^6 - 199/100*y^6 + y^8";

fn main() -> curvecert::Result<()> {
    let system = PolySystem::parse(&[CURVE], &["x", "y"])?;
    let start = [Rational::from(0), Rational::from((14107, 10000))];
    let t = Instant::now();
    let nbhd = track_curve(&system, &start, &Domain::cube(2, 2)?, &TrackParams::default())?;
    let stats = nbhd.stats();
    println!(
        "{} tubes, {}, {} iterations, {} restarts, {}, {:.1?}",
        nbhd.len(),
        nbhd.closure(),
        stats.iterations,
        stats.restarts,
        nbhd.precision(),
        t.elapsed()
    );
    let smallest = nbhd.tubes().iter().map(|t| t.region.diameter().to_f64()).fold(f64::INFINITY, f64::min);
    println!("smallest tube diameter {smallest:.2e}");
    Ok(())
}
