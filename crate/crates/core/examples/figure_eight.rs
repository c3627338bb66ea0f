//! A space curve whose projection to the `(y, z)` plane is a figure eight:
//! `(cos t, sin t, sin 2t)`. The single crossing at the origin is certified.

use curvecert::polysys::PolySystem;
use curvecert::projection::{certified_plane_curve, ProjectionMap};
use curvecert::tracker::{Domain, TrackParams};
use rug::{Float, Rational};

fn main() -> curvecert::Result<()> {
    let system = PolySystem::parse(&["x^2 + y^2 - 1", "z - 2*x*y"], &["x", "y", "z"])?;
    let start = [Rational::from(1), Rational::from(0), Rational::from(0)];
    let m = ProjectionMap::coordinates(3, 1, 2)?;
    let (nbhd, report) = certified_plane_curve(&system, &start, &Domain::cube(3, 2)?, &m, &TrackParams::default())?;

    println!("{} tubes, {}; {} crossing(s)", nbhd.len(), nbhd.closure(), report.crossings.len());
    let origin = [Float::with_val(64, 0), Float::with_val(64, 0)];
    for c in &report.crossings {
        let r = &c.rectangles;
        println!("  enclosure {}", c.enclosure.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" x "));
        println!("  contains the origin: {}", c.enclosure.contains_point(&origin));
        println!("  rectangle half width {:.4}, half length {:.4}", r.r.to_f64(), r.rectangles[0].half_length.to_f64());
        println!("  branches through tubes {:?} and {:?}", c.tubes[0], c.tubes[1]);
    }
    println!(
        "{} pairs excluded, {} checks refined, {} segments re-tracked",
        report.excluded.len(),
        report.not_confirmed,
        report.refinements
    );
    Ok(())
}
