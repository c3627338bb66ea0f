//! Tracks the unit circle and checks the chain it returns.

use curvecert::polysys::PolySystem;
use curvecert::tracker::{track_curve, Domain, TrackParams};
use rug::{Float, Rational};

fn main() -> curvecert::Result<()> {
    let circle = PolySystem::parse(&["x^2 + y^2 - 1"], &["x", "y"])?;
    let start = [Rational::from((3, 5)), Rational::from((4, 5))];
    let mut nbhd = track_curve(&circle, &start, &Domain::cube(2, 2)?, &TrackParams::default())?;

    println!("{} tubes, {}", nbhd.len(), nbhd.closure());
    println!("links inside their tubes: {}", nbhd.check_chain()?);
    println!("every tube re-certifies: {}", nbhd.verify_certificates()?);
    println!("non-adjacent overlap: {:?}", nbhd.find_overlap()?);

    let covered = (0..360)
        .filter(|k| {
            let t = (*k as f64).to_radians();
            nbhd.contains_point(&[Float::with_val(64, t.cos()), Float::with_val(64, t.sin())])
        })
        .count();
    println!("{covered} of 360 sampled circle points lie in the neighborhood");

    for (i, t) in nbhd.tubes().iter().enumerate().step_by(10) {
        println!("tube {i:>3}: {:?}", t.region.to_f64());
    }
    Ok(())
}
