//! Refining a rough guess on the circle into a certified solution. The
//! certificate covers a band of slices `y = 1/20 +- r`, so it exists only
//! where the curve is steep with respect to `y`.

use curvecert::certify::{certificate_interval_extend, initial_certificate, refine_solution};
use curvecert::interval::Precision;
use curvecert::polysys::PolySystem;
use rug::{Float, Rational};

fn main() -> curvecert::Result<()> {
    let p = Precision::MIN;
    let c = PolySystem::parse(&["x^2 + y^2 - 1"], &["x", "y"])?.compile(p);
    let tau = Rational::from((1, 8));
    for guess in [1.2, 0.93, 1.0] {
        let x = [Float::with_val(64, guess), Float::with_val(64, 0.05)];
        let start = initial_certificate(&c, &x, &Rational::from((1, 2)), &Rational::from((1, 2)))?;
        let cert = refine_solution(&c, &start, &tau)?;
        let exact = (1.0f64 - 0.0025).sqrt();
        println!(
            "guess {guess:<5} -> x = {:.12} (error {:.1e}), radius {}, slice width {:.2e}",
            cert.center.to_f64()[0],
            (cert.center.to_f64()[0] - exact).abs(),
            cert.radius,
            cert.slice.width().to_f64()
        );
        assert!(cert.verify(&c)?.passed);
        assert!(certificate_interval_extend(&c, &cert, &cert.slice)?);
    }
    Ok(())
}
