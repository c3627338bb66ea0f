//! Krawczyk tests on small systems, with the exact operator norms they
//! should produce.

use curvecert::certify::krawczyk_test;
use curvecert::interval::{Interval, IntervalMatrix, IntervalVector, Precision};
use curvecert::polysys::{PolySystem, SlicedSystem};
use rug::Rational;

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn main() -> curvecert::Result<()> {
    let p = Precision::MIN;

    // sqrt(2) from x = 3/2 with A = 1/3 and r = 1/5: ||K|| = 11/20.
    let f = PolySystem::parse(&["x^2 - 2"], &["x"])?.compile(p);
    let a = IntervalMatrix::from_rows(vec![vec![Interval::from_rational(&q(1, 3), p)]])?;
    let x = IntervalVector::from_rationals(&[q(3, 2)], p);
    for rho in [q(7, 8), q(1, 2)] {
        let out = krawczyk_test(&f, &x, &q(1, 5), &a, &rho)?;
        println!("x^2 - 2 at 3/2: ||K|| <= {} , rho = {rho}: {}", out.norm, out.passed);
    }

    // The circle sliced at y = 0, from x = 1: ||K|| = 1/10.
    let c = PolySystem::parse(&["x^2 + y^2 - 1"], &["x", "y"])?.compile(p);
    let slice = SlicedSystem::new(&c, Interval::zero(p));
    let a = IntervalMatrix::from_f64(1, 1, &[0.5], p);
    let x = IntervalVector::from_f64s(&[1.0], p);
    let out = krawczyk_test(&slice, &x, &q(1, 10), &a, &q(1, 8))?;
    println!("circle at (1, 0): ||K|| <= {}, passed {}", out.norm, out.passed);

    // A box of levels: one test covers every slice y in [-1/100, 1/100].
    let band = Interval::from_rational(&q(1, 100), p);
    let wide = SlicedSystem::new(&c, band.hull(&-&band));
    let out = krawczyk_test(&wide, &x, &q(1, 10), &a, &q(7, 8))?;
    println!("circle over |y| <= 1/100: ||K|| <= {:.6}, passed {}", out.norm.to_f64(), out.passed);
    Ok(())
}
