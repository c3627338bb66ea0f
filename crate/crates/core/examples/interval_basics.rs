//! Outward-rounded interval arithmetic at a few working precisions.

use curvecert::interval::{Interval, IntervalVector, MagNorm, Precision};
use rug::Rational;

fn main() -> curvecert::Result<()> {
    for bits in [64, 256, 1024] {
        let prec = Precision::new(bits)?;
        let third = Interval::from_rational(&Rational::from((1, 3)), prec);
        let sum = &(&third + &third) + &third;
        println!("{bits:>5} bits: 1/3 + 1/3 + 1/3 = {sum} (width {:.3e})", sum.width().to_f64());
    }

    let prec = Precision::MIN;
    let x = Interval::from_f64(-1.0, prec).hull(&Interval::from_f64(2.0, prec));
    println!("x = {x}");
    println!("x * x = {}", x.mul(&x));
    println!("x^2   = {}", x.sqr());
    println!("1 / (x + 3) = {}", x.add(&Interval::from_int(3, prec)).recip()?);
    match x.recip() {
        Ok(_) => unreachable!(),
        Err(e) => println!("1 / x fails: {e}"),
    }

    let v = IntervalVector::from_f64s(&[0.5, -2.0, 1.0], prec);
    println!("|v| = {}", v.mag_norm().to_f64());
    Ok(())
}
