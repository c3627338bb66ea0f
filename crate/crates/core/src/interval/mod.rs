//! Outward-rounded interval arithmetic over arbitrary-precision binary floats.
//!
//! Every operation returns an interval that contains the exact image of its
//! operands: lower endpoints are rounded toward `-inf`, upper endpoints toward
//! `+inf`. Results carry the larger of the operand precisions.

mod matrix;
mod svd;
mod vector;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::{Float, Rational};

use crate::error::{Error, Result};

pub use matrix::{verified_inverse, IntervalMatrix, VerifiedInverse};
pub use svd::{enclose_svd, SvdEnclosure};
pub use vector::{intersecting_pairs, IntervalVector};

/// Working precision in bits. Valid values form the ladder 64, 128, ..., 4096.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision(u32);

impl Precision {
    pub const MIN: Precision = Precision(64);
    pub const MAX: Precision = Precision(4096);

    pub fn new(bits: u32) -> Result<Self> {
        if bits.is_power_of_two() && (64..=4096).contains(&bits) {
            Ok(Precision(bits))
        } else {
            Err(Error::InvalidPrecision(bits))
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Next rung of the ladder, or `None` at the cap.
    pub fn escalate(self) -> Option<Precision> {
        (self.0 < Self::MAX.0).then(|| Precision(self.0 * 2))
    }

    /// Tolerated non-unitarity of the frames computed at this precision: 2^(-p/2).
    pub fn unitary_tolerance(self) -> Float {
        Float::with_val(self.0, 1) >> (self.0 / 2)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::MIN
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

pub(crate) fn round_to(prec: u32, value: &Float, round: Round) -> Float {
    Float::with_val_round(prec, value, round).0
}

fn mul_round(prec: u32, a: &Float, b: &Float, round: Round) -> Float {
    // 0 * inf is taken as 0, the usual convention for interval endpoints.
    if a.is_zero() || b.is_zero() {
        return Float::with_val(prec, 0);
    }
    Float::with_val_round(prec, a * b, round).0
}

fn min_f(a: Float, b: Float) -> Float {
    if a <= b {
        a
    } else {
        b
    }
}

fn max_f(a: Float, b: Float) -> Float {
    if a >= b {
        a
    } else {
        b
    }
}

/// Closed interval `[lo, hi]` with binary floating-point endpoints.
#[derive(Clone, PartialEq)]
pub struct Interval {
    lo: Float,
    hi: Float,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo.to_f64(), self.hi.to_f64())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Interval {
    pub fn new(lo: Float, hi: Float) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidParameter(format!(
                "interval endpoints out of order: [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    /// Builds from endpoints known to be ordered.
    pub(crate) fn from_sorted(lo: Float, hi: Float) -> Self {
        debug_assert!(lo <= hi, "unordered endpoints {lo} > {hi}");
        Interval { lo, hi }
    }

    pub fn point(x: Float) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn zero(prec: Precision) -> Self {
        Self::point(Float::with_val(prec.bits(), 0))
    }

    pub fn one(prec: Precision) -> Self {
        Self::point(Float::with_val(prec.bits(), 1))
    }

    /// The unit interval `[-1, 1]`.
    pub fn unit(prec: Precision) -> Self {
        Interval {
            lo: Float::with_val(prec.bits(), -1),
            hi: Float::with_val(prec.bits(), 1),
        }
    }

    /// `[-r, r]` for `r >= 0`.
    pub fn symmetric(r: &Float) -> Self {
        let r = r.clone().abs();
        Interval { lo: -r.clone(), hi: r }
    }

    pub fn from_int(value: i64, prec: Precision) -> Self {
        Self::point(Float::with_val(prec.bits(), value))
    }

    /// Exact for every finite `f64` once `prec >= 53`.
    pub fn from_f64(value: f64, prec: Precision) -> Self {
        let lo = Float::with_val_round(prec.bits(), value, Round::Down).0;
        let hi = Float::with_val_round(prec.bits(), value, Round::Up).0;
        Interval { lo, hi }
    }

    /// Outward enclosure of a rational number: `lo <= q <= hi`.
    pub fn from_rational(q: &Rational, prec: Precision) -> Self {
        let lo = Float::with_val_round(prec.bits(), q, Round::Down).0;
        let hi = Float::with_val_round(prec.bits(), q, Round::Up).0;
        Interval { lo, hi }
    }

    /// Enclosure of pi.
    pub fn pi(prec: Precision) -> Self {
        Interval {
            lo: Float::with_val_round(prec.bits(), Constant::Pi, Round::Down).0,
            hi: Float::with_val_round(prec.bits(), Constant::Pi, Round::Up).0,
        }
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    pub fn precision(&self) -> Precision {
        Precision(self.prec().next_power_of_two().clamp(64, 4096))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Midpoint rounded to nearest.
    pub fn mid(&self) -> Float {
        if self.is_point() {
            return self.lo.clone();
        }
        let prec = self.prec();
        if self.lo.is_infinite() || self.hi.is_infinite() {
            return Float::with_val(prec, 0);
        }
        let sum = Float::with_val(prec + 1, &self.lo + &self.hi);
        Float::with_val(prec, sum >> 1)
    }

    /// Upper bound on `hi - lo`.
    pub fn width(&self) -> Float {
        Float::with_val_round(self.prec(), &self.hi - &self.lo, Round::Up).0
    }

    /// Upper bound on the distance from `mid()` to either endpoint.
    pub fn rad(&self) -> Float {
        let m = self.mid();
        let prec = self.prec();
        let a = Float::with_val_round(prec, &m - &self.lo, Round::Up).0;
        let b = Float::with_val_round(prec, &self.hi - &m, Round::Up).0;
        max_f(a, b)
    }

    /// Magnitude `max |x|` over the interval.
    pub fn mag(&self) -> Float {
        max_f(self.lo.clone().abs(), self.hi.clone().abs())
    }

    /// Mignitude `min |x|` over the interval.
    pub fn mig(&self) -> Float {
        if self.contains_zero() {
            Float::with_val(self.prec(), 0)
        } else {
            min_f(self.lo.clone().abs(), self.hi.clone().abs())
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0 && self.hi >= 0
    }

    pub fn contains(&self, x: &Float) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        self.lo <= *q && self.hi >= *q
    }

    pub fn is_subset(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn is_interior_subset(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        if !self.intersects(other) {
            return None;
        }
        Some(Interval {
            lo: max_f(self.lo.clone(), other.lo.clone()),
            hi: min_f(self.hi.clone(), other.hi.clone()),
        })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: min_f(self.lo.clone(), other.lo.clone()),
            hi: max_f(self.hi.clone(), other.hi.clone()),
        }
    }

    /// Re-rounds the endpoints outward to `prec` bits.
    pub fn with_precision(&self, prec: Precision) -> Interval {
        Interval {
            lo: round_to(prec.bits(), &self.lo, Round::Down),
            hi: round_to(prec.bits(), &self.hi, Round::Up),
        }
    }

    pub fn abs(&self) -> Interval {
        if self.lo >= 0 {
            self.clone()
        } else if self.hi <= 0 {
            -self
        } else {
            Interval {
                lo: Float::with_val(self.prec(), 0),
                hi: self.mag(),
            }
        }
    }

    /// Exact multiplication by `2^k`.
    pub fn scale_pow2(&self, k: i32) -> Interval {
        if k >= 0 {
            Interval {
                lo: self.lo.clone() << k,
                hi: self.hi.clone() << k,
            }
        } else {
            Interval {
                lo: self.lo.clone() >> (-k),
                hi: self.hi.clone() >> (-k),
            }
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        let prec = self.prec().max(other.prec());
        Interval {
            lo: Float::with_val_round(prec, &self.lo + &other.lo, Round::Down).0,
            hi: Float::with_val_round(prec, &self.hi + &other.hi, Round::Up).0,
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        let prec = self.prec().max(other.prec());
        Interval {
            lo: Float::with_val_round(prec, &self.lo - &other.hi, Round::Down).0,
            hi: Float::with_val_round(prec, &self.hi - &other.lo, Round::Up).0,
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let prec = self.prec().max(other.prec());
        let (a, b, c, d) = (&self.lo, &self.hi, &other.lo, &other.hi);
        // Sign-case dispatch keeps the common cases to two products.
        if *a >= 0 {
            if *c >= 0 {
                return Interval {
                    lo: mul_round(prec, a, c, Round::Down),
                    hi: mul_round(prec, b, d, Round::Up),
                };
            }
            if *d <= 0 {
                return Interval {
                    lo: mul_round(prec, b, c, Round::Down),
                    hi: mul_round(prec, a, d, Round::Up),
                };
            }
            return Interval {
                lo: mul_round(prec, b, c, Round::Down),
                hi: mul_round(prec, b, d, Round::Up),
            };
        }
        if *b <= 0 {
            if *c >= 0 {
                return Interval {
                    lo: mul_round(prec, a, d, Round::Down),
                    hi: mul_round(prec, b, c, Round::Up),
                };
            }
            if *d <= 0 {
                return Interval {
                    lo: mul_round(prec, b, d, Round::Down),
                    hi: mul_round(prec, a, c, Round::Up),
                };
            }
            return Interval {
                lo: mul_round(prec, a, d, Round::Down),
                hi: mul_round(prec, a, c, Round::Up),
            };
        }
        // self straddles zero
        if *c >= 0 {
            return Interval {
                lo: mul_round(prec, a, d, Round::Down),
                hi: mul_round(prec, b, d, Round::Up),
            };
        }
        if *d <= 0 {
            return Interval {
                lo: mul_round(prec, b, c, Round::Down),
                hi: mul_round(prec, a, c, Round::Up),
            };
        }
        let lo = min_f(
            mul_round(prec, a, d, Round::Down),
            mul_round(prec, b, c, Round::Down),
        );
        let hi = max_f(
            mul_round(prec, a, c, Round::Up),
            mul_round(prec, b, d, Round::Up),
        );
        Interval { lo, hi }
    }

    /// Tight square: never negative.
    pub fn sqr(&self) -> Interval {
        let prec = self.prec();
        let m = self.mig();
        let big = self.mag();
        Interval {
            lo: mul_round(prec, &m, &m, Round::Down),
            hi: mul_round(prec, &big, &big, Round::Up),
        }
    }

    /// Integer power with the tight range for even exponents.
    pub fn powi(&self, exp: u32) -> Interval {
        match exp {
            0 => Interval::point(Float::with_val(self.prec(), 1)),
            1 => self.clone(),
            2 => self.sqr(),
            _ => {
                let prec = self.prec();
                if exp.is_multiple_of(2) {
                    let m = self.mig();
                    let big = self.mag();
                    Interval {
                        lo: Float::with_val_round(prec, (&m).pow(exp), Round::Down).0,
                        hi: Float::with_val_round(prec, (&big).pow(exp), Round::Up).0,
                    }
                } else {
                    // odd powers are monotone
                    let lo = Float::with_val_round(prec, (&self.lo).pow(exp), Round::Down).0;
                    let hi = Float::with_val_round(prec, (&self.hi).pow(exp), Round::Up).0;
                    Interval { lo, hi }
                }
            }
        }
    }

    pub fn recip(&self) -> Result<Interval> {
        if self.contains_zero() {
            return Err(Error::DivisionByIntervalContainingZero);
        }
        let prec = self.prec();
        Ok(Interval {
            lo: Float::with_val_round(prec, 1 / &self.hi, Round::Down).0,
            hi: Float::with_val_round(prec, 1 / &self.lo, Round::Up).0,
        })
    }

    pub fn checked_div(&self, other: &Interval) -> Result<Interval> {
        if other.contains_zero() {
            return Err(Error::DivisionByIntervalContainingZero);
        }
        let prec = self.prec().max(other.prec());
        let (a, b, c, d) = (&self.lo, &self.hi, &other.lo, &other.hi);
        let q = |x: &Float, y: &Float, r: Round| Float::with_val_round(prec, x / y, r).0;
        let lo = min_f(
            min_f(q(a, c, Round::Down), q(a, d, Round::Down)),
            min_f(q(b, c, Round::Down), q(b, d, Round::Down)),
        );
        let hi = max_f(
            max_f(q(a, c, Round::Up), q(a, d, Round::Up)),
            max_f(q(b, c, Round::Up), q(b, d, Round::Up)),
        );
        Ok(Interval { lo, hi })
    }

    /// Enclosure of the square root; requires `lo >= 0`.
    pub fn sqrt(&self) -> Result<Interval> {
        if self.lo < 0 {
            return Err(Error::InvalidParameter("square root of a negative interval".into()));
        }
        let prec = self.prec();
        Ok(Interval {
            lo: Float::with_val_round(prec, self.lo.sqrt_ref(), Round::Down).0,
            hi: Float::with_val_round(prec, self.hi.sqrt_ref(), Round::Up).0,
        })
    }

    /// Adds `[-eps, eps]`.
    pub fn inflate(&self, eps: &Float) -> Interval {
        self.add(&Interval::symmetric(eps))
    }

    /// Compares endpoints of non-overlapping intervals; `None` if they overlap.
    pub fn certainly_cmp(&self, other: &Interval) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.is_point() && other.is_point() && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Interval> for &Interval {
            type Output = Interval;
            fn $method(self, rhs: &Interval) -> Interval {
                Interval::$method(self, rhs)
            }
        }
        impl $trait<Interval> for Interval {
            type Output = Interval;
            fn $method(self, rhs: Interval) -> Interval {
                Interval::$method(&self, &rhs)
            }
        }
        impl $trait<&Interval> for Interval {
            type Output = Interval;
            fn $method(self, rhs: &Interval) -> Interval {
                Interval::$method(&self, rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

/// Max-norm upper bounds: magnitude for intervals, max entry magnitude for
/// vectors, and the row-sum bound of the induced max-norm for matrices.
pub trait MagNorm {
    fn mag_norm(&self) -> Float;
}

impl MagNorm for Interval {
    fn mag_norm(&self) -> Float {
        self.mag()
    }
}
