//! Certified topology of a plane projection `pi(C)` of a tracked curve.
//!
//! Pairs of tubes whose projections meet are either excluded (the arc between
//! them turns by less than a half turn, so its image is monotone in some
//! direction) or resolved into a certified transverse crossing.

mod check;
mod geometry;
mod pipeline;

use std::cmp::Ordering;

use rug::float::Round;
use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalMatrix, IntervalVector, Precision};
use crate::polysys::kernel_vector;
use crate::tracker::TubularNeighborhood;

pub use check::{intersection_check, CheckOutcome, CrossingRectangles, Rejection};
pub use geometry::Rectangle;
pub use pipeline::{certified_plane_curve, project_neighborhood, Crossing, CrossingReport, ExcludedPair, Exclusion};

/// Linear map `R^n -> R^2` given by a rank-two rational matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMap {
    rows: [Vec<Rational>; 2],
}

impl ProjectionMap {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let [a, b]: [Vec<Rational>; 2] = rows.try_into().map_err(|r: Vec<Vec<Rational>>| Error::ShapeMismatch {
            expected: "2 rows".into(),
            found: format!("{} rows", r.len()),
        })?;
        if a.len() != b.len() || a.len() < 2 {
            return Err(Error::ShapeMismatch {
                expected: "2 x n with n >= 2".into(),
                found: format!("rows of length {} and {}", a.len(), b.len()),
            });
        }
        let n = a.len();
        let full_rank = (0..n).any(|i| {
            (i + 1..n).any(|j| Rational::from(&a[i] * &b[j]) != Rational::from(&a[j] * &b[i]))
        });
        if !full_rank {
            return Err(Error::RankDeficient);
        }
        Ok(ProjectionMap { rows: [a, b] })
    }

    /// Projection onto coordinates `i` and `j` of `R^n`.
    pub fn coordinates(n: usize, i: usize, j: usize) -> Result<Self> {
        if i >= n || j >= n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: i.max(j) + 1,
            });
        }
        let unit = |k: usize| (0..n).map(|c| Rational::from(u32::from(c == k))).collect();
        ProjectionMap::new(vec![unit(i), unit(j)])
    }

    pub fn nvars(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<Rational>; 2] {
        &self.rows
    }

    pub fn matrix(&self, prec: Precision) -> IntervalMatrix {
        IntervalMatrix::from_fn(2, self.nvars(), |i, j| Interval::from_rational(&self.rows[i][j], prec))
    }

    /// Image of a box, or of an interval vector of directions.
    pub fn apply(&self, x: &IntervalVector) -> Result<IntervalVector> {
        if x.len() != self.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.nvars(),
                found: x.len(),
            });
        }
        self.matrix(x.precision()).mul_vec(x)
    }

    pub fn apply_point(&self, x: &[Float]) -> Result<IntervalVector> {
        self.apply(&IntervalVector::from_points(x))
    }
}

/// Rigorous image of `region` under `m`.
///
/// # Panics
/// When the dimensions of `m` and `region` differ.
pub fn project_region(m: &ProjectionMap, region: &IntervalVector) -> IntervalVector {
    m.apply(region).expect("projection and region dimensions agree")
}

/// Arc of directions in the plane: the angles `angle.lo() ..= angle.hi()`
/// with `angle.lo()` in `[0, 2pi)` and a width below `pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentCone {
    pub angle: Interval,
    /// Index of the tube the cone was computed from.
    pub source: usize,
}

impl TangentCone {
    /// Arc spanned by the directions of a planar box.
    pub fn from_directions(d: &IntervalVector, source: usize) -> Result<Self> {
        if d.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: d.len() });
        }
        let (x, y) = (&d[0], &d[1]);
        // Turn the box by a multiple of a quarter turn into the right half plane.
        let (quarter, px, py) = if *x.lo() > 0 {
            (0, x.clone(), y.clone())
        } else if *y.lo() > 0 {
            (1, y.clone(), -x)
        } else if *x.hi() < 0 {
            (2, -x, -y)
        } else if *y.hi() < 0 {
            (3, -y, x.clone())
        } else {
            return Err(Error::ZeroInCone);
        };
        let prec = d.precision().bits();
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for cx in [px.lo(), px.hi()] {
            for cy in [py.lo(), py.hi()] {
                let a = Float::with_val_round(prec, cy.atan2_ref(cx), Round::Down).0;
                let b = Float::with_val_round(prec, cy.atan2_ref(cx), Round::Up).0;
                lo = Some(match lo {
                    Some(l) if l <= a => l,
                    _ => a,
                });
                hi = Some(match hi {
                    Some(h) if h >= b => h,
                    _ => b,
                });
            }
        }
        let p = Precision::new(prec.next_power_of_two().clamp(64, 4096))?;
        let pi = Interval::pi(p);
        let turn = pi.scale_pow2(-1).mul(&Interval::from_int(quarter, p));
        let local = Interval::from_sorted(lo.expect("four corners"), hi.expect("four corners"));
        let mut angle = local.add(&turn);
        if *angle.lo() < 0 {
            angle = angle.add(&pi.scale_pow2(1));
        }
        Ok(TangentCone { angle, source })
    }

    /// Upper bound on the opening angle.
    pub fn width(&self) -> Float {
        self.angle.width()
    }

    /// True unless the cones certainly contain no two parallel directions,
    /// i.e. unless their angles are disjoint modulo `pi`.
    pub fn may_be_parallel(&self, other: &TangentCone) -> bool {
        let prec = self.angle.precision().max(other.angle.precision());
        let pi = Interval::pi(prec);
        let a = &self.angle;
        let b = &other.angle;
        let lower = Interval::point(a.lo().clone())
            .sub(&Interval::point(b.hi().clone()))
            .checked_div(&pi);
        let upper = Interval::point(a.hi().clone())
            .sub(&Interval::point(b.lo().clone()))
            .checked_div(&pi);
        match (lower, upper) {
            (Ok(l), Ok(u)) => Float::with_val(prec.bits(), l.lo().ceil_ref()) <= Float::with_val(prec.bits(), u.hi().floor_ref()),
            _ => true,
        }
    }
}

/// True when the union of the cones certainly lies in an open half plane.
pub fn half_space_condition(cones: &[TangentCone]) -> bool {
    let mut acc = HalfPlane::default();
    !cones.is_empty() && cones.iter().all(|c| acc.push(c))
}

/// Running form of [`half_space_condition`]: angles are measured from the
/// start of the first cone and their spread is kept below `pi`.
#[derive(Debug, Clone, Default)]
pub(crate) struct HalfPlane {
    reference: Option<(Interval, Interval)>,
    lo: Option<Float>,
    hi: Option<Float>,
}

impl HalfPlane {
    /// Adds a cone; false once the union may fail to lie in a half plane.
    pub(crate) fn push(&mut self, c: &TangentCone) -> bool {
        let (reference, pi) = self
            .reference
            .get_or_insert_with(|| (Interval::point(c.angle.lo().clone()), Interval::pi(c.angle.precision())))
            .clone();
        let two_pi = pi.scale_pow2(1);
        let mut off = c.angle.sub(&reference);
        // Representative with its midpoint in [-pi, pi).
        while off.mid() >= pi.mid() {
            off = off.sub(&two_pi);
        }
        while off.mid() < -pi.mid() {
            off = off.add(&two_pi);
        }
        let within = off.certainly_cmp(&-&pi) == Some(Ordering::Greater) && off.certainly_cmp(&pi) == Some(Ordering::Less);
        if !within {
            return false;
        }
        let lo = match self.lo.take() {
            Some(l) if l <= *off.lo() => l,
            _ => off.lo().clone(),
        };
        let hi = match self.hi.take() {
            Some(h) if h >= *off.hi() => h,
            _ => off.hi().clone(),
        };
        let span = Interval::point(hi.clone()).sub(&Interval::point(lo.clone()));
        self.lo = Some(lo);
        self.hi = Some(hi);
        span.certainly_cmp(&pi) == Some(Ordering::Less)
    }
}

/// Cone of projected tangent directions over tube `index`, oriented along
/// the chain.
pub fn tangent_cone(nbhd: &mut TubularNeighborhood, m: &ProjectionMap, index: usize) -> Result<TangentCone> {
    let tube = &nbhd.tubes()[index];
    let prec = tube.precision();
    let region = tube.region.clone();
    let along = IntervalVector::from_points(&tube.chain_tangent());
    let base = nbhd.compiled(prec);
    let j = base.jacobian(&region)?;
    let mut k = kernel_vector(&j)?;
    let dot = k.dot(&along)?;
    match dot.certainly_cmp(&Interval::zero(prec)) {
        Some(Ordering::Greater) => {}
        Some(Ordering::Less) => k = k.scale(&Interval::from_int(-1, prec)),
        _ => return Err(Error::ZeroInCone),
    }
    TangentCone::from_directions(&m.apply(&k)?, index)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    fn bounds(b: &IntervalVector) -> Vec<f64> {
        b.iter().flat_map(|x| [x.lo().to_f64(), x.hi().to_f64()]).collect()
    }

    fn cone_deg(lo: f64, hi: f64) -> TangentCone {
        let p = Precision::MIN;
        let r = std::f64::consts::PI / 180.0;
        let angle = Interval::new(Float::with_val(64, lo * r), Float::with_val(64, hi * r)).unwrap();
        let angle = if *angle.lo() < 0 { angle.add(&Interval::pi(p).scale_pow2(1)) } else { angle };
        TangentCone { angle, source: 0 }
    }

    #[test]
    fn rank_is_checked() {
        assert!(ProjectionMap::new(vec![vec![q(1), q(2)], vec![q(2), q(4)]]).is_err());
        assert!(ProjectionMap::new(vec![vec![q(1), q(0), q(1)], vec![q(0), q(1), q(0)]]).is_ok());
        assert!(ProjectionMap::new(vec![vec![q(1), q(0)]]).is_err());
    }

    #[test]
    fn linear_image_of_a_box() {
        let m = ProjectionMap::new(vec![vec![q(1), q(0), q(1)], vec![q(0), q(1), q(0)]]).unwrap();
        let b = IntervalVector::from_f64s(&[0.0, 0.0, 0.0], Precision::MIN)
            .inflate(&Float::with_val(64, 0.5))
            .add(&IntervalVector::from_f64s(&[0.5, 0.5, 0.5], Precision::MIN))
            .unwrap();
        let img = project_region(&m, &b);
        assert_eq!(bounds(&img), vec![0.0, 2.0, 0.0, 1.0]);
    }

    #[test]
    fn coordinate_projection_and_zero_box() {
        let m = ProjectionMap::coordinates(3, 0, 1).unwrap();
        let img = project_region(&m, &IntervalVector::zeros(3, Precision::MIN));
        assert_eq!(bounds(&img), vec![0.0; 4]);
        let b = IntervalVector::from_f64s(&[1.0, 2.0, 3.0], Precision::MIN);
        assert_eq!(bounds(&project_region(&m, &b)), vec![1.0, 1.0, 2.0, 2.0]);
    }

    #[test]
    fn cone_of_a_box_in_each_quadrant() {
        let p = Precision::MIN;
        let tau = std::f64::consts::TAU;
        for k in 0..16 {
            let t = tau * (k as f64 + 0.5) / 16.0;
            let d = IntervalVector::from_f64s(&[t.cos(), t.sin()], p).inflate(&Float::with_val(64, 0.01));
            let c = TangentCone::from_directions(&d, 0).unwrap();
            assert!(c.angle.contains(&Float::with_val(64, t)), "{t} {:?}", c.angle);
            assert!(c.width() < 0.05);
            assert!(*c.angle.lo() >= 0 && *c.angle.lo() < tau);
        }
        let zero = IntervalVector::zeros(2, p).inflate(&Float::with_val(64, 0.1));
        assert_eq!(TangentCone::from_directions(&zero, 0).unwrap_err(), Error::ZeroInCone);
    }

    #[test]
    fn half_space_examples() {
        assert!(half_space_condition(&[cone_deg(-10.0, 0.0), cone_deg(0.0, 10.0)]));
        assert!(!half_space_condition(&[cone_deg(-1.0, 1.0), cone_deg(179.0, 181.0)]));
        assert!(half_space_condition(&[cone_deg(350.0, 355.0), cone_deg(5.0, 120.0)]));
        assert!(!half_space_condition(&[cone_deg(0.0, 60.0), cone_deg(60.0, 120.0), cone_deg(120.0, 185.0)]));
        assert!(!half_space_condition(&[]));
    }

    #[test]
    fn parallel_modulo_half_turn() {
        assert!(cone_deg(10.0, 20.0).may_be_parallel(&cone_deg(195.0, 200.0)));
        assert!(!cone_deg(10.0, 20.0).may_be_parallel(&cone_deg(100.0, 110.0)));
        assert!(!cone_deg(-5.0, 5.0).may_be_parallel(&cone_deg(170.0, 174.0)));
        assert!(cone_deg(-5.0, 5.0).may_be_parallel(&cone_deg(176.0, 186.0)));
    }
}
