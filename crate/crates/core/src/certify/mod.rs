//! Krawczyk certification of approximate solutions on coordinate slices.

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::interval::{verified_inverse, Interval, IntervalMatrix, IntervalVector, MagNorm};
use crate::polysys::{CurveMap, SlicedSystem};

/// Result of one Krawczyk evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct KrawczykOutcome {
    /// Rigorous upper bound on `||K||`.
    pub norm: Float,
    /// `norm < rho`.
    pub passed: bool,
}

/// The Krawczyk operator
/// `K = -(1/r) A F(x) + (I - A JF(x + rB)) B`
/// for a square map `F`. `x` may be a box; the result encloses `K` for every
/// point of it.
pub fn krawczyk_operator(
    f: &dyn CurveMap,
    x: &IntervalVector,
    r: &Rational,
    a: &IntervalMatrix,
) -> Result<IntervalVector> {
    let n = f.nvars();
    if f.neqs() != n {
        return Err(Error::ShapeMismatch {
            expected: "square system".into(),
            found: format!("{} equations in {} variables", f.neqs(), n),
        });
    }
    if *r <= 0 {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    let prec = f.precision().max(x.precision());
    let r_iv = Interval::from_rational(r, prec);
    let inv_r = Interval::from_rational(&Rational::from(r.recip_ref()), prec);
    let fx = f.eval(x)?;
    let first = a.mul_vec(&fx)?.scale(&-inv_r);
    let ball: IntervalVector = x
        .iter()
        .map(|xi| xi + &(&r_iv * &Interval::unit(prec)))
        .collect();
    let j = f.jacobian(&ball)?;
    let second = IntervalMatrix::identity(n, prec).sub(&a.mul(&j)?)?.mul_unit_box();
    first.add(&second)
}

/// Algorithm 1: `||K|| < rho`.
pub fn krawczyk_test(
    f: &dyn CurveMap,
    x: &IntervalVector,
    r: &Rational,
    a: &IntervalMatrix,
    rho: &Rational,
) -> Result<KrawczykOutcome> {
    let norm = krawczyk_operator(f, x, r, a)?.mag_norm();
    let passed = norm.is_finite() && norm < *rho;
    Ok(KrawczykOutcome { norm, passed })
}

/// A `rho`-approximate solution on a whole slice of levels.
///
/// For every level `a` in `slice`, the square system `C_a` has a unique root
/// in `center + radius * B` within `rho * radius` of `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// `x_{-n}`; a point or a box.
    pub center: IntervalVector,
    /// Values of the last coordinate covered.
    pub slice: Interval,
    pub radius: Rational,
    pub a: IntervalMatrix,
    pub rho: Rational,
}

impl Certificate {
    /// Full point `(mid(center), mid(slice))`.
    pub fn point(&self) -> Vec<Float> {
        let mut p = self.center.midpoint();
        p.push(self.slice.mid());
        p
    }

    /// Re-runs the Krawczyk test on the stored data.
    pub fn verify(&self, map: &dyn CurveMap) -> Result<KrawczykOutcome> {
        self.verify_at(map, &self.rho)
    }

    pub fn verify_at(&self, map: &dyn CurveMap, rho: &Rational) -> Result<KrawczykOutcome> {
        let sliced = SlicedSystem::new(map, self.slice.clone());
        krawczyk_test(&sliced, &self.center, &self.radius, &self.a, rho)
    }

    /// Box `center + radius * B` in the first `n-1` coordinates.
    pub fn ball(&self) -> IntervalVector {
        let prec = self.center.precision();
        let r = Interval::from_rational(&self.radius, prec);
        self.center.iter().map(|c| c + &(&r * &Interval::unit(prec))).collect()
    }
}

/// True iff the certificate's data pass the Krawczyk test over the whole
/// `slice` at once.
pub fn certificate_interval_extend(
    map: &dyn CurveMap,
    cert: &Certificate,
    slice: &Interval,
) -> Result<bool> {
    let sliced = SlicedSystem::new(map, slice.clone());
    Ok(krawczyk_test(&sliced, &cert.center, &cert.radius, &cert.a, &cert.rho)?.passed)
}

/// Per-loop iteration cap in [`refine_solution`].
pub const REFINE_LOOP_CAP: usize = 1000;

/// Enclosure of the inverse Jacobian of `C_level` at `x`.
pub fn slice_inverse(map: &dyn CurveMap, x: &IntervalVector, level: &Interval) -> Result<IntervalMatrix> {
    let sliced = SlicedSystem::new(map, level.clone());
    let j = sliced.jacobian(x)?;
    Ok(verified_inverse(&j)?.inverse)
}

/// Algorithm 3. Returns a `tau`-approximate certificate valid over the
/// returned slice. The radius is first shrunk, with quasi-Newton updates of
/// the center, until the slice test passes; then it is doubled while the
/// test still passes at twice the radius.
pub fn refine_solution(map: &dyn CurveMap, cert: &Certificate, tau: &Rational) -> Result<Certificate> {
    if *tau <= 0 || *tau >= 1 {
        return Err(Error::InvalidParameter(format!("tau = {tau} outside (0, 1)")));
    }
    let prec = map.precision();
    let bits = prec.bits();
    let level = Interval::point(cert.slice.mid());
    let mut x = cert.center.mid_vector().with_precision(prec);
    let mut r = cert.radius.clone();
    let mut a = cert.a.clone();
    let rho = cert.rho.clone();
    let contraction = Rational::from(1 - &rho) * tau / 8u32;
    let floor = Rational::from(1) >> (bits.saturating_sub(20));

    let slice_at = |r: &Rational| {
        let half = Interval::from_rational(r, prec);
        &level + &(&half * &Interval::unit(prec))
    };

    let mut iterations = 0;
    loop {
        if krawczyk_test(&SlicedSystem::new(map, slice_at(&r)), &x, &r, &a, tau)?.passed {
            break;
        }
        iterations += 1;
        if iterations > REFINE_LOOP_CAP || r < floor {
            return Err(Error::PrecisionNeeded {
                bits,
                reason: format!("refinement stalled at radius {}", r.to_f64()),
            });
        }
        let point_slice = SlicedSystem::new(map, level.clone());
        let step = a.mul_vec(&point_slice.eval(&x)?)?;
        let step_norm = step.mag_norm();
        if step_norm.is_finite() && step_norm <= Rational::from(&contraction * &r) {
            r >>= 1u32;
        } else {
            x = x.sub(&step)?.mid_vector();
        }
        match slice_inverse(map, &x, &level) {
            Ok(inv) => a = inv,
            Err(Error::SingularMidpoint) => r >>= 1u32,
            Err(e) => return Err(e),
        }
    }

    let mut slice = slice_at(&r);
    loop {
        let doubled = Rational::from(&r * 2u32);
        if doubled > 1 {
            break;
        }
        let trial = SlicedSystem::new(map, slice_at(&r));
        if !krawczyk_test(&trial, &x, &doubled, &a, tau)?.passed {
            break;
        }
        slice = slice_at(&r);
        r = doubled;
    }

    Ok(Certificate {
        center: x,
        slice,
        radius: r,
        a,
        rho: tau.clone(),
    })
}

/// Builds a starting certificate at a point `x` (all `n` coordinates) with
/// the inverse slice Jacobian as `A`, without testing it.
pub fn initial_certificate(
    map: &dyn CurveMap,
    x: &[Float],
    radius: &Rational,
    rho: &Rational,
) -> Result<Certificate> {
    let n = x.len();
    if n != map.nvars() {
        return Err(Error::DimensionMismatch {
            expected: map.nvars(),
            found: n,
        });
    }
    let prec = map.precision();
    let center = IntervalVector::from_points(&x[..n - 1]).with_precision(prec);
    let level = Interval::point(x[n - 1].clone()).with_precision(prec);
    let a = slice_inverse(map, &center, &level)?;
    Ok(Certificate {
        center,
        slice: level,
        radius: radius.clone(),
        a,
        rho: rho.clone(),
    })
}
