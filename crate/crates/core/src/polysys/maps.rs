use std::sync::Arc;

use super::{CompiledSystem, PolySystem};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalMatrix, IntervalVector, Precision};

/// A polynomial map `R^nvars -> R^neqs` with interval evaluation and an
/// interval Jacobian.
pub trait CurveMap: Send + Sync {
    fn nvars(&self) -> usize;
    fn neqs(&self) -> usize;
    fn precision(&self) -> Precision;
    fn eval(&self, x: &IntervalVector) -> Result<IntervalVector>;
    fn jacobian(&self, x: &IntervalVector) -> Result<IntervalMatrix>;
}

impl CurveMap for CompiledSystem {
    fn nvars(&self) -> usize {
        CompiledSystem::nvars(self)
    }
    fn neqs(&self) -> usize {
        CompiledSystem::neqs(self)
    }
    fn precision(&self) -> Precision {
        CompiledSystem::precision(self)
    }
    fn eval(&self, x: &IntervalVector) -> Result<IntervalVector> {
        CompiledSystem::eval(self, x)
    }
    fn jacobian(&self, x: &IntervalVector) -> Result<IntervalMatrix> {
        CompiledSystem::jacobian(self, x)
    }
}

impl CurveMap for PolySystem {
    fn nvars(&self) -> usize {
        PolySystem::nvars(self)
    }
    fn neqs(&self) -> usize {
        self.len()
    }
    fn precision(&self) -> Precision {
        Precision::MIN
    }
    fn eval(&self, x: &IntervalVector) -> Result<IntervalVector> {
        self.eval_interval(x)
    }
    fn jacobian(&self, x: &IntervalVector) -> Result<IntervalMatrix> {
        self.jacobian_interval(x)
    }
}

/// `x_hat -> U^T C(V x_hat)`, evaluated by composition and never expanded.
#[derive(Clone, Debug)]
pub struct RotatedSystem {
    base: Arc<CompiledSystem>,
    u_t: IntervalMatrix,
    v: IntervalMatrix,
}

impl RotatedSystem {
    pub fn new(base: Arc<CompiledSystem>, u: &IntervalMatrix, v: &IntervalMatrix) -> Result<Self> {
        let n = base.nvars();
        let m = base.neqs();
        if u.nrows() != m || u.ncols() != m || v.nrows() != n || v.ncols() != n {
            return Err(Error::ShapeMismatch {
                expected: format!("U {m}x{m}, V {n}x{n}"),
                found: format!(
                    "U {}x{}, V {}x{}",
                    u.nrows(),
                    u.ncols(),
                    v.nrows(),
                    v.ncols()
                ),
            });
        }
        Ok(RotatedSystem {
            base,
            u_t: u.transpose(),
            v: v.clone(),
        })
    }

    pub fn base(&self) -> &Arc<CompiledSystem> {
        &self.base
    }

    pub fn v(&self) -> &IntervalMatrix {
        &self.v
    }

    pub fn u_transpose(&self) -> &IntervalMatrix {
        &self.u_t
    }

    /// Maps rotated coordinates back: `x = V x_hat`.
    pub fn to_original(&self, x_hat: &IntervalVector) -> Result<IntervalVector> {
        self.v.mul_vec(x_hat)
    }
}

impl CurveMap for RotatedSystem {
    fn nvars(&self) -> usize {
        self.base.nvars()
    }
    fn neqs(&self) -> usize {
        self.base.neqs()
    }
    fn precision(&self) -> Precision {
        self.base.precision()
    }
    /// Natural extension intersected with the mean-value form
    /// `F(m) + J(x) (x - m)`, which keeps the cancellation between the
    /// columns of `V` that composition alone loses.
    fn eval(&self, x: &IntervalVector) -> Result<IntervalVector> {
        let y = self.v.mul_vec(x)?;
        let natural = self.u_t.mul_vec(&self.base.eval(&y)?)?;
        if x.iter().all(Interval::is_point) {
            return Ok(natural);
        }
        let m = x.mid_vector();
        let fm = self.u_t.mul_vec(&self.base.eval(&self.v.mul_vec(&m)?)?)?;
        let centered = fm.add(&self.jacobian(x)?.mul_vec(&x.sub(&m)?)?)?;
        Ok(natural
            .iter()
            .zip(centered.iter())
            .map(|(a, b)| a.intersection(b).unwrap_or_else(|| a.hull(b)))
            .collect())
    }
    fn jacobian(&self, x: &IntervalVector) -> Result<IntervalMatrix> {
        let y = self.v.mul_vec(x)?;
        self.u_t.mul(&self.base.jacobian(&y)?.mul(&self.v)?)
    }
}

/// The square system `C_a` obtained by fixing the last variable to `level`.
pub struct SlicedSystem<'a> {
    source: &'a dyn CurveMap,
    level: Interval,
}

impl<'a> SlicedSystem<'a> {
    pub fn new(source: &'a dyn CurveMap, level: Interval) -> Self {
        SlicedSystem { source, level }
    }

    pub fn level(&self) -> &Interval {
        &self.level
    }

    pub fn source(&self) -> &'a dyn CurveMap {
        self.source
    }

    /// Full box `(x, level)`.
    pub fn lift(&self, x: &IntervalVector) -> IntervalVector {
        x.with_last(self.level.clone())
    }

    fn check(&self, x: &IntervalVector) -> Result<()> {
        if x.len() + 1 != self.source.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.source.nvars() - 1,
                found: x.len(),
            });
        }
        Ok(())
    }
}

impl CurveMap for SlicedSystem<'_> {
    fn nvars(&self) -> usize {
        self.source.nvars() - 1
    }
    fn neqs(&self) -> usize {
        self.source.neqs()
    }
    fn precision(&self) -> Precision {
        self.source.precision()
    }
    fn eval(&self, x: &IntervalVector) -> Result<IntervalVector> {
        self.check(x)?;
        self.source.eval(&self.lift(x))
    }
    fn jacobian(&self, x: &IntervalVector) -> Result<IntervalMatrix> {
        self.check(x)?;
        let full = self.source.jacobian(&self.lift(x))?;
        Ok(full.leading_columns(full.ncols() - 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polysys::parse_polynomial;
    use rug::Float;

    fn p() -> Precision {
        Precision::MIN
    }

    fn circle() -> PolySystem {
        let names = vec!["x".to_string(), "y".to_string()];
        PolySystem::new(vec![parse_polynomial("x^2 + y^2 - 1", &names).unwrap()]).unwrap()
    }

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(Float::with_val(64, lo), Float::with_val(64, hi)).unwrap()
    }

    #[test]
    fn circle_gradient_at_one_zero() {
        let j = circle()
            .jacobian_interval(&IntervalVector::from_f64s(&[1.0, 0.0], p()))
            .unwrap();
        assert_eq!(j.to_f64(), vec![2.0, 0.0]);
        assert!(j.is_point());
    }

    #[test]
    fn linear_system_has_constant_jacobian() {
        let names = vec!["x".to_string(), "y".to_string()];
        let s = PolySystem::new(vec![parse_polynomial("3*x - y + 1", &names).unwrap()]).unwrap();
        let j = s.jacobian_interval(&IntervalVector::unit_box(2, p())).unwrap();
        assert_eq!(j.to_f64(), vec![3.0, -1.0]);
        assert!(j.is_point());
    }

    #[test]
    fn slice_at_point_level() {
        let c = circle().compile(p());
        let s = SlicedSystem::new(&c, Interval::zero(p()));
        let y = s.eval(&IntervalVector::new(vec![iv(2.0, 2.0)])).unwrap();
        assert_eq!(y[0], Interval::from_int(3, p()));
    }

    #[test]
    fn slice_at_interval_level() {
        let c = circle().compile(p());
        let s = SlicedSystem::new(&c, iv(-0.1, 0.1));
        let y = s.eval(&IntervalVector::new(vec![Interval::zero(p())])).unwrap();
        // 0 + [0, 0.01] - 1
        let sq = iv(-0.1, 0.1).sqr();
        assert_eq!(y[0], sq - Interval::one(p()));
        assert!(y[0].lo() == &Float::with_val(64, -1));
    }

    #[test]
    fn slice_matches_pinned_full_evaluation() {
        let c = circle().compile(p());
        let level = iv(0.25, 0.5);
        let s = SlicedSystem::new(&c, level.clone());
        let x = IntervalVector::new(vec![iv(0.5, 0.75)]);
        let full = c.eval(&IntervalVector::new(vec![iv(0.5, 0.75), level])).unwrap();
        assert_eq!(s.eval(&x).unwrap(), full);
    }

    #[test]
    fn identity_rotation_is_transparent() {
        let c = Arc::new(circle().compile(p()));
        let r = RotatedSystem::new(
            c.clone(),
            &IntervalMatrix::identity(1, p()),
            &IntervalMatrix::identity(2, p()),
        )
        .unwrap();
        let x = IntervalVector::from_f64s(&[0.6, 0.8], p());
        assert_eq!(r.eval(&x).unwrap(), c.eval(&x).unwrap());
        assert_eq!(r.jacobian(&x).unwrap(), c.jacobian(&x).unwrap());
    }
}
