use rug::Float;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalVector};
use crate::polysys::{kernel_vector, CurveMap, SlicedSystem};

/// Shape of the predicted curve between the current level and `level + h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PredictorKind {
    Linear,
    #[default]
    Hermite,
}

/// Polynomial guess `X(eta)` for the first `n-1` rotated coordinates as a
/// function of the level offset `eta`, held in Bernstein form on `[0, h]`
/// and extended by the constant `X(0)` for `eta < 0`.
#[derive(Debug, Clone)]
pub struct Predictor {
    kind: PredictorKind,
    level: Float,
    h: Float,
    control: Vec<Vec<Float>>,
}

impl Predictor {
    pub fn kind(&self) -> PredictorKind {
        self.kind
    }

    /// Level of the base point.
    pub fn level(&self) -> &Float {
        &self.level
    }

    pub fn step(&self) -> &Float {
        &self.h
    }

    pub fn control_points(&self) -> &[Vec<Float>] {
        &self.control
    }

    /// `X(h)`.
    pub fn end(&self) -> &[Float] {
        self.control.last().expect("at least two control points")
    }

    pub fn start(&self) -> &[Float] {
        &self.control[0]
    }

    /// Hull of the control points: encloses `X` on `(-inf, h]`.
    pub fn span_box(&self) -> IntervalVector {
        let m = self.control[0].len();
        (0..m)
            .map(|i| {
                self.control
                    .iter()
                    .map(|p| Interval::point(p[i].clone()))
                    .reduce(|a, b| a.hull(&b))
                    .expect("non-empty")
            })
            .collect()
    }

    /// Rigorous enclosure of `X(eta)` over an interval of offsets.
    pub fn eval_interval(&self, eta: &Interval) -> IntervalVector {
        let prec = eta.precision().max(Interval::point(self.h.clone()).precision());
        let base: IntervalVector = IntervalVector::from_points(self.start());
        if *eta.hi() <= 0 {
            return base;
        }
        let zero = Float::with_val(prec.bits(), 0);
        let lo = if *eta.lo() < 0 { zero } else { eta.lo().clone() };
        let pos = Interval::new(lo, eta.hi().clone()).expect("ordered");
        let h = Interval::point(self.h.clone());
        let s = pos.checked_div(&h).expect("h is positive");
        let mut out = self.de_casteljau(&s);
        if *s.hi() <= 1 {
            let hull = self.span_box();
            out = out
                .iter()
                .zip(hull.iter())
                .map(|(a, b)| a.intersection(b).unwrap_or_else(|| a.clone()))
                .collect();
        }
        if *eta.lo() < 0 {
            out = out.hull(&base).expect("same length");
        }
        out
    }

    /// Point value, rounded to the working precision.
    pub fn eval(&self, eta: &Float) -> Vec<Float> {
        self.eval_interval(&Interval::point(eta.clone())).midpoint()
    }

    fn de_casteljau(&self, s: &Interval) -> IntervalVector {
        let prec = s.precision();
        let one = Interval::one(prec);
        let t = &one - s;
        let m = self.control[0].len();
        (0..m)
            .map(|i| {
                let mut pts: Vec<Interval> = self
                    .control
                    .iter()
                    .map(|p| Interval::point(p[i].clone()))
                    .collect();
                while pts.len() > 1 {
                    pts = pts
                        .windows(2)
                        .map(|w| &(&w[0] * &t) + &(&w[1] * s))
                        .collect();
                }
                pts.pop().expect("non-empty")
            })
            .collect()
    }
}

/// Unit tangent direction at `x` (all `n` rotated coordinates), scaled so
/// that its last component is one. Returns the first `n-1` components.
pub fn slope(map: &dyn CurveMap, x: &[Float]) -> Result<Vec<Float>> {
    let j = map.jacobian(&IntervalVector::from_points(x))?;
    let k = kernel_vector(&j)?;
    let n = k.len();
    let last = k.last().clone();
    if last.contains_zero() {
        return Err(Error::TangentVertical);
    }
    (0..n - 1)
        .map(|i| Ok(k[i].checked_div(&last)?.mid()))
        .collect()
}

/// Builds the predictor at the base point `x` of the rotated system for the
/// step `h > 0`. A Hermite predictor falls back to a linear one when the
/// Newton correction of its endpoint does not settle.
pub fn predict(map: &dyn CurveMap, x: &[Float], h: &Float, kind: PredictorKind) -> Result<Predictor> {
    let prec = map.precision().bits();
    let n = x.len();
    let p0: Vec<Float> = x[..n - 1].to_vec();
    let level = x[n - 1].clone();
    let t0 = slope(map, x)?;
    let linear_end: Vec<Float> = p0
        .iter()
        .zip(&t0)
        .map(|(p, t)| Float::with_val(prec, p + Float::with_val(prec, t * h)))
        .collect();
    let linear = Predictor {
        kind: PredictorKind::Linear,
        level: level.clone(),
        h: h.clone(),
        control: vec![p0.clone(), linear_end.clone()],
    };
    if kind == PredictorKind::Linear {
        return Ok(linear);
    }
    let end_level = Float::with_val(prec, &level + h);
    let Some(p1) = newton_on_slice(map, &linear_end, &end_level, Some(h)) else {
        return Ok(linear);
    };
    let mut end = p1.clone();
    end.push(end_level);
    let Ok(t1) = slope(map, &end) else {
        return Ok(linear);
    };
    let third = Float::with_val(prec, h / 3u32);
    let b1 = p0
        .iter()
        .zip(&t0)
        .map(|(p, t)| Float::with_val(prec, p + Float::with_val(prec, t * &third)))
        .collect();
    let b2 = p1
        .iter()
        .zip(&t1)
        .map(|(p, t)| Float::with_val(prec, p - Float::with_val(prec, t * &third)))
        .collect();
    Ok(Predictor {
        kind: PredictorKind::Hermite,
        level,
        h: h.clone(),
        control: vec![p0, b1, b2, p1],
    })
}

/// Newton iterations on the slice at `level`, starting from `guess`. With
/// `limit`, gives up when a step or the total drift exceeds it.
pub(crate) fn newton_on_slice(
    map: &dyn CurveMap,
    guess: &[Float],
    level: &Float,
    limit: Option<&Float>,
) -> Option<Vec<Float>> {
    let prec = map.precision();
    let bits = prec.bits();
    let sliced = SlicedSystem::new(map, Interval::point(level.clone()).with_precision(prec));
    let mut y = guess.to_vec();
    for _ in 0..12 {
        let yv = IntervalVector::from_points(&y).with_precision(prec);
        let f = sliced.eval(&yv).ok()?.midpoint();
        let j = sliced.jacobian(&yv).ok()?.mid_matrix();
        let inv = j.approximate_inverse().ok()?;
        let m = y.len();
        let mut size = Float::with_val(bits, 0);
        let mut scale = Float::with_val(bits, 1);
        for i in 0..m {
            let mut d = Float::with_val(bits, 0);
            for (k, fk) in f.iter().enumerate() {
                d += Float::with_val(bits, &inv[i * m + k] * fk);
            }
            if !d.is_finite() {
                return None;
            }
            size = size.max(&Float::with_val(bits, d.abs_ref()));
            y[i] -= d;
            scale = scale.max(&Float::with_val(bits, y[i].abs_ref()));
        }
        if limit.is_some_and(|l| size > *l) {
            return None;
        }
        if size <= (scale >> (bits - 4)) {
            break;
        }
    }
    if let Some(l) = limit {
        let drift = y
            .iter()
            .zip(guess)
            .map(|(a, b)| Float::with_val(bits, a - b).abs())
            .fold(Float::with_val(bits, 0), |m, d| m.max(&d));
        if drift > *l {
            return None;
        }
    }
    Some(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Precision;
    use crate::polysys::PolySystem;

    fn f(x: f64) -> Float {
        Float::with_val(64, x)
    }

    /// Circle through (1, 0) with the tangent along the y axis.
    fn circle() -> crate::polysys::CompiledSystem {
        PolySystem::parse(&["x^2 + y^2 - 1"], &["x", "y"])
            .unwrap()
            .compile(Precision::MIN)
    }

    #[test]
    fn linear_predictor_is_constant_at_vertical_normal() {
        let p = predict(&circle(), &[f(1.0), f(0.0)], &f(0.25), PredictorKind::Linear).unwrap();
        assert_eq!(p.end()[0].to_f64(), 1.0);
        assert_eq!(p.control_points().len(), 2);
    }

    #[test]
    fn hermite_endpoint_lies_on_curve() {
        let h = 0.25;
        let p = predict(&circle(), &[f(1.0), f(0.0)], &f(h), PredictorKind::Hermite).unwrap();
        assert_eq!(p.kind(), PredictorKind::Hermite);
        let expected = (1.0f64 - h * h).sqrt();
        assert!((p.end()[0].to_f64() - expected).abs() < 1e-12);
    }

    #[test]
    fn enclosure_contains_samples() {
        let p = predict(&circle(), &[f(1.0), f(0.0)], &f(0.5), PredictorKind::Hermite).unwrap();
        let eta = Interval::new(f(-0.01), f(0.5)).unwrap();
        let hull = p.eval_interval(&eta);
        for k in 0..=20 {
            let e = f(-0.01 + 0.51 * k as f64 / 20.0);
            let v = p.eval(&e);
            assert!(hull.contains_point(&v));
        }
        assert!(hull.is_subset(&p.span_box()));
    }

    #[test]
    fn negative_offsets_are_constant() {
        let p = predict(&circle(), &[f(0.9), f(0.1)], &f(0.1), PredictorKind::Hermite).unwrap();
        let v = p.eval(&f(-0.05));
        assert_eq!(v[0], f(0.9));
    }

    #[test]
    fn vertical_tangent_is_reported() {
        let err = slope(&circle(), &[f(0.0), f(1.0)]).unwrap_err();
        assert!(matches!(err, Error::TangentVertical));
    }
}
