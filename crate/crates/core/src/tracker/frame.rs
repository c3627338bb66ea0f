use std::sync::Arc;

use rug::Float;

use crate::error::Result;
use crate::interval::{enclose_svd, verified_inverse, IntervalMatrix, IntervalVector};
use crate::polysys::{CompiledSystem, RotatedSystem};

/// Near-unitary change of coordinates `x = V x_hat` with `U` acting on the
/// equations.
#[derive(Debug, Clone)]
pub struct Frame {
    pub u: IntervalMatrix,
    pub v: IntervalMatrix,
    /// Encloses `V^-1` exactly.
    pub v_inv: IntervalMatrix,
    /// Bound on the non-unitarity of `U` and `V`.
    pub defect: Float,
}

impl Frame {
    /// Tracking direction in original coordinates (last column of `V`).
    pub fn tangent(&self) -> Vec<Float> {
        self.v.column(self.v.ncols() - 1).midpoint()
    }

    /// Box in frame coordinates enclosing `V^-1 x` for every `x` in `b`.
    pub fn to_frame(&self, b: &IntervalVector) -> Result<IntervalVector> {
        self.v_inv.mul_vec(b)
    }

    pub fn to_original(&self, b: &IntervalVector) -> Result<IntervalVector> {
        self.v.mul_vec(b)
    }
}

/// Algorithm 2: rotate `C` so that its tangent at `x` becomes the last axis.
///
/// With `prefer`, the tangent column of `V` is oriented to have a
/// non-negative dot product with it. Returns the rotated system, `V^T x`
/// rounded to the working precision, and the frame.
pub fn unitary_transformation(
    base: &Arc<CompiledSystem>,
    x: &[Float],
    prefer: Option<&[Float]>,
) -> Result<(RotatedSystem, Vec<Float>, Frame)> {
    let prec = base.precision();
    let point = IntervalVector::from_points(x).with_precision(prec);
    let j = base.jacobian(&point)?;
    let svd = enclose_svd(&j, prec)?;
    let mut v = svd.v;
    let n = v.ncols();
    if let Some(dir) = prefer {
        let t = v.column(n - 1).midpoint();
        let dot = t
            .iter()
            .zip(dir)
            .fold(Float::with_val(prec.bits(), 0), |acc, (a, b)| acc + Float::with_val(prec.bits(), a * b));
        if dot < 0 {
            for i in 0..n {
                let flipped = -v.get(i, n - 1).clone();
                v.set(i, n - 1, flipped);
            }
        }
    }
    let v_inv = verified_inverse(&v)?.inverse;
    let rotated = RotatedSystem::new(base.clone(), &svd.u, &v)?;
    let x_hat = v.transpose().mul_vec(&point)?.midpoint();
    Ok((
        rotated,
        x_hat,
        Frame {
            u: svd.u,
            v,
            v_inv,
            defect: svd.defect,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{MagNorm, Precision};
    use crate::polysys::{CurveMap, PolySystem};

    fn circle() -> Arc<CompiledSystem> {
        Arc::new(
            PolySystem::parse(&["x^2 + y^2 - 1"], &["x", "y"])
                .unwrap()
                .compile(Precision::MIN),
        )
    }

    fn pt(v: &[f64]) -> Vec<Float> {
        v.iter().map(|&x| Float::with_val(64, x)).collect()
    }

    #[test]
    fn aligned_point_keeps_coordinates() {
        let (_, x_hat, frame) = unitary_transformation(&circle(), &pt(&[1.0, 0.0]), None).unwrap();
        assert_eq!(x_hat[0].to_f64().abs(), 1.0);
        assert_eq!(x_hat[1].to_f64(), 0.0);
        assert_eq!(frame.defect, 0);
    }

    #[test]
    fn top_point_swaps_axes() {
        let (_, x_hat, frame) = unitary_transformation(&circle(), &pt(&[0.0, 1.0]), None).unwrap();
        let t = frame.tangent();
        assert_eq!(t[0].to_f64().abs(), 1.0);
        assert_eq!(t[1].to_f64(), 0.0);
        assert_eq!(x_hat[1].to_f64(), 0.0);
        assert_eq!(x_hat[0].to_f64().abs(), 1.0);
    }

    #[test]
    fn rotated_jacobian_has_small_last_column() {
        let c = circle();
        let x = pt(&[0.6, 0.8]);
        let (rot, x_hat, frame) = unitary_transformation(&c, &x, None).unwrap();
        let j = rot.jacobian(&IntervalVector::from_points(&x_hat)).unwrap();
        assert!(j.get(0, 1).mag() < Float::with_val(64, 1e-15));
        assert!(j.get(0, 0).mig() > Float::with_val(64, 1.9));
        assert!(frame.defect <= Precision::MIN.unitary_tolerance());
        let back = frame.to_original(&IntervalVector::from_points(&x_hat)).unwrap();
        let err = back.sub(&IntervalVector::from_points(&x)).unwrap().mag_norm();
        assert!(err < Float::with_val(64, 1e-15));
    }

    #[test]
    fn preferred_direction_orients_tangent() {
        let c = circle();
        let x = pt(&[0.6, 0.8]);
        let left = pt(&[-1.0, 0.0]);
        let right = pt(&[1.0, 0.0]);
        let (_, _, f1) = unitary_transformation(&c, &x, Some(&left)).unwrap();
        let (_, _, f2) = unitary_transformation(&c, &x, Some(&right)).unwrap();
        assert!(f1.tangent()[0] < 0);
        assert!(f2.tangent()[0] > 0);
    }
}
