use nalgebra::DMatrix;
use rug::Float;

use super::{IntervalMatrix, MagNorm, Precision};
use crate::error::{Error, Result};

/// Near-unitary frame from the singular value decomposition of a Jacobian.
#[derive(Debug, Clone)]
pub struct SvdEnclosure {
    /// `(n-1) x (n-1)` point matrix.
    pub u: IntervalMatrix,
    /// `n x n` point matrix whose last column spans the numerical kernel.
    pub v: IntervalMatrix,
    /// Rigorous bound on `max(||U^T U - I||, ||V^T V - I||)`.
    pub defect: Float,
}

/// Computes `U`, `V` with `U^T J V` close to `[Sigma | 0]`.
///
/// The floating SVD of `mid(J)` seeds the frame. The last column of `V` is
/// the normalized signed-minor kernel of `mid(J)` at the working precision,
/// so its orientation varies continuously along a regular curve. Both
/// factors are re-orthonormalized at the working precision and stored
/// exactly.
pub fn enclose_svd(j: &IntervalMatrix, prec: Precision) -> Result<SvdEnclosure> {
    let m = j.nrows();
    let n = j.ncols();
    if m + 1 != n {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", n - 1, n),
            found: format!("{m}x{n}"),
        });
    }
    let mid = j.to_f64();
    if mid.iter().any(|x| !x.is_finite()) {
        return Err(Error::RankDeficient);
    }
    let jm = DMatrix::from_row_slice(m, n, &mid);
    let svd = jm.clone().svd(true, true);
    let (u0, vt0) = match (svd.u, svd.v_t) {
        (Some(u), Some(vt)) => (u, vt),
        _ => return Err(Error::RankDeficient),
    };
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > smax * 1e-14) {
        return Err(Error::RankDeficient);
    }

    let bits = prec.bits();
    let kernel = point_kernel(&j.mid_matrix().with_precision(prec))?;

    // Orthonormalize with the kernel column first so that it is only scaled.
    let mut vcols: Vec<Vec<Float>> = vec![kernel];
    vcols.extend((0..m).map(|c| (0..n).map(|r| Float::with_val(bits, vt0[(c, r)])).collect()));
    let vcols = orthonormalize(vcols, bits)?;
    let ucols = (0..m)
        .map(|c| (0..m).map(|r| Float::with_val(bits, u0[(r, c)])).collect())
        .collect();
    let ucols = orthonormalize(ucols, bits)?;

    let mut v = vec![Float::new(bits); n * n];
    for (c, column) in vcols.iter().enumerate() {
        let target = if c == 0 { n - 1 } else { c - 1 };
        for (r, x) in column.iter().enumerate() {
            v[r * n + target] = x.clone();
        }
    }
    let mut u = vec![Float::new(bits); m * m];
    for (c, column) in ucols.iter().enumerate() {
        for (r, x) in column.iter().enumerate() {
            u[r * m + c] = x.clone();
        }
    }

    let defect = {
        let du = orthogonality_defect(&u, m, prec);
        let dv = orthogonality_defect(&v, n, prec);
        if du >= dv {
            du
        } else {
            dv
        }
    };
    if defect > prec.unitary_tolerance() {
        return Err(Error::PrecisionNeeded {
            bits,
            reason: "frame orthogonalization lost accuracy".into(),
        });
    }

    let u = IntervalMatrix::from_points(m, m, &u);
    let v = IntervalMatrix::from_points(n, n, &v);

    // The leading block U^T J V_1 must be invertible over all of J.
    let block = u.transpose().mul(&j.mul(&v.leading_columns(m))?)?;
    if block.determinant()?.contains_zero() {
        return Err(Error::RankDeficient);
    }

    Ok(SvdEnclosure { u, v, defect })
}

/// Signed maximal minors of a point matrix, normalized to unit length.
fn point_kernel(j: &IntervalMatrix) -> Result<Vec<Float>> {
    let n = j.ncols();
    let bits = j.precision().bits();
    let mut k = Vec::with_capacity(n);
    for i in 0..n {
        let det = j.without_column(i).determinant()?.mid();
        k.push(if i % 2 == 0 { det } else { -det });
    }
    let norm = k
        .iter()
        .fold(Float::with_val(bits, 0), |acc, x| acc + Float::with_val(bits, x * x))
        .sqrt();
    if norm.is_zero() || !norm.is_finite() {
        return Err(Error::RankDeficient);
    }
    Ok(k.into_iter().map(|x| x / &norm).collect())
}

/// Two passes of modified Gram-Schmidt, rounded to nearest.
fn orthonormalize(mut cols: Vec<Vec<Float>>, bits: u32) -> Result<Vec<Vec<Float>>> {
    let dot = |a: &[Float], b: &[Float]| {
        a.iter()
            .zip(b)
            .fold(Float::with_val(bits, 0), |acc, (x, y)| acc + Float::with_val(bits, x * y))
    };
    for _ in 0..2 {
        for c in 0..cols.len() {
            let (done, rest) = cols.split_at_mut(c);
            let col = &mut rest[0];
            for q in done.iter() {
                let d = dot(q, col);
                for (x, y) in col.iter_mut().zip(q) {
                    *x -= Float::with_val(bits, &d * y);
                }
            }
            let norm = dot(col, col).sqrt();
            if norm.is_zero() || !norm.is_finite() {
                return Err(Error::RankDeficient);
            }
            for x in col.iter_mut() {
                *x /= &norm;
            }
        }
    }
    Ok(cols)
}

fn orthogonality_defect(q: &[Float], n: usize, prec: Precision) -> Float {
    let qm = IntervalMatrix::from_points(n, n, q);
    let gram = qm
        .transpose()
        .mul(&qm)
        .expect("square factors are conformable");
    gram.sub(&IntervalMatrix::identity(n, prec))
        .expect("same shape")
        .mag_norm()
}
