use std::fmt;

use rug::float::Round;
use rug::Float;

use super::{max_f, Interval, IntervalVector, MagNorm, Precision};
use crate::error::{Error, Result};

/// Dense `rows x cols` matrix of intervals, row-major.
#[derive(Clone, PartialEq)]
pub struct IntervalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Interval>,
}

impl fmt::Debug for IntervalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<_> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        f.debug_list().entries(rows.iter()).finish()
    }
}

impl IntervalMatrix {
    pub fn from_rows(rows: Vec<Vec<Interval>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch {
                expected: format!("rows of length {c}"),
                found: "ragged rows".into(),
            });
        }
        Ok(IntervalMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Interval) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntervalMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize, prec: Precision) -> Self {
        Self::from_fn(rows, cols, |_, _| Interval::zero(prec))
    }

    pub fn identity(n: usize, prec: Precision) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Interval::one(prec)
            } else {
                Interval::zero(prec)
            }
        })
    }

    /// Point matrix from row-major floats.
    pub fn from_points(rows: usize, cols: usize, values: &[Float]) -> Self {
        assert_eq!(values.len(), rows * cols);
        Self::from_fn(rows, cols, |i, j| Interval::point(values[i * cols + j].clone()))
    }

    pub fn from_f64(rows: usize, cols: usize, values: &[f64], prec: Precision) -> Self {
        assert_eq!(values.len(), rows * cols);
        Self::from_fn(rows, cols, |i, j| Interval::from_f64(values[i * cols + j], prec))
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Interval {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Interval) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Interval] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> IntervalVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn precision(&self) -> Precision {
        self.data.iter().map(Interval::precision).max().unwrap_or_default()
    }

    pub fn transpose(&self) -> IntervalMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Leading columns `0..k`.
    pub fn leading_columns(&self, k: usize) -> IntervalMatrix {
        Self::from_fn(self.rows, k, |i, j| self.get(i, j).clone())
    }

    /// Matrix with column `skip` removed.
    pub fn without_column(&self, skip: usize) -> IntervalMatrix {
        Self::from_fn(self.rows, self.cols - 1, |i, j| {
            self.get(i, if j < skip { j } else { j + 1 }).clone()
        })
    }

    pub fn with_precision(&self, prec: Precision) -> IntervalMatrix {
        IntervalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.with_precision(prec)).collect(),
        }
    }

    pub fn is_point(&self) -> bool {
        self.data.iter().all(Interval::is_point)
    }

    pub fn midpoint(&self) -> Vec<Float> {
        self.data.iter().map(Interval::mid).collect()
    }

    pub fn mid_matrix(&self) -> IntervalMatrix {
        IntervalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| Interval::point(x.mid())).collect(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|x| x.mid().to_f64()).collect()
    }

    pub fn add(&self, other: &IntervalMatrix) -> Result<IntervalMatrix> {
        self.check_same_shape(other)?;
        Ok(IntervalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &IntervalMatrix) -> Result<IntervalMatrix> {
        self.check_same_shape(other)?;
        Ok(IntervalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, factor: &Interval) -> IntervalMatrix {
        IntervalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn mul(&self, other: &IntervalMatrix) -> Result<IntervalMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected: format!("{} rows", self.cols),
                found: format!("{}x{}", other.rows, other.cols),
            });
        }
        let prec = self.precision().max(other.precision());
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(Interval::zero(prec), |acc, k| {
                acc + self.get(i, k) * other.get(k, j)
            })
        }))
    }

    pub fn mul_vec(&self, v: &IntervalVector) -> Result<IntervalVector> {
        if self.cols != v.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("vector of length {}", self.cols),
                found: format!("length {}", v.len()),
            });
        }
        let prec = self.precision().max(v.precision());
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v.iter())
                    .fold(Interval::zero(prec), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// `M * [-1, 1]^n`, computed as the symmetric row-sum intervals.
    pub fn mul_unit_box(&self) -> IntervalVector {
        let prec = self.precision().bits();
        (0..self.rows)
            .map(|i| {
                let s = row_magnitude_sum(self.row(i), prec);
                Interval::symmetric(&s)
            })
            .collect()
    }

    /// Determinant by cofactor expansion; intended for the small matrices
    /// that arise from curve Jacobians.
    pub fn determinant(&self) -> Result<Interval> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch {
                expected: "square matrix".into(),
                found: format!("{}x{}", self.rows, self.cols),
            });
        }
        let prec = self.precision();
        let cols: Vec<usize> = (0..self.cols).collect();
        Ok(self.minor_det(0, &cols, prec))
    }

    fn minor_det(&self, row: usize, cols: &[usize], prec: Precision) -> Interval {
        match cols.len() {
            0 => Interval::one(prec),
            1 => self.get(row, cols[0]).clone(),
            2 => {
                self.get(row, cols[0]) * self.get(row + 1, cols[1])
                    - self.get(row, cols[1]) * self.get(row + 1, cols[0])
            }
            _ => {
                let mut acc = Interval::zero(prec);
                for (k, &c) in cols.iter().enumerate() {
                    let entry = self.get(row, c);
                    if entry.is_point() && entry.lo().is_zero() {
                        continue;
                    }
                    let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let term = entry * &self.minor_det(row + 1, &rest, prec);
                    acc = if k % 2 == 0 { acc + term } else { acc - term };
                }
                acc
            }
        }
    }

    fn check_same_shape(&self, other: &IntervalMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                found: format!("{}x{}", other.rows, other.cols),
            });
        }
        Ok(())
    }

    /// Approximate inverse of the midpoint matrix by Gauss-Jordan elimination
    /// with partial pivoting, rounded to nearest at the matrix precision.
    pub fn approximate_inverse(&self) -> Result<Vec<Float>> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch {
                expected: "square matrix".into(),
                found: format!("{}x{}", self.rows, self.cols),
            });
        }
        let n = self.rows;
        let prec = self.precision().bits();
        let mut a = self.midpoint();
        let mut inv: Vec<Float> = (0..n * n)
            .map(|k| Float::with_val(prec, u32::from(k / n == k % n)))
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    let x = a[i * n + col].clone().abs();
                    let y = a[j * n + col].clone().abs();
                    x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(col);
            if a[pivot * n + col].is_zero() || !a[pivot * n + col].is_finite() {
                return Err(Error::SingularMidpoint);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[col * n + col].clone();
            for j in 0..n {
                a[col * n + j] = Float::with_val(prec, &a[col * n + j] / &p);
                inv[col * n + j] = Float::with_val(prec, &inv[col * n + j] / &p);
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let factor = a[i * n + col].clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = Float::with_val(prec, &factor * &a[col * n + j]);
                    a[i * n + j] -= t;
                    let t = Float::with_val(prec, &factor * &inv[col * n + j]);
                    inv[i * n + j] -= t;
                }
            }
        }
        if inv.iter().any(|x| !x.is_finite()) {
            return Err(Error::SingularMidpoint);
        }
        Ok(inv)
    }
}

fn row_magnitude_sum(row: &[Interval], prec: u32) -> Float {
    row.iter().fold(Float::with_val(prec, 0), |acc, x| {
        Float::with_val_round(prec, &acc + &x.mag(), Round::Up).0
    })
}

impl MagNorm for IntervalMatrix {
    /// Row-sum bound of the induced max-norm over every member matrix.
    fn mag_norm(&self) -> Float {
        let prec = self.precision().bits();
        (0..self.rows)
            .map(|i| row_magnitude_sum(self.row(i), prec))
            .fold(Float::with_val(prec, 0), max_f)
    }
}

/// Interval enclosure of the inverse of a matrix's midpoint.
#[derive(Debug, Clone)]
pub struct VerifiedInverse {
    /// Contains the exact inverse of `mid(A)`.
    pub inverse: IntervalMatrix,
    /// The floating-point approximate inverse at the center of `inverse`.
    pub approximate: IntervalMatrix,
    /// Upper bound on `||inverse * A - I||`.
    pub residual: Float,
}

/// Encloses the exact inverse of `mid(a)`.
///
/// With `R` an approximate inverse and `E = I - R mid(a)`, a bound
/// `||E|| <= beta < 1` gives `||mid(a)^-1 - R|| <= ||R|| beta / (1 - beta)`.
pub fn verified_inverse(a: &IntervalMatrix) -> Result<VerifiedInverse> {
    let n = a.nrows();
    let prec = a.precision();
    let approx = IntervalMatrix::from_points(n, n, &a.approximate_inverse()?);
    let center = a.mid_matrix();
    let residual = IntervalMatrix::identity(n, prec).sub(&approx.mul(&center)?)?;
    let beta = residual.mag_norm();
    if beta >= 1 {
        return Err(Error::SingularMidpoint);
    }
    let p = prec.bits();
    let one_minus = Float::with_val_round(p, 1 - &beta, Round::Down).0;
    let num = Float::with_val_round(p, &approx.mag_norm() * &beta, Round::Up).0;
    let delta = Float::with_val_round(p, &num / &one_minus, Round::Up).0;
    let radius = Interval::symmetric(&delta);
    let inverse = IntervalMatrix::from_fn(n, n, |i, j| approx.get(i, j) + &radius);
    let product = inverse.mul(a)?;
    let residual = product.sub(&IntervalMatrix::identity(n, prec))?.mag_norm();
    Ok(VerifiedInverse {
        inverse,
        approximate: approx,
        residual,
    })
}
