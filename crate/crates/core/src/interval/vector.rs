use std::fmt;
use std::ops::{Index, IndexMut};

use rug::{Float, Rational};

use super::{max_f, Interval, MagNorm, Precision};
use crate::error::{Error, Result};

/// Interval box in `R^n`.
#[derive(Clone, PartialEq)]
pub struct IntervalVector(Vec<Interval>);

impl fmt::Debug for IntervalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl IntervalVector {
    pub fn new(entries: Vec<Interval>) -> Self {
        IntervalVector(entries)
    }

    pub fn zeros(n: usize, prec: Precision) -> Self {
        IntervalVector(vec![Interval::zero(prec); n])
    }

    /// The unit box `[-1, 1]^n`.
    pub fn unit_box(n: usize, prec: Precision) -> Self {
        IntervalVector(vec![Interval::unit(prec); n])
    }

    pub fn from_points(points: &[Float]) -> Self {
        IntervalVector(points.iter().cloned().map(Interval::point).collect())
    }

    pub fn from_rationals(values: &[Rational], prec: Precision) -> Self {
        IntervalVector(
            values
                .iter()
                .map(|q| Interval::from_rational(q, prec))
                .collect(),
        )
    }

    pub fn from_f64s(values: &[f64], prec: Precision) -> Self {
        IntervalVector(values.iter().map(|&v| Interval::from_f64(v, prec)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Interval> {
        self.0
    }

    pub fn push(&mut self, value: Interval) {
        self.0.push(value);
    }

    pub fn midpoint(&self) -> Vec<Float> {
        self.0.iter().map(Interval::mid).collect()
    }

    pub fn mid_vector(&self) -> IntervalVector {
        IntervalVector(self.0.iter().map(|i| Interval::point(i.mid())).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|i| i.mid().to_f64()).collect()
    }

    /// First `k` coordinates.
    pub fn head(&self, k: usize) -> IntervalVector {
        IntervalVector(self.0[..k].to_vec())
    }

    pub fn last(&self) -> &Interval {
        self.0.last().expect("empty interval vector")
    }

    pub fn with_last(&self, value: Interval) -> IntervalVector {
        let mut v = self.0.clone();
        v.push(value);
        IntervalVector(v)
    }

    fn check_len(&self, other: &IntervalVector) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &IntervalVector) -> Result<IntervalVector> {
        self.check_len(other)?;
        Ok(IntervalVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &IntervalVector) -> Result<IntervalVector> {
        self.check_len(other)?;
        Ok(IntervalVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn scale(&self, factor: &Interval) -> IntervalVector {
        IntervalVector(self.0.iter().map(|a| a * factor).collect())
    }

    pub fn dot(&self, other: &IntervalVector) -> Result<Interval> {
        self.check_len(other)?;
        let prec = self.precision();
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .fold(Interval::zero(prec), |acc, (a, b)| acc + a * b))
    }

    /// Adds `[-r, r]` to every coordinate.
    pub fn inflate(&self, r: &Float) -> IntervalVector {
        IntervalVector(self.0.iter().map(|a| a.inflate(r)).collect())
    }

    pub fn hull(&self, other: &IntervalVector) -> Result<IntervalVector> {
        self.check_len(other)?;
        Ok(IntervalVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a.hull(b)).collect(),
        ))
    }

    pub fn intersects(&self, other: &IntervalVector) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a.intersects(b))
    }

    pub fn intersection(&self, other: &IntervalVector) -> Option<IntervalVector> {
        if self.len() != other.len() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.intersection(b))
            .collect::<Option<Vec<_>>>()
            .map(IntervalVector)
    }

    pub fn is_subset(&self, other: &IntervalVector) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a.is_subset(b))
    }

    pub fn contains_point(&self, x: &[Float]) -> bool {
        self.len() == x.len() && self.0.iter().zip(x).all(|(a, b)| a.contains(b))
    }

    pub fn contains_rationals(&self, x: &[Rational]) -> bool {
        self.len() == x.len() && self.0.iter().zip(x).all(|(a, b)| a.contains_rational(b))
    }

    /// Upper bound on the largest coordinate width.
    pub fn max_width(&self) -> Float {
        let prec = self.precision().bits();
        self.0
            .iter()
            .map(Interval::width)
            .fold(Float::with_val(prec, 0), max_f)
    }

    /// Upper bound on the Euclidean diameter.
    pub fn diameter(&self) -> Float {
        let prec = self.precision();
        let sum = self
            .0
            .iter()
            .map(|i| Interval::point(i.width()).sqr())
            .fold(Interval::zero(prec), |acc, w| acc + w);
        sum.sqrt().map(|s| s.hi().clone()).unwrap_or_else(|_| Float::with_val(prec.bits(), 0))
    }

    pub fn precision(&self) -> Precision {
        self.0
            .iter()
            .map(Interval::precision)
            .max()
            .unwrap_or_default()
    }

    pub fn with_precision(&self, prec: Precision) -> IntervalVector {
        IntervalVector(self.0.iter().map(|i| i.with_precision(prec)).collect())
    }
}

impl MagNorm for IntervalVector {
    fn mag_norm(&self) -> Float {
        let prec = self.precision().bits();
        self.0
            .iter()
            .map(Interval::mag)
            .fold(Float::with_val(prec, 0), max_f)
    }
}

impl Index<usize> for IntervalVector {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

impl IndexMut<usize> for IntervalVector {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.0[i]
    }
}

impl FromIterator<Interval> for IntervalVector {
    fn from_iter<T: IntoIterator<Item = Interval>>(iter: T) -> Self {
        IntervalVector(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a IntervalVector {
    type Item = &'a Interval;
    type IntoIter = std::slice::Iter<'a, Interval>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// All index pairs `(i, j)`, `i < j`, of boxes that may intersect, found by
/// a sweep along the first coordinate.
pub fn intersecting_pairs(boxes: &[IntervalVector]) -> Vec<(usize, usize)> {
    use rug::float::Round;
    let bounds: Vec<Vec<(f64, f64)>> = boxes
        .iter()
        .map(|b| {
            b.iter()
                .map(|x| (x.lo().to_f64_round(Round::Down), x.hi().to_f64_round(Round::Up)))
                .collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..boxes.len()).filter(|&i| !boxes[i].is_empty()).collect();
    order.sort_by(|&a, &b| bounds[a][0].0.total_cmp(&bounds[b][0].0));
    let mut active: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    for &i in &order {
        let lo = bounds[i][0].0;
        active.retain(|&j| bounds[j][0].1 >= lo);
        for &j in &active {
            let close = bounds[i]
                .iter()
                .zip(&bounds[j])
                .all(|(a, b)| a.0 <= b.1 && b.0 <= a.1);
            if close && boxes[i].intersects(&boxes[j]) {
                out.push((i.min(j), i.max(j)));
            }
        }
        active.push(i);
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_vector_norm_is_zero() {
        let v = IntervalVector::zeros(3, Precision::MIN);
        assert_eq!(v.mag_norm(), 0);
    }

    #[test]
    fn norm_is_max_entry_magnitude() {
        let v = IntervalVector::from_f64s(&[0.5, -3.0, 2.0], Precision::MIN);
        assert_eq!(v.mag_norm(), 3);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let a = IntervalVector::zeros(2, Precision::MIN);
        let b = IntervalVector::zeros(3, Precision::MIN);
        assert!(matches!(a.add(&b), Err(Error::DimensionMismatch { .. })));
    }
}
