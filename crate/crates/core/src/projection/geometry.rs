use rug::Float;

use crate::interval::{Interval, IntervalVector};

/// Oriented rectangle `{ c + s u + t n : |s| <= half_length, |t| <= half_width }`
/// with `n = (-u_y, u_x)`. The vectors are exact binary floats, so the set is
/// known exactly; only tests against it are rounded.
#[derive(Debug, Clone, PartialEq)]
pub struct Rectangle {
    pub center: [Float; 2],
    /// Direction of the long sides.
    pub axis: [Float; 2],
    pub half_length: Float,
    pub half_width: Float,
}

type Point = [Interval; 2];

/// Edge given by enclosures of its endpoints.
pub type Segment = [Point; 2];

impl Rectangle {
    pub fn normal(&self) -> [Float; 2] {
        [-self.axis[1].clone(), self.axis[0].clone()]
    }

    fn offset(&self, s: &Interval, t: &Interval) -> Point {
        let n = self.normal();
        std::array::from_fn(|k| {
            Interval::point(self.center[k].clone())
                + s.mul(&Interval::point(self.axis[k].clone()))
                + t.mul(&Interval::point(n[k].clone()))
        })
    }

    /// Enclosures of the four corners.
    pub fn corners(&self) -> [Point; 4] {
        let l = Interval::point(self.half_length.clone());
        let w = Interval::point(self.half_width.clone());
        [
            self.offset(&-&l, &-&w),
            self.offset(&l, &-&w),
            self.offset(&l, &w),
            self.offset(&-&l, &w),
        ]
    }

    /// The two edges of length `2 half_width`, at `s = -half_length` and
    /// `s = half_length`.
    pub fn short_ends(&self) -> [Segment; 2] {
        let [a, b, c, d] = self.corners();
        [[a.clone(), d.clone()], [b.clone(), c.clone()]]
    }

    /// The two long edges.
    pub fn lateral_sides(&self) -> [Segment; 2] {
        let [a, b, c, d] = self.corners();
        [[a.clone(), b.clone()], [d.clone(), c.clone()]]
    }

    /// True when the segment (an edge of this rectangle) and the box
    /// certainly do not meet.
    pub fn edge_misses_box(&self, edge: &Segment, b: &IntervalVector) -> bool {
        separated(edge, &box_corners(b), &self.axes_with(&unit_axes()))
    }

    /// True when the segment (an edge of this rectangle) certainly misses
    /// `other`.
    pub fn edge_misses(&self, edge: &Segment, other: &Rectangle) -> bool {
        separated(edge, &other.corners(), &self.axes_with(&[other.axis.clone(), other.normal()]))
    }

    /// Coordinates `(s, t)` of the points of a box, relative to the center
    /// and scaled by `|u|^2`; exact ranges up to rounding.
    pub fn local(&self, b: &IntervalVector) -> [Interval; 2] {
        let u = self.axis.clone().map(Interval::point);
        let n = self.normal().map(Interval::point);
        let d: [Interval; 2] = std::array::from_fn(|k| b[k].sub(&Interval::point(self.center[k].clone())));
        let norm = u[0].sqr() + u[1].sqr();
        let s = d[0].mul(&u[0]) + d[1].mul(&u[1]);
        let t = d[0].mul(&n[0]) + d[1].mul(&n[1]);
        [
            s.checked_div(&norm).expect("axis is nonzero"),
            t.checked_div(&norm).expect("axis is nonzero"),
        ]
    }

    /// True when the box certainly lies in the rectangle.
    pub fn contains_box(&self, b: &IntervalVector) -> bool {
        let [s, t] = self.local(b);
        s.is_subset(&Interval::symmetric(&self.half_length)) && t.is_subset(&Interval::symmetric(&self.half_width))
    }

    /// True when the box and the rectangle certainly do not meet.
    pub fn disjoint_from_box(&self, b: &IntervalVector) -> bool {
        let corners = box_corners(b);
        separated(&self.corners(), &corners, &self.axes_with(&unit_axes()))
    }

    pub fn disjoint_from(&self, other: &Rectangle) -> bool {
        let axes = self.axes_with(&[other.axis.clone(), other.normal()]);
        separated(&self.corners(), &other.corners(), &axes)
    }

    fn axes_with(&self, extra: &[[Float; 2]]) -> Vec<[Float; 2]> {
        let mut axes = vec![self.axis.clone(), self.normal()];
        axes.extend_from_slice(extra);
        axes
    }

    /// Axis-aligned hull.
    pub fn bounding_box(&self) -> IntervalVector {
        let c = self.corners();
        (0..2)
            .map(|k| c.iter().map(|p| p[k].clone()).reduce(|a, b| a.hull(&b)).expect("four corners"))
            .collect()
    }
}

fn unit_axes() -> [[Float; 2]; 2] {
    [
        [Float::with_val(64, 1), Float::with_val(64, 0)],
        [Float::with_val(64, 0), Float::with_val(64, 1)],
    ]
}

fn box_corners(b: &IntervalVector) -> Vec<Point> {
    let mut out = Vec::with_capacity(4);
    for x in [b[0].lo(), b[0].hi()] {
        for y in [b[1].lo(), b[1].hi()] {
            out.push([Interval::point(x.clone()), Interval::point(y.clone())]);
        }
    }
    out
}

/// Separating axis test for convex polygons given by vertex enclosures.
fn separated(a: &[Point], b: &[Point], axes: &[[Float; 2]]) -> bool {
    let project = |pts: &[Point], d: &[Float; 2]| {
        let d = d.clone().map(Interval::point);
        pts.iter()
            .map(|p| p[0].mul(&d[0]) + p[1].mul(&d[1]))
            .reduce(|x, y| x.hull(&y))
            .expect("non-empty polygon")
    };
    axes.iter().any(|d| !project(a, d).intersects(&project(b, d)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(x: f64) -> Float {
        Float::with_val(64, x)
    }

    fn bx(x0: f64, x1: f64, y0: f64, y1: f64) -> IntervalVector {
        IntervalVector::new(vec![
            Interval::new(f(x0), f(x1)).unwrap(),
            Interval::new(f(y0), f(y1)).unwrap(),
        ])
    }

    fn diagonal() -> Rectangle {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Rectangle {
            center: [f(0.0), f(0.0)],
            axis: [f(h), f(h)],
            half_length: f(2.0),
            half_width: f(0.25),
        }
    }

    #[test]
    fn box_tests_against_a_tilted_rectangle() {
        let r = diagonal();
        assert!(r.contains_box(&bx(-0.1, 0.1, -0.1, 0.1)));
        assert!(r.contains_box(&bx(1.0, 1.1, 1.0, 1.1)));
        assert!(!r.contains_box(&bx(1.0, 1.5, 0.0, 0.1)));
        assert!(r.disjoint_from_box(&bx(1.0, 1.5, -1.0, -0.5)));
        assert!(!r.disjoint_from_box(&bx(0.3, 0.6, 0.0, 0.1)));
        // Near a corner: the bounding boxes meet, the sets do not.
        assert!(r.disjoint_from_box(&bx(1.55, 1.7, 1.0, 1.1)));
    }

    #[test]
    fn sides_and_ends() {
        let r = diagonal();
        let [a, b] = r.short_ends();
        let mid = |e: &Segment, k: usize| (e[0][k].mid().to_f64() + e[1][k].mid().to_f64()) / 2.0;
        assert!((mid(&a, 0) + 2f64.sqrt()).abs() < 1e-12);
        assert!((mid(&b, 1) - 2f64.sqrt()).abs() < 1e-12);
        let [l0, _] = r.lateral_sides();
        assert!(!r.edge_misses_box(&l0, &r.bounding_box()));
        assert!(r.edge_misses_box(&l0, &bx(1.0, 1.1, 1.0, 1.1)));
        let far = Rectangle {
            center: [f(5.0), f(-5.0)],
            ..r.clone()
        };
        assert!(far.disjoint_from(&r));
        let crossing = Rectangle {
            axis: [f(-std::f64::consts::FRAC_1_SQRT_2), f(std::f64::consts::FRAC_1_SQRT_2)],
            ..r.clone()
        };
        assert!(!crossing.disjoint_from(&r));
        for end in crossing.short_ends() {
            assert!(crossing.edge_misses(&end, &r));
        }
        for side in crossing.lateral_sides() {
            assert!(!crossing.edge_misses(&side, &r));
        }
    }
}
