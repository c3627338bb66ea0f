//! Oracles shared by the integration tests. They use plain bisection and
//! sampling and never call into the certification code.
#![allow(dead_code)]

use rug::Float;

pub const BITS: u32 = 256;

/// Root of `f` in `[lo, hi]` by bisection, given a sign change.
pub fn bisect(f: impl Fn(&Float) -> Float, lo: f64, hi: f64) -> Float {
    let mut a = Float::with_val(BITS, lo);
    let mut b = Float::with_val(BITS, hi);
    let fa_neg = f(&a) < 0;
    assert_ne!(fa_neg, f(&b) < 0, "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let m = Float::with_val(BITS, &a + &b) / 2u32;
        if (f(&m) < 0) == fa_neg {
            a = m;
        } else {
            b = m;
        }
    }
    a
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| lo + (hi - lo) * (k as f64 + 0.5) / n as f64)
}

/// 500 points of the unit circle: `y` solved by bisection on a grid of `x`.
pub fn circle_points() -> Vec<[Float; 2]> {
    let mut out = Vec::new();
    for x in grid(-1.0, 1.0, 250) {
        let xf = Float::with_val(BITS, x);
        let rhs = Float::with_val(BITS, 1 - Float::with_val(BITS, xf.square_ref()));
        let y = bisect(|y| Float::with_val(BITS, y.square_ref()) - &rhs, 0.0, 1.0);
        out.push([xf.clone(), y.clone()]);
        out.push([xf, -y]);
    }
    out
}

/// Points of `y^2 = x^3 - 27/10 x + 2` inside `[-3, 3]^2`, over a 500 point
/// grid of `x`.
pub fn cubic_points() -> Vec<[Float; 2]> {
    let mut out = Vec::new();
    for x in grid(-3.0, 3.0, 500) {
        let xf = Float::with_val(BITS, x);
        let rhs = Float::with_val(BITS, &xf * Float::with_val(BITS, xf.square_ref())) - Float::with_val(BITS, &xf * 27u32) / 10u32 + 2u32;
        if rhs <= 0 || rhs >= 9 {
            continue;
        }
        let y = bisect(|y| Float::with_val(BITS, y.square_ref()) - &rhs, 0.0, 3.0);
        out.push([xf.clone(), y.clone()]);
        out.push([xf, -y]);
    }
    out
}

/// Self-intersections of the plane curve `(f(t), g(t))` for `t` in
/// `[lo, hi]`: the polyline through `samples` points is scanned for
/// crossing segments, and each hit is refined by Newton's method on
/// `f(s) = f(t), g(s) = g(t)`.
pub fn plane_self_intersections(
    f: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    df: &dyn Fn(f64) -> f64,
    dg: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Vec<(f64, f64, [f64; 2])> {
    let ts: Vec<f64> = (0..=samples).map(|k| lo + (hi - lo) * k as f64 / samples as f64).collect();
    let pts: Vec<[f64; 2]> = ts.iter().map(|&t| [f(t), g(t)]).collect();

    // Bucket segments on a grid so the pair search stays near linear.
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &pts {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let cells = 512usize;
    let cx = |x: f64| (((x - x0) / (x1 - x0 + 1e-12)) * cells as f64) as usize;
    let cy = |y: f64| (((y - y0) / (y1 - y0 + 1e-12)) * cells as f64) as usize;
    let mut buckets: std::collections::HashMap<(usize, usize), Vec<usize>> = Default::default();
    for i in 0..samples {
        let (a, b) = (pts[i], pts[i + 1]);
        for gx in cx(a[0].min(b[0]))..=cx(a[0].max(b[0])) {
            for gy in cy(a[1].min(b[1]))..=cy(a[1].max(b[1])) {
                buckets.entry((gx, gy)).or_default().push(i);
            }
        }
    }
    let mut hits = std::collections::BTreeSet::new();
    for segs in buckets.values() {
        for (k, &i) in segs.iter().enumerate() {
            for &j in &segs[k + 1..] {
                let (i, j) = (i.min(j), i.max(j));
                if j <= i + 1 {
                    continue;
                }
                if segments_cross(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                    hits.insert((i, j));
                }
            }
        }
    }

    let mut out: Vec<(f64, f64, [f64; 2])> = Vec::new();
    for (i, j) in hits {
        let (mut s, mut t) = (ts[i], ts[j]);
        for _ in 0..50 {
            let (r0, r1) = (f(s) - f(t), g(s) - g(t));
            let (a, b, c, d) = (df(s), -df(t), dg(s), -dg(t));
            let det = a * d - b * c;
            if det == 0.0 {
                break;
            }
            s -= (d * r0 - b * r1) / det;
            t -= (a * r1 - c * r0) / det;
        }
        let p = [f(s), g(s)];
        if out.iter().any(|q| (q.2[0] - p[0]).hypot(q.2[1] - p[1]) < 1e-9) {
            continue;
        }
        out.push((s, t, p));
    }
    out
}

fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0)
}

pub fn f64_point(p: &[Float]) -> Vec<f64> {
    p.iter().map(|x| x.to_f64()).collect()
}
