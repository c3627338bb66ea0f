mod common;

use curvecert::interval::IntervalVector;
use curvecert::polysys::{kernel_vector, PolySystem};
use curvecert::projection::{
    certified_plane_curve, half_space_condition, intersection_check, CheckOutcome, CrossingReport, Exclusion,
    ProjectionMap, Rectangle, TangentCone,
};
use curvecert::tracker::{track_curve, ArcKey, Domain, TrackParams, TubularNeighborhood};
use rug::{Float, Rational};

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn params(rho: Rational) -> TrackParams {
    TrackParams { rho, ..TrackParams::default() }
}

fn cone(nbhd: &TubularNeighborhood, m: &ProjectionMap, i: usize) -> TangentCone {
    let region = &nbhd.tubes()[i].region;
    let k = kernel_vector(&nbhd.system().jacobian_interval(region).unwrap()).unwrap();
    TangentCone::from_directions(&m.apply(&k).unwrap(), i).unwrap()
}

fn mid_angle(nbhd: &TubularNeighborhood, i: usize) -> f64 {
    let c = nbhd.tubes()[i].region.to_f64();
    c[1].atan2(c[0])
}

#[test]
fn circle_arcs_and_the_half_space_condition() {
    let system = PolySystem::parse(&["x^2 + y^2 - 1"], &["x", "y"]).unwrap();
    let nbhd = track_curve(&system, &[q(1, 1), q(0, 1)], &Domain::cube(2, 2).unwrap(), &params(q(1, 32))).unwrap();
    let m = ProjectionMap::coordinates(2, 0, 1).unwrap();
    let start = mid_angle(&nbhd, 0);
    let turned = |i: usize| (mid_angle(&nbhd, i) - start).rem_euclid(std::f64::consts::TAU);
    // Angle swept along the chain from tube 0.
    let counterclockwise = turned(3) < std::f64::consts::PI;
    let swept = |i: usize| if counterclockwise { turned(i) } else { (std::f64::consts::TAU - turned(i)) % std::f64::consts::TAU };
    let arc = |limit: f64| -> Vec<TangentCone> {
        (0..nbhd.len())
            .take_while(|&i| i == 0 || (swept(i) > 0.0 && swept(i) <= limit))
            .map(|i| cone(&nbhd, &m, i))
            .collect()
    };
    let quarter = arc(std::f64::consts::FRAC_PI_2);
    assert!(quarter.len() > 3);
    assert!(half_space_condition(&quarter));
    let more_than_half = arc(1.1 * std::f64::consts::PI);
    assert!(!half_space_condition(&more_than_half));
}

#[test]
fn monotone_arc_is_not_confirmed() {
    let system = PolySystem::parse(&["y - 2*x", "z - 3*x"], &["x", "y", "z"]).unwrap();
    let mut nbhd = track_curve(&system, &[q(0, 1), q(0, 1), q(0, 1)], &Domain::cube(3, 1).unwrap(), &TrackParams::default()).unwrap();
    let m = ProjectionMap::coordinates(3, 0, 1).unwrap();
    assert!(nbhd.len() > 3);
    assert!(m.apply(&nbhd.tubes()[0].region).unwrap().intersects(&m.apply(&nbhd.tubes()[2].region).unwrap()));
    let outcome = intersection_check(&mut nbhd, &m, 0, 2).unwrap();
    assert!(matches!(outcome, CheckOutcome::NotConfirmed(_)), "{outcome:?}");
}

/// Largest projected diameter among the tubes descended from `keys`.
fn local_size(nbhd: &TubularNeighborhood, m: &ProjectionMap, keys: &[ArcKey]) -> f64 {
    nbhd.tubes()
        .iter()
        .filter(|t| keys.iter().any(|k| t.key.overlaps(k, nbhd.period())))
        .map(|t| m.apply(&t.region).unwrap().diameter().to_f64())
        .fold(0.0, f64::max)
}

#[test]
fn rejected_checks_make_progress() {
    let system = PolySystem::parse(&["x + z^5 - 13/10*z^3", "y - z^3 + z"], &["x", "y", "z"]).unwrap();
    let start = [q(0, 1), q(0, 1), q(0, 1)];
    let nbhd = track_curve(&system, &start, &Domain::cube(3, 2).unwrap(), &params(q(1, 8))).unwrap();
    let m = ProjectionMap::coordinates(3, 0, 1).unwrap();
    let boxes: Vec<IntervalVector> = nbhd.tubes().iter().map(|t| m.apply(&t.region).unwrap()).collect();
    let mut checked = 0;
    for i in 0..nbhd.len() {
        for j in i + 4..nbhd.len() {
            if checked == 6 || !boxes[i].intersects(&boxes[j]) {
                continue;
            }
            checked += 1;
            let keys = [nbhd.tubes()[i].key.clone(), nbhd.tubes()[j].key.clone()];
            let before = local_size(&nbhd, &m, &keys);
            let mut work = nbhd.clone();
            match intersection_check(&mut work, &m, i, j).unwrap() {
                CheckOutcome::Confirmed { .. } => panic!("the quintic's projection has no crossing, yet ({i}, {j}) was confirmed"),
                CheckOutcome::NotConfirmed(why) => {
                    let after = local_size(&work, &m, &keys);
                    assert!(after < before, "({i}, {j}) {why:?}: {after} !< {before}");
                }
            }
        }
    }
    assert!(checked > 0, "no overlapping pair to check");
}

/// `(t^3 - 3t, t^4 - 4t^2 + 2)`, a curve with three transverse crossings.
fn three_crossings() -> (TubularNeighborhood, CrossingReport, ProjectionMap) {
    let system = PolySystem::parse(&["x - T^3 + 3*T", "y - T^4 + 4*T^2 - 2"], &["x", "y", "T"]).unwrap();
    let domain = Domain::new(vec![q(-4, 1), q(-4, 1), q(-21, 10)], vec![q(4, 1), q(4, 1), q(21, 10)]).unwrap();
    let m = ProjectionMap::coordinates(3, 0, 1).unwrap();
    let (nbhd, report) = certified_plane_curve(&system, &[q(0, 1), q(2, 1), q(0, 1)], &domain, &m, &TrackParams::default()).unwrap();
    (nbhd, report, m)
}

fn oracle_crossings() -> Vec<(f64, f64, [f64; 2])> {
    common::plane_self_intersections(
        &|t| t * t * t - 3.0 * t,
        &|t| t.powi(4) - 4.0 * t * t + 2.0,
        &|t| 3.0 * t * t - 3.0,
        &|t| 4.0 * t.powi(3) - 8.0 * t,
        -2.1,
        2.1,
        100_000,
    )
}

fn point_box(p: [f64; 2]) -> IntervalVector {
    IntervalVector::from_f64s(&p, curvecert::interval::Precision::MIN)
}

#[test]
fn crossings_match_the_parametric_oracle() {
    let (_, report, _) = three_crossings();
    let oracle = oracle_crossings();
    assert_eq!(oracle.len(), 3);
    assert_eq!(report.crossings.len(), oracle.len());
    for c in &report.crossings {
        let [r1, r2] = &c.rectangles.rectangles;
        let inside: Vec<_> = oracle
            .iter()
            .filter(|(_, _, p)| r1.contains_box(&point_box(*p)) && r2.contains_box(&point_box(*p)))
            .collect();
        assert_eq!(inside.len(), 1, "crossing at {:?}", c.enclosure.to_f64());
        let p = inside[0].2;
        assert!(c.enclosure.contains_point(&[Float::with_val(64, p[0]), Float::with_val(64, p[1])]));
    }
}

/// Separating axis test on the exact corners, allowing shared boundary.
fn interiors_disjoint(a: &Rectangle, b: &Rectangle) -> bool {
    let corners = |r: &Rectangle| r.corners().map(|p| [p[0].mid().to_f64(), p[1].mid().to_f64()]);
    let (ca, cb) = (corners(a), corners(b));
    let axes = [a.axis.clone(), a.normal(), b.axis.clone(), b.normal()].map(|v| [v[0].to_f64(), v[1].to_f64()]);
    axes.iter().any(|ax| {
        let proj = |c: &[[f64; 2]; 4]| {
            let v: Vec<f64> = c.iter().map(|p| p[0] * ax[0] + p[1] * ax[1]).collect();
            (v.iter().cloned().fold(f64::MAX, f64::min), v.iter().cloned().fold(f64::MIN, f64::max))
        };
        let ((a0, a1), (b0, b1)) = (proj(&ca), proj(&cb));
        a1 <= b0 + 1e-12 || b1 <= a0 + 1e-12
    })
}

#[test]
fn crossings_are_counted_once() {
    let (_, report, _) = three_crossings();
    for (k, a) in report.crossings.iter().enumerate() {
        for b in &report.crossings[k + 1..] {
            for ra in &a.rectangles.rectangles {
                for rb in &b.rectangles.rectangles {
                    assert!(interiors_disjoint(ra, rb));
                }
            }
        }
    }
}

/// For each pair excluded by the half-space condition, the curve points in
/// the tubes between them project to a path that is strictly monotone in
/// some direction.
#[test]
fn half_space_exclusions_are_monotone() {
    let (nbhd, report, _) = three_crossings();
    let gamma = |t: f64| [t * t * t - 3.0 * t, t.powi(4) - 4.0 * t * t + 2.0];
    let mut tested = 0;
    for pair in report.excluded.iter().filter(|p| p.reason == Exclusion::HalfSpace) {
        let lo = pair.keys.iter().map(|k| k.lo.clone()).min().unwrap();
        let hi = pair.keys.iter().map(|k| Rational::from(&k.lo + &k.len)).max().unwrap();
        let chain: Vec<_> = nbhd.tubes().iter().filter(|t| t.key.lo >= lo && Rational::from(&t.key.lo + &t.key.len) <= hi).collect();
        let t0 = chain.iter().map(|t| t.region[2].lo().to_f64()).fold(f64::MAX, f64::min);
        let t1 = chain.iter().map(|t| t.region[2].hi().to_f64()).fold(f64::MIN, f64::max);
        let path: Vec<[f64; 2]> = (0..=400)
            .map(|k| t0 + (t1 - t0) * k as f64 / 400.0)
            .filter(|&t| {
                let p = gamma(t);
                let x = [Float::with_val(64, p[0]), Float::with_val(64, p[1]), Float::with_val(64, t)];
                chain.iter().any(|tube| tube.region.contains_point(&x))
            })
            .map(gamma)
            .collect();
        if path.len() < 3 {
            continue;
        }
        tested += 1;
        let chords: Vec<f64> = path.windows(2).map(|w| (w[1][1] - w[0][1]).atan2(w[1][0] - w[0][0])).collect();
        let n = monotone_direction(&chords).unwrap_or_else(|| panic!("excluded pair {:?} is not monotone", pair.keys));
        for w in path.windows(2) {
            assert!((w[1][0] - w[0][0]) * n[0] + (w[1][1] - w[0][1]) * n[1] > 0.0);
        }
    }
    assert!(tested > 0);
}

/// A unit vector with positive dot product with every direction, if the
/// directions fit in an open half plane.
fn monotone_direction(angles: &[f64]) -> Option<[f64; 2]> {
    let tau = std::f64::consts::TAU;
    let mut a: Vec<f64> = angles.iter().map(|x| x.rem_euclid(tau)).collect();
    a.sort_by(f64::total_cmp);
    let mut best = (a[0] + tau - a[a.len() - 1], a[a.len() - 1]);
    for w in a.windows(2) {
        if w[1] - w[0] > best.0 {
            best = (w[1] - w[0], w[0]);
        }
    }
    if best.0 <= std::f64::consts::PI {
        return None;
    }
    let centre = best.1 + best.0 / 2.0 + std::f64::consts::PI;
    Some([centre.cos(), centre.sin()])
}

#[test]
fn quintic_has_no_crossing_at_fine_rho() {
    let system = PolySystem::parse(&["x + z^5 - 13/10*z^3", "y - z^3 + z"], &["x", "y", "z"]).unwrap();
    let m = ProjectionMap::coordinates(3, 0, 1).unwrap();
    let (_, report) = certified_plane_curve(&system, &[q(0, 1), q(0, 1), q(0, 1)], &Domain::cube(3, 2).unwrap(), &m, &params(q(1, 32))).unwrap();
    assert!(report.crossings.is_empty());
}
