use curvecert::interval::{Interval, IntervalMatrix, IntervalVector, Precision};
use curvecert::polysys::{kernel_vector, parametric_to_implicit, PolySystem, Polynomial};
use proptest::prelude::*;
use rug::Rational;

fn prec() -> Precision {
    Precision::MIN
}

fn coefficient() -> impl Strategy<Value = Rational> {
    (-50i64..50, 1i64..20).prop_map(|(n, d)| Rational::from((n, d)))
}

fn polynomial(nvars: usize, max_exp: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, nvars), coefficient()), 1..7)
        .prop_map(move |terms| Polynomial::from_terms(nvars, terms).unwrap())
}

fn any_polynomial() -> impl Strategy<Value = Polynomial> {
    (1usize..=3).prop_flat_map(|n| polynomial(n, 4))
}

/// Box with rational corners `[c - w, c + w]` per coordinate.
fn rational_box(n: usize) -> impl Strategy<Value = (Vec<Rational>, Vec<Rational>)> {
    prop::collection::vec((-40i64..40, 1i64..20), n).prop_map(|v| {
        let c: Vec<Rational> = v.iter().map(|(a, _)| Rational::from((*a, 16))).collect();
        let w: Vec<Rational> = v.iter().map(|(_, b)| Rational::from((*b, 32))).collect();
        (c, w)
    })
}

fn to_box(c: &[Rational], w: &[Rational]) -> IntervalVector {
    c.iter()
        .zip(w)
        .map(|(c, w)| {
            let lo = Interval::from_rational(&Rational::from(c - w), prec());
            lo.hull(&Interval::from_rational(&Rational::from(c + w), prec()))
        })
        .collect()
}

fn point_in(c: &[Rational], w: &[Rational], t: &[i64]) -> Vec<Rational> {
    c.iter()
        .zip(w)
        .zip(t)
        .map(|((c, w), t)| c + (w * Rational::from((*t, 64))))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn evaluation_encloses_exact_values(
        (p, (c, w), samples) in any_polynomial().prop_flat_map(|p| {
            let n = p.nvars();
            (Just(p), rational_box(n), prop::collection::vec(prop::collection::vec(-64i64..=64, n), 20))
        })
    ) {
        let out = p.eval_interval(&to_box(&c, &w)).unwrap();
        for t in &samples {
            let x = point_in(&c, &w, t);
            let exact = p.eval_rational(&x).unwrap();
            prop_assert!(out.contains_rational(&exact), "{} not in {}", exact, out);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn halving_the_box_shrinks_the_image(
        (p, (c, w)) in any_polynomial().prop_flat_map(|p| { let n = p.nvars(); (Just(p), rational_box(n)) })
    ) {
        let mut prev = p.eval_interval(&to_box(&c, &w)).unwrap();
        let mut w = w;
        for _ in 0..6 {
            w = w.iter().map(|x| Rational::from(x / 2)).collect();
            let next = p.eval_interval(&to_box(&c, &w)).unwrap();
            prop_assert!(next.is_subset(&prev));
            prop_assert!(next.width() <= prev.width());
            prev = next;
        }
    }

    /// A forward difference quotient is a derivative at some point of the
    /// segment, so it lies in the Jacobian enclosure over any box holding
    /// the segment.
    #[test]
    fn difference_quotients_lie_in_the_jacobian(
        polys in prop::collection::vec(polynomial(3, 3), 2),
        (c, w) in rational_box(3),
        t in prop::collection::vec(-32i64..=32, 3),
        col in 0usize..3,
        k in 1u32..12,
    ) {
        let system = PolySystem::new(polys).unwrap();
        let b = to_box(&c, &w);
        let jac = system.jacobian_interval(&b).unwrap();
        let x = point_in(&c, &w, &t);
        let h = Rational::from(&w[col] / 2) >> k ;
        let mut y = x.clone();
        y[col] += &h;
        let fx = system.eval_rational(&x).unwrap();
        let fy = system.eval_rational(&y).unwrap();
        for r in 0..2 {
            let q = Rational::from(&fy[r] - &fx[r]) / &h ;
            prop_assert!(jac.get(r, col).contains_rational(&q), "{} not in {}", q, jac.get(r, col));
        }
    }

    #[test]
    fn kernel_is_orthogonal_to_the_rows(entries in prop::collection::vec(-8.0f64..8.0, 6)) {
        let j = IntervalMatrix::from_f64(2, 3, &entries, prec());
        let Ok(v) = kernel_vector(&j) else {
            return Ok(());
        };
        let prod = j.mul_vec(&v).unwrap();
        for r in 0..2 {
            prop_assert!(prod[r].contains_zero(), "row {} gives {}", r, prod[r]);
        }
    }

    #[test]
    fn lifted_curve_vanishes_on_the_parametrization(
        gamma in prop::collection::vec(polynomial(1, 8), 1..4),
        (n, d) in (-100i64..100, 1i64..30),
    ) {
        let lifted = parametric_to_implicit(&gamma).unwrap();
        let t = Rational::from((n, d));
        let mut x: Vec<Rational> = gamma.iter().map(|g| g.eval_rational(std::slice::from_ref(&t)).unwrap()).collect();
        x.push(t);
        for v in lifted.eval_rational(&x).unwrap() {
            prop_assert_eq!(v, Rational::from(0));
        }
    }
}
