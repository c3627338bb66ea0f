use std::sync::Arc;

use curvecert::certify::{certificate_interval_extend, initial_certificate, krawczyk_test, refine_solution};
use curvecert::interval::{Interval, IntervalMatrix, IntervalVector, Precision};
use curvecert::polysys::{PolySystem, Polynomial, SlicedSystem};
use curvecert::tracker::unitary_transformation;
use proptest::prelude::*;
use rug::{Float, Rational};

fn prec() -> Precision {
    Precision::MIN
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// `prod (x - r_i) * (x^2 + s)` as a polynomial in `x`.
fn univariate(roots: &[Rational], s: &Rational) -> Polynomial {
    let x = Polynomial::var(0, 1);
    let mut p = x.pow(2).add(&Polynomial::constant(1, s.clone())).unwrap();
    for r in roots {
        p = p.mul(&x.sub(&Polynomial::constant(1, r.clone())).unwrap()).unwrap();
    }
    p
}

/// All real roots in `[-4, 4]` by sign changes on a grid, bisected down to
/// width `2^-40`.
fn bisection_roots(p: &Polynomial) -> Vec<Rational> {
    let f = |x: &Rational| p.eval_rational(std::slice::from_ref(x)).unwrap();
    let mut roots = Vec::new();
    let step = q(1, 256);
    let mut a = q(-4, 1);
    let mut fa = f(&a);
    while a < 4 {
        let b = Rational::from(&a + &step);
        let fb = f(&b);
        if fa == 0 {
            roots.push(a.clone());
        } else if fb != 0 && (fa < 0) != (fb < 0) {
            let (mut lo, mut hi, mut flo) = (a.clone(), b.clone(), fa.clone());
            while Rational::from(&hi - &lo) > q(1, 1 << 40) {
                let mid = Rational::from(&lo + &hi) / 2u32;
                let fm = f(&mid);
                if fm == 0 {
                    lo = mid.clone();
                    hi = mid;
                    break;
                }
                if (fm < 0) == (flo < 0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(Rational::from(&lo + &hi) / 2u32);
        }
        a = b;
        fa = fb;
    }
    roots
}

/// `g(x) - y`: sliced at `y = 0` it is the univariate `g`.
fn slice_system(g: &Polynomial) -> PolySystem {
    let lifted = Polynomial::from_terms(2, g.terms().map(|(e, c)| (vec![e[0], 0], c.clone()))).unwrap();
    PolySystem::new(vec![lifted.sub(&Polynomial::var(1, 2)).unwrap()]).unwrap()
}

#[derive(Debug)]
struct Case {
    g: Polynomial,
    x: Rational,
    r: Rational,
    a: Rational,
}

fn case() -> impl Strategy<Value = Case> {
    (
        prop::collection::btree_set(-48i64..48, 1..4),
        1i64..40,
        0usize..3,
        -512i64..512,
        1i64..64,
    )
        .prop_map(|(ks, s, pick, offset, r)| {
            let roots: Vec<Rational> = ks.iter().map(|k| q(*k, 16) + q(1, 97)).collect();
            let g = univariate(&roots, &q(s, 10));
            let centre = &roots[pick % roots.len()];
            let x = Rational::from(Rational::from(centre * 4096u32).round_ref()) / 4096u32 + q(offset, 4096);
            let dg = g.derivative(0).eval_rational(std::slice::from_ref(&x)).unwrap();
            let a = Rational::from_f64(dg.to_f64().recip()).unwrap_or_else(|| q(1, 1));
            Case { g, x, r: q(r, 256), a }
        })
}

fn run(c: &Case, rho: &Rational) -> bool {
    let system = slice_system(&c.g).compile(prec());
    let slice = SlicedSystem::new(&system, Interval::zero(prec()));
    let x = IntervalVector::from_rationals(std::slice::from_ref(&c.x), prec());
    let a = IntervalMatrix::from_rows(vec![vec![Interval::from_rational(&c.a, prec())]]).unwrap();
    krawczyk_test(&slice, &x, &c.r, &a, rho).unwrap().passed
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn passing_test_isolates_exactly_one_root(c in case()) {
        if run(&c, &q(7, 8)) {
            let lo = Rational::from(&c.x - &c.r);
            let hi = Rational::from(&c.x + &c.r);
            let inside = bisection_roots(&c.g).into_iter().filter(|z| lo <= *z && *z <= hi).count();
            prop_assert_eq!(inside, 1);
        }
    }

    #[test]
    fn newton_map_contracts_the_ball(c in case(), samples in prop::collection::vec(-256i64..=256, 100)) {
        let rho = q(7, 8);
        if run(&c, &rho) {
            let f = |z: &Rational| c.g.eval_rational(std::slice::from_ref(z)).unwrap();
            let bound = Rational::from(&rho * &c.r);
            for t in samples {
                let z = &c.x + (&c.r * q(t, 256));
                let g = &z - (&c.a * f(&z));
                let moved = Rational::from(&g - &c.x).abs();
                prop_assert!(moved <= bound, "|g(z) - x| = {} > {}", moved, bound);
            }
        }
    }
}

fn circle() -> Arc<curvecert::polysys::CompiledSystem> {
    Arc::new(PolySystem::parse(&["x^2 + y^2 - 1"], &["x", "y"]).unwrap().compile(prec()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn refined_certificates_reverify(theta in 0.0f64..std::f64::consts::TAU, noise in -0.05f64..0.05, tau_k in 1i64..8) {
        let base = circle();
        let s = 1.0 + noise;
        let x = [Float::with_val(64, s * theta.cos()), Float::with_val(64, s * theta.sin())];
        let (rot, x_hat, _) = unitary_transformation(&base, &x, None).unwrap();
        let start = initial_certificate(&rot, &x_hat, &q(1, 2), &q(1, 2)).unwrap();
        let tau = q(tau_k, 8);
        let cert = refine_solution(&rot, &start, &tau).unwrap();
        prop_assert!(cert.verify(&rot).unwrap().passed);
        prop_assert!(certificate_interval_extend(&rot, &cert, &cert.slice).unwrap());
        for looser in [(&tau + q(1, 16)), q(15, 16)] {
            if looser > tau && looser < 1 {
                prop_assert!(cert.verify_at(&rot, &looser).unwrap().passed);
            }
        }
    }
}

#[test]
fn slice_reaching_the_vertical_tangent_fails() {
    let base = circle();
    let cert = initial_certificate(&*base, &[Float::with_val(64, 1), Float::with_val(64, 0)], &q(1, 10), &q(7, 8)).unwrap();
    assert!(certificate_interval_extend(&*base, &cert, &Interval::from_rational(&q(-1, 100), prec()).hull(&Interval::from_rational(&q(1, 100), prec()))).unwrap());
    let to_top = Interval::from_rational(&q(-1, 100), prec()).hull(&Interval::one(prec()));
    for r in [q(1, 10), q(1, 2), q(1, 1), q(2, 1)] {
        let widened = curvecert::certify::Certificate { radius: r, ..cert.clone() };
        assert!(!certificate_interval_extend(&*base, &widened, &to_top).unwrap());
    }
}

#[test]
fn refining_an_exact_point_keeps_it() {
    let base = circle();
    let start = initial_certificate(&*base, &[Float::with_val(64, 1), Float::with_val(64, 0)], &q(1, 10), &q(1, 8)).unwrap();
    let cert = refine_solution(&*base, &start, &q(7, 8)).unwrap();
    assert_eq!(cert.center.midpoint()[0], 1);
    assert!(cert.radius >= q(1, 10));
    assert!(cert.verify(&*base).unwrap().passed);
}

#[test]
fn generated_cases_often_pass() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let mut runner = TestRunner::deterministic();
    let strategy = case();
    let passed = (0..200)
        .filter(|_| run(&strategy.new_tree(&mut runner).unwrap().current(), &q(7, 8)))
        .count();
    println!("{passed} of 200 generated cases pass");
    assert!(passed >= 40, "only {passed} of 200 pass");
}
