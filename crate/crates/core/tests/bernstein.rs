use bindcert::bernstein::*;
use proptest::prelude::*;

fn function() -> impl Strategy<Value = BernsteinFunction> {
    (0.0f64..2.0, 0.0f64..2.0, prop::collection::vec((1e-2f64..1e2, 1e-2f64..1e2), 0..5))
        .prop_map(|(a, b, pairs)| BernsteinFunction::from_pairs(a, b, &pairs).unwrap())
}

fn vec3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn second_difference_is_bounded(b in function(), p in vec3(), k in vec3()) {
        let r = lemma1_check(&b, &[p], &[k]).unwrap();
        prop_assert!(r.holds(), "{r:?}");
    }

    #[test]
    fn exponential_inequality(t in 0.0f64..50.0, p in vec3(), k in vec3()) {
        prop_assert!(exponential_inequality_check(t, &p, &k).unwrap() <= 0.0);
    }

    #[test]
    fn derivatives_alternate(b in function(), u in 0.0f64..20.0) {
        for n in 1..=4u32 {
            let d = b.derivative(u, n).unwrap();
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            prop_assert!(sign * d >= -1e-12, "order {n}: {d}");
        }
    }

    #[test]
    fn monotone_and_nonnegative(b in function(), u in 0.0f64..20.0, du in 0.0f64..5.0) {
        let lo = b.evaluate(u).unwrap();
        prop_assert!(lo >= 0.0);
        prop_assert!(b.evaluate(u + du).unwrap() >= lo - 1e-12);
    }

    #[test]
    fn linear_is_an_identity(c in 0.0f64..3.0, p in vec3(), k in vec3()) {
        let (lhs, rhs) = lemma1_sides(&BernsteinFunction::linear(c).unwrap(), &p, &k);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }
}

fn flipped(lhs: f64, rhs: f64) -> f64 {
    rhs - lhs
}

#[test]
fn flipped_comparator_is_caught() {
    let b = BernsteinFunction::one_minus_exp(1.0, 1.0).unwrap();
    let grid: Vec<Vec<f64>> = (0..5).map(|i| vec![0.4 * i as f64, 0.1]).collect();
    assert!(lemma1_check(&b, &grid, &grid).unwrap().holds());
    assert!(!lemma1_check_with(&b, &grid, &grid, flipped).unwrap().holds());
}

#[test]
fn rejects_bad_parameters() {
    assert!(BernsteinFunction::from_pairs(-1.0, 0.0, &[]).is_err());
    assert!(BernsteinFunction::from_pairs(0.0, 0.0, &[(-1.0, 1.0)]).is_err());
    assert!(BernsteinFunction::linear(1.0).unwrap().evaluate(-1.0).is_err());
    assert!(exponential_inequality_check(-1.0, &[0.0], &[0.0]).is_err());
}

#[test]
fn sqrt_shifted_tracks_the_closed_form() {
    let b = BernsteinFunction::sqrt_shifted(1.0, 400).unwrap();
    for u in [0.0, 0.1, 1.0, 4.0, 10.0] {
        let exact = (u + 1.0f64).sqrt() - 1.0;
        assert!((b.evaluate(u).unwrap() - exact).abs() < 1e-3 * (1.0 + exact), "u={u}");
    }
}
