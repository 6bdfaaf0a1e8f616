use mbl_core::exactnum::{extended_product, int, pochhammer, rat, Gq, Rational};
use mbl_core::mops_engine::{biorthogonality_check, solve_mops, sum_rules_check};
use mbl_core::polymat::{MatPoly, Matrix};
use mbl_core::scalar_bessel::{loop_norm_ratio, monic_bessel, scalar_of, ScalarBesselParams};
use mbl_core::weights_moments::{matrix_moment_table, pearson_moment_residual, WeightSpec};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=6).prop_map(|(p, q)| rat(p, q))
}

fn gq() -> impl Strategy<Value = Gq> {
    (small_rat(), small_rat()).prop_map(|(re, im)| Gq::new(re, im))
}

fn matrix(d: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(gq(), d * d).prop_map(move |v| Matrix::from_fn(d, d, |i, j| v[i * d + j].clone()))
}

fn poly(d: usize, max_deg: usize) -> impl Strategy<Value = MatPoly> {
    prop::collection::vec(matrix(d), 1..=max_deg + 1).prop_map(move |c| MatPoly::new(d, d, c).unwrap())
}

/// Positive real part, as required of `beta`.
fn beta() -> impl Strategy<Value = Gq> {
    (1i64..=5, 1i64..=3, -3i64..=3).prop_map(|(p, q, im)| Gq::new(rat(p, q), int(im)))
}

/// Non-integral, so no Pochhammer factor vanishes.
fn loop_a() -> impl Strategy<Value = Rational> {
    (-20i64..=40).prop_filter("non-integral", |p| p % 7 != 0).prop_map(|p| rat(p, 7))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gaussian_field_laws(a in gq(), b in gq(), c in gq()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a - &a, Gq::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), Gq::one());
            prop_assert_eq!((&b * &a).checked_div(&a).unwrap(), b);
        }
    }

    #[test]
    fn pochhammer_splits(x in small_rat(), m in 0usize..6, n in 0usize..6) {
        prop_assert_eq!(pochhammer(&x, m + n), pochhammer(&x, m) * pochhammer(&(&x + int(m as i64)), n));
    }

    #[test]
    fn extended_products_telescope(lo in -6i64..6, mid in -8i64..8, hi in -8i64..8) {
        let f = |j: i64| int(j) + rat(1, 2);
        let whole = extended_product(lo, hi, f).unwrap();
        let split = extended_product(lo, mid, f).unwrap() * extended_product(mid + 1, hi, f).unwrap();
        prop_assert_eq!(whole, split);
    }

    #[test]
    fn leibniz_rule(p in poly(2, 3), q in poly(2, 3)) {
        let lhs = (&p * &q).derivative();
        let rhs = &p.derivative() * &q + &p * &q.derivative();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_round_trip(m in matrix(2)) {
        if let Ok(inv) = m.inverse() {
            prop_assert_eq!(&m * &inv, Matrix::identity(2));
            prop_assert_eq!(&inv * &m, Matrix::identity(2));
        }
    }

    #[test]
    fn moments_are_linear_in_the_prefactor(p in poly(2, 2), q in poly(2, 2), s in gq(), alpha in loop_a(), b in beta()) {
        let sum = &p + &q.map(|m| m.scale(&s));
        prop_assume!(!p.is_zero() && !q.is_zero() && !sum.is_zero());
        let table = |phi: &MatPoly| matrix_moment_table(&WeightSpec::new(alpha.clone(), b.clone(), phi.clone(), None).unwrap(), 5).unwrap();
        let (tp, tq, ts) = (table(&p), table(&q), table(&sum));
        for k in 0..5 {
            prop_assert_eq!(ts.get(k).clone(), tp.get(k) + &tq.get(k).scale(&s));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scalar_hankel_solution_is_the_bessel_family(a in loop_a(), b in beta()) {
        let spec = WeightSpec::scalar(a.clone(), b.clone()).unwrap();
        let table = matrix_moment_table(&spec, 12).unwrap();
        prop_assert!(pearson_moment_residual(spec.pearson.as_ref().unwrap(), &table).pass());
        let data = solve_mops(&table, 4).unwrap();
        prop_assert!(biorthogonality_check(&data, &table).pass());
        prop_assert!(sum_rules_check(&data).pass());
        let pb = ScalarBesselParams::new(&a - int(2), b.clone()).unwrap();
        let pl = ScalarBesselParams::new(a, b).unwrap();
        let h0 = scalar_of(&data.c_inv[0]);
        for n in 0..=4 {
            prop_assert_eq!(&data.p_left[n], &monic_bessel(n, &pb).unwrap());
            prop_assert_eq!(scalar_of(&data.c_inv[n]).checked_div(&h0).unwrap(), loop_norm_ratio(n, &pl).unwrap());
        }
    }
}
