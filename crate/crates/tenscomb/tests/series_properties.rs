use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use tenscomb::melonic_series::{
    binomial, catalan, fuss_catalan, melonic_critical, one_pi_relation, series_fixed_point, tree_function,
    tree_function_exact, tree_series, FixedPointEquation, PowerSeries,
};

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fixed_point_is_fuss_catalan(d in 1usize..=6, order in 0usize..=30) {
        let s = series_fixed_point(&FixedPointEquation::melonic(d), order).unwrap();
        prop_assert_eq!(s.coeffs().len(), order + 1);
        for p in 0..=order {
            prop_assert_eq!(s.coeff(p), fuss_catalan(d as u64, p as u64));
        }
    }

    #[test]
    fn fixed_point_satisfies_equation(d in 1usize..=5, order in 1usize..=20) {
        let g = series_fixed_point(&FixedPointEquation::melonic(d), order).unwrap();
        let rhs = &PowerSeries::constant(BigRational::one(), order) + &g.pow(d + 1).shift(1).truncate(order);
        prop_assert_eq!(g, rhs);
    }

    #[test]
    fn reciprocal_inverts(c in prop::collection::vec(-20i64..20, 1..12), c0 in 1i64..5) {
        let mut coeffs: Vec<BigRational> = c.iter().map(|&x| r(x, 1)).collect();
        coeffs[0] = r(c0, 1);
        let s = PowerSeries::new(coeffs);
        let order = s.order();
        let prod = (&s * &s.reciprocal().unwrap()).truncate(order);
        prop_assert_eq!(prod, PowerSeries::constant(BigRational::one(), order));
    }

    #[test]
    fn tree_function_solves_its_equation(z in -50.0f64..0.24) {
        let t = tree_function(z).unwrap();
        prop_assert!((z * t * t - t + 1.0).abs() < 1e-10 * (1.0 + t.abs()));
    }

    #[test]
    fn exact_tree_values(k in 1i64..40) {
        // z = -k(k+1) makes the discriminant 1 - 4z a perfect square
        let z = r(-k * (k + 1), 1);
        let t = tree_function_exact(&z).unwrap().unwrap();
        prop_assert!((&z * &t * &t - &t + BigRational::one()).is_zero());
        prop_assert_eq!(t, r(1, k + 1));
    }
}

#[test]
fn fuss_catalan_closed_form() {
    for d in 1..=5u64 {
        for p in 0..=12u64 {
            let expect = BigRational::new(binomial((d + 1) * p, p), BigInt::from(d * p + 1));
            assert_eq!(fuss_catalan(d, p), expect);
        }
    }
    assert_eq!(fuss_catalan(1, 7), BigRational::from_integer(catalan(7)));
}

#[test]
fn critical_point_solves_the_double_root() {
    for d in 1..=6 {
        let c = melonic_critical(d);
        let one = BigRational::one();
        let g = &c.g_c;
        let gd = num_traits::pow(g.clone(), d);
        assert_eq!(g.clone(), &one + &c.z_c * &gd * g);
        let dd = BigRational::from_integer(BigInt::from(d as i64 + 1));
        assert_eq!(one, &c.z_c * dd * gd);
    }
}

#[test]
fn tree_series_matches_catalan() {
    let s = tree_series(15);
    for k in 0..=15 {
        assert_eq!(s.coeff(k), BigRational::from_integer(catalan(k as u64)));
    }
}

#[test]
fn one_pi_relation_first_terms() {
    let g = series_fixed_point(&FixedPointEquation::melonic(3), 8).unwrap();
    let sigma = one_pi_relation(&g).unwrap();
    assert!(sigma.coeff(0).is_zero());
    assert_eq!(sigma.coeff(1), BigRational::one());
}
