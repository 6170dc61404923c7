use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use tenscomb::gaussian_oracle::{
    expansion_closed_form, hermite_basis, index_sum_moment, matrix_gaussian_moment, matrix_gaussian_moment_poly,
    monomial_expansion, order_two_invariant, quartic_melonic, recombine, tensor_gaussian_moment, union_of, Convention,
    MomentRequest,
};
use tenscomb::melonic_series::catalan;

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn invariants(d: usize, picks: &[usize]) -> Vec<tenscomb::gem_core::ColoredGraph> {
    picks.iter().map(|&k| if k == 0 { order_two_invariant(d) } else { quartic_melonic(d, (k - 1) % d + 1) }).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pairings_agree_with_index_sums(d in 3usize..=4, picks in prop::collection::vec(0usize..5, 1..=2), n in 1u64..=2) {
        let invs = invariants(d, &picks);
        for convention in [Convention::Scaled, Convention::Unit] {
            let r = tensor_gaussian_moment(&MomentRequest { d, n: Some(n), invariants: invs.clone(), convention }).unwrap();
            let g = union_of(d, &invs).unwrap();
            let direct = index_sum_moment(&g, n, convention).unwrap();
            prop_assert_eq!(r.value.unwrap(), direct);
        }
    }

    #[test]
    fn matrix_moment_leading_term_is_catalan(k in 0u32..=5) {
        let poly = matrix_gaussian_moment_poly(2 * k).unwrap();
        prop_assert_eq!(poly.max_exp(), Some(1));
        prop_assert_eq!(poly.coeff(1), BigRational::from_integer(catalan(k as u64)));
        prop_assert!(matrix_gaussian_moment_poly(2 * k + 1).is_err());
    }

    #[test]
    fn matrix_moment_routes_agree(k in 0u32..=4, n in 1u64..=6) {
        let p = 2 * k;
        let poly = matrix_gaussian_moment_poly(p).unwrap();
        prop_assert_eq!(poly.eval(&int(n as i64)), matrix_gaussian_moment(n, p).unwrap());
    }

    #[test]
    fn hermite_inverse_round_trip(n in 0usize..=20) {
        let c = monomial_expansion(n).unwrap();
        for (k, ck) in c.iter().enumerate() {
            prop_assert_eq!(ck, &expansion_closed_form(n, k));
        }
        let mut xn = vec![BigRational::zero(); n + 1];
        xn[n] = BigRational::one();
        prop_assert_eq!(recombine(n, &c).unwrap(), xn);
    }
}

/// Three-term recurrence `H_{n+1} = x H_n - n H_{n-1}`, independent of the
/// derivative construction.
#[test]
fn hermite_recurrence() {
    for n in 1..20usize {
        let (a, b, next) = (hermite_basis(n).unwrap(), hermite_basis(n - 1).unwrap(), hermite_basis(n + 1).unwrap());
        let mut expect = vec![BigRational::zero(); n + 2];
        for (i, c) in a.iter().enumerate() {
            expect[i + 1] += c;
        }
        for (i, c) in b.iter().enumerate() {
            expect[i] -= c * int(n as i64);
        }
        assert_eq!(next, expect, "n = {n}");
    }
}

#[test]
fn order_two_moment_is_linear_in_n() {
    for d in 1..=5 {
        let r = tensor_gaussian_moment(&MomentRequest {
            d,
            n: None,
            invariants: vec![order_two_invariant(d)],
            convention: Convention::Scaled,
        })
        .unwrap();
        assert_eq!(r.poly.terms().len(), 1);
        assert_eq!(r.poly.coeff(1), BigRational::one());
    }
}

#[test]
fn odd_vertex_products_are_rejected() {
    let g = tenscomb::gem_core::elementary_melon(3);
    let lone = g.restrict(&[0], &[0, 1, 2, 3]);
    let req = MomentRequest { d: 3, n: Some(2), invariants: vec![lone], convention: Convention::Scaled };
    assert!(tensor_gaussian_moment(&req).is_err());
}
