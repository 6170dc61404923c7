use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tenscomb::scaling_limits::{
    cherry_sum_limit, covariance_operator, double_scaled_two_point, lo_observables, map_n_exponent, prune_map,
    random_map, reduce_map, saddle_alpha, x_critical, IfMap, SaddleContext,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn saddle_routes_agree(d in 3usize..=6, log_lambda in -3.0f64..3.0) {
        let ctx = SaddleContext::new(d, 10f64.powf(log_lambda)).unwrap();
        let lo = lo_observables(&ctx);
        prop_assert!((lo.g2 - lo.g2_from_alpha.re).abs() <= 1e-12 * lo.g2.abs().max(1.0));
        prop_assert!(lo.g2_from_alpha.im.abs() <= 1e-12);
        prop_assert!(lo.g2 > 0.0 && lo.g2 < 2.0);
        let (plus, _) = saddle_alpha(&ctx);
        prop_assert!(((plus * plus).re - ctx.alpha_sq()).abs() <= 1e-12 * ctx.alpha_sq().abs().max(1.0));
    }

    #[test]
    fn covariance_inverse_is_exact(d in 1usize..=3, n in 1usize..=3, alpha_sq in -5.0f64..-0.01) {
        let op = covariance_operator(d, n, alpha_sq).unwrap();
        prop_assert!(op.residual < 1e-10, "residual {}", op.residual);
        let total: usize = op.spectrum().iter().map(|(_, m)| m).sum();
        prop_assert_eq!(total, d * n * n);
    }

    #[test]
    fn map_routes_agree(seed in any::<u64>(), d in 3usize..=6) {
        let m = random_map(&mut ChaCha8Rng::seed_from_u64(seed), d, 8, 20);
        prop_assert!(map_n_exponent(&m, d).is_ok());
        let pruned = prune_map(&m);
        let reduced = reduce_map(&pruned).unwrap();
        prop_assert_eq!(pruned.loops(), m.loops());
        prop_assert_eq!(reduced.loops(), m.loops());
        prop_assert!(reduced.edge_count() < 3 * m.loops().max(1));
        let back = IfMap::from_json(&m.to_json(), d).unwrap();
        prop_assert_eq!(back.to_json(), m.to_json());
    }

    #[test]
    fn cherry_resummation(d in 3usize..=5, dx in 0.01f64..2.0) {
        let x = x_critical(d) + dx;
        let closed = 4.0 * (d as f64).sqrt() * (x.sqrt() - (x - x_critical(d)).sqrt());
        let sum = cherry_sum_limit(d, x, 4000).unwrap();
        prop_assert!((sum - closed).abs() <= 1e-8 * closed.abs());
    }
}

#[test]
fn double_scaling_rejects_points_below_critical() {
    for d in 3..=5 {
        assert!(double_scaled_two_point(d, x_critical(d) * 0.5, 1e6).is_err());
        assert!(double_scaled_two_point(d, x_critical(d) + 0.1, 1e6).is_ok());
    }
}
