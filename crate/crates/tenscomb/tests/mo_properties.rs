use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use tenscomb::mo_graphs::{
    double_tadpole, elementary_melon_mo, enumerate_mo_graphs, is_mo_bipartite, is_mo_melonic, mo_amplitude_exponent,
    mo_degree, twisted_sunshine, MoGraph,
};

fn half(n: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(2))
}

#[test]
fn face_count_determines_degree() {
    for v in 1..=3usize {
        for g in enumerate_mo_graphs(v) {
            let w = mo_degree(&g);
            let faces: usize = g.face_counts().iter().sum();
            assert_eq!(BigRational::from_integer(BigInt::from(faces as i64)), half(3 * v as i64) + half(6) - &w);
            assert!(w >= BigRational::zero());
            assert!((&w * BigRational::from_integer(BigInt::from(2))).is_integer());
            if !is_mo_bipartite(&g) {
                assert!(w >= half(1));
            }
            assert_eq!(w.is_zero(), is_mo_melonic(&g).unwrap());
        }
    }
}

#[test]
fn json_round_trip() {
    for g in enumerate_mo_graphs(2).into_iter().chain([double_tadpole(), twisted_sunshine(), elementary_melon_mo()]) {
        let text = serde_json::to_string(&g.to_json()).unwrap();
        let back = MoGraph::from_json(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(mo_degree(&back), mo_degree(&g));
        assert_eq!(back.face_counts(), g.face_counts());
    }
}

#[test]
fn fixtures() {
    assert_eq!(mo_degree(&double_tadpole()), half(1));
    assert_eq!(mo_degree(&twisted_sunshine()), half(4));
    assert_eq!(mo_degree(&elementary_melon_mo()), half(0));
    assert_eq!(mo_amplitude_exponent(&elementary_melon_mo()).unwrap(), half(6));
}
