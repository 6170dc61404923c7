use tenscomb::gem_core::{contract_dipole, find_dipoles, gem_degree, three_bubble_genera};
use tenscomb::knot_gem::{
    knot_degree_bound, knot_report, knot_to_gem, parse_pd, raw_matches_simplified, KnotDiagram, KnotMode,
    FIGURE_EIGHT, HOPF, TREFOIL,
};

/// Torus knots T(2, q) as closed two-strand braids.
fn torus_knot_pd(q: i64) -> String {
    let m = 2 * q;
    let lab = |k: i64| (k - 1).rem_euclid(m) + 1;
    let xs: Vec<String> = (0..q)
        .map(|i| {
            let a = 2 * i + 1;
            format!("[{},{},{},{}]", lab(a), lab(a + q + 1), lab(a + 1), lab(a + q))
        })
        .collect();
    format!("[{}]", xs.join(","))
}

#[test]
fn standard_knots_in_both_modes() {
    for (code, n, components) in [(TREFOIL, 3, 1), (FIGURE_EIGHT, 4, 1), (HOPF, 2, 2)] {
        let diagram = parse_pd(code).unwrap();
        assert_eq!(diagram.crossing_count(), n);
        assert_eq!(diagram.components(), components);
        for (mode, per_crossing) in [(KnotMode::Simplified, 8), (KnotMode::Raw, 16)] {
            let (g, report) = knot_report(&diagram, mode).unwrap();
            assert_eq!(g.vertex_count(), per_crossing * n);
            assert_eq!(report.nonplanar_bubbles.len(), components);
            assert!(report.nonplanar_bubbles.iter().all(|b| b.genus == 1));
            assert_eq!(report.omega, gem_degree(&g).unwrap());
            if mode == KnotMode::Simplified {
                let (omega, bound) = knot_degree_bound(&diagram, &g).unwrap();
                assert!(omega <= bound);
            }
        }
        assert!(raw_matches_simplified(&diagram).unwrap());
    }
}

#[test]
fn torus_knot_family() {
    for q in [3, 5, 7] {
        let diagram = parse_pd(&torus_knot_pd(q)).unwrap();
        assert_eq!(diagram.components(), 1, "q = {q}");
        let g = knot_to_gem(&diagram, KnotMode::Simplified).unwrap();
        let (omega, bound) = knot_degree_bound(&diagram, &g).unwrap();
        assert!(omega <= bound);
        assert!(raw_matches_simplified(&diagram).unwrap());
    }
}

#[test]
fn torus_survives_one_dipole_contraction() {
    for mode in [KnotMode::Simplified, KnotMode::Raw] {
        let mut g = knot_to_gem(&parse_pd(FIGURE_EIGHT).unwrap(), mode).unwrap();
        while let Some(dip) = find_dipoles(&g, 1).unwrap().into_iter().next() {
            g = contract_dipole(&g, &dip).unwrap();
            let tori = three_bubble_genera(&g).unwrap().iter().filter(|(_, genus)| *genus == 1).count();
            assert_eq!(tori, 1);
        }
    }
}

#[test]
fn bad_codes() {
    assert!(parse_pd("[]").is_err());
    assert!(parse_pd("[[1,2,3]]").is_err());
    assert!(parse_pd("[[1,1,1,1]]").is_err());
    assert!(KnotDiagram::new(vec![[1, 2, 3, 4], [1, 2, 3, 4], [5, 5, 6, 6]]).is_err());
}
