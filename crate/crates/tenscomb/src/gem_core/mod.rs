//! Edge-colored graphs (GEMs) and their invariants.

mod dipole;
mod enumerate;
mod graph;
mod invariants;
pub mod json;

use thiserror::Error;

pub use dipole::{contract_dipole, create_dipole, find_dipoles, is_melonic, reduce_by_d_dipoles, Dipole};
pub use enumerate::{
    automorphism_count, canonical_code, enumerate_closed, enumerate_connected_unique, from_matchings, isomorphic,
    random_closed, AUTOMORPHISM_LIMIT,
};
pub use graph::{elementary_melon, ColoredGraph, Edge, HalfEdge, Parity, Vertex};
pub use invariants::{
    amplitude_exponent, bubble_genera, bubbles, enumerate_jackets, gem_degree, is_manifold_3d, jacket_cycles,
    jacket_genus, three_bubble_genera, Bubble, Face, Jacket,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GemError {
    #[error("rank must be at least 1")]
    InvalidRank,
    #[error("vertex {vertex} carries two edges of color {color}")]
    ColorClash { vertex: usize, color: usize },
    #[error("edge ({white}, {black}) of color {color} does not join a white vertex to a black vertex")]
    NotBipartite { white: usize, black: usize, color: usize },
    #[error("vertex {vertex} has no edge of color {color}")]
    NotRegular { vertex: usize, color: usize },
    #[error("reference to undeclared vertex {0}")]
    DanglingReference(usize),
    #[error("vertex id {0} declared twice")]
    DuplicateVertex(usize),
    #[error("color {color} outside 0..={d}")]
    ColorOutOfRange { color: usize, d: usize },
    #[error("{white} white vs {black} black vertices")]
    UnbalancedParity { white: usize, black: usize },
    #[error("graph has open half-edges")]
    NotClosed,
    #[error("graph is not connected")]
    NotConnected,
    #[error("non-integral genus from V={vertices}, E={edges}, F={faces}")]
    NonIntegralGenus { vertices: usize, edges: usize, faces: usize },
    #[error("independent routes disagree: {route_a} vs {route_b}")]
    MismatchedRoutes { route_a: String, route_b: String },
    #[error("invalid dipole: {0}")]
    InvalidDipole(String),
    #[error("expected rank {expected}, got {got}")]
    WrongRank { expected: usize, got: usize },
    #[error("{vertices} vertices exceeds the limit of {limit}")]
    TooLarge { vertices: usize, limit: usize },
}

impl GemError {
    /// Errors that can only come from a bug rather than from bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, GemError::NonIntegralGenus { .. } | GemError::MismatchedRoutes { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn melon_with_2dipole(d: usize) -> ColoredGraph {
        create_dipole(&elementary_melon(d), 0, &[0, 1]).unwrap()
    }

    #[test]
    fn melon_builds_and_has_degree_zero() {
        for d in 2..=5 {
            let g = elementary_melon(d);
            assert_eq!(g.vertex_count(), 2);
            assert_eq!(gem_degree(&g).unwrap(), 0);
        }
    }

    #[test]
    fn same_color_twice_is_a_clash() {
        let err = ColoredGraph::from_triples(3, &[(0, 1, 1), (0, 1, 1)]).unwrap_err();
        assert_eq!(err, GemError::ColorClash { vertex: 0, color: 1 });
    }

    #[test]
    fn missing_color_is_not_regular() {
        let err = ColoredGraph::from_triples(3, &[(0, 1, 0), (0, 1, 1), (0, 1, 2)]).unwrap_err();
        assert!(matches!(err, GemError::NotRegular { color: 3, .. }));
    }

    #[test]
    fn dangling_and_bipartite_checks() {
        let vs = [Vertex { id: 0, parity: Parity::White }, Vertex { id: 1, parity: Parity::Black }];
        let err = ColoredGraph::build(1, &vs, &[Edge { white: 0, black: 7, color: 0 }], &[]).unwrap_err();
        assert_eq!(err, GemError::DanglingReference(7));
        let err = ColoredGraph::build(1, &vs, &[Edge { white: 1, black: 0, color: 0 }], &[]).unwrap_err();
        assert!(matches!(err, GemError::NotBipartite { .. }));
    }

    #[test]
    fn jacket_counts() {
        assert_eq!(enumerate_jackets(&elementary_melon(2)).unwrap().len(), 1);
        assert_eq!(enumerate_jackets(&elementary_melon(3)).unwrap().len(), 3);
        assert_eq!(enumerate_jackets(&elementary_melon(4)).unwrap().len(), 12);
        assert_eq!(enumerate_jackets(&elementary_melon(5)).unwrap().len(), 60);
    }

    #[test]
    fn jacket_cycles_are_normalized() {
        for c in jacket_cycles(4) {
            assert_eq!(c[0], 0);
            let mut rev = vec![0];
            rev.extend(c[1..].iter().rev());
            assert!(c <= rev);
        }
    }

    #[test]
    fn two_dipole_degrees() {
        assert_eq!(gem_degree(&melon_with_2dipole(3)).unwrap(), 1);
        assert_eq!(gem_degree(&melon_with_2dipole(4)).unwrap(), 6);
        assert_eq!(amplitude_exponent(&melon_with_2dipole(3)).unwrap(), 2);
        assert_eq!(amplitude_exponent(&elementary_melon(3)).unwrap(), 3);
        assert_eq!(amplitude_exponent(&elementary_melon(4)).unwrap(), 4);
    }

    #[test]
    fn bubbles_of_melon_and_union() {
        let m = elementary_melon(3);
        assert_eq!(bubbles(&m, &[1, 2, 3]).len(), 1);
        assert_eq!(bubbles(&m, &[1, 2]), vec![Bubble { colors: vec![1, 2], vertices: vec![0, 1] }]);
        let two = m.disjoint_union(&m).unwrap();
        assert_eq!(bubbles(&two, &[0, 1, 2, 3]).len(), 2);
    }

    #[test]
    fn dipoles_and_contraction() {
        let m = elementary_melon(3);
        assert!(find_dipoles(&m, 3).unwrap().is_empty());
        let g = create_dipole(&m, 0, &[1, 2, 3]).unwrap();
        let dips = find_dipoles(&g, 3).unwrap();
        assert!(!dips.is_empty());
        let back = contract_dipole(&g, &dips[0]).unwrap();
        assert!(isomorphic(&back, &m));

        let six = create_dipole(&g, 2, &[0, 1, 2]).unwrap();
        assert_eq!(six.vertex_count(), 6);
        assert!(is_melonic(&six).unwrap());
        let dip = find_dipoles(&six, 3).unwrap().remove(0);
        let four = contract_dipole(&six, &dip).unwrap();
        assert_eq!(four.vertex_count(), 4);
        assert!(is_melonic(&four).unwrap());

        let two = m.disjoint_union(&g).unwrap();
        for dip in find_dipoles(&two, 3).unwrap() {
            let (w, b) = (two.position(dip.white).unwrap(), two.position(dip.black).unwrap());
            assert!(w >= 2 && b >= 2);
        }
    }

    #[test]
    fn same_bubble_pair_is_not_a_dipole() {
        // the pair (0,1) shares colors 0 and 1; colors {2,3} still connect them
        let g = ColoredGraph::from_triples(
            3,
            &[
                (0, 1, 0), (0, 1, 1), (0, 3, 2), (0, 5, 3),
                (2, 3, 3), (2, 1, 2), (2, 5, 0), (2, 5, 1),
                (4, 1, 3), (4, 5, 2), (4, 3, 0), (4, 3, 1),
            ],
        )
        .unwrap();
        let dips = find_dipoles(&g, 2).unwrap();
        assert!(dips.iter().all(|d| !(d.white == 0 && d.black == 1)));
        assert!(matches!(
            contract_dipole(&g, &Dipole { white: 0, black: 1, colors: vec![0, 1] }),
            Err(GemError::InvalidDipole(_))
        ));
    }

    #[test]
    fn melonicity() {
        assert!(is_melonic(&elementary_melon(3)).unwrap());
        assert!(!is_melonic(&melon_with_2dipole(3)).unwrap());
    }

    #[test]
    fn automorphisms() {
        let m = elementary_melon(3);
        assert_eq!(automorphism_count(&m).unwrap(), 1);
        assert_eq!(automorphism_count(&m.disjoint_union(&m).unwrap()).unwrap(), 2);
        assert_eq!(automorphism_count(&elementary_melon(2)).unwrap(), 1);
        let ident: Vec<usize> = (0..9).collect();
        let big = from_matchings(1, &[ident.clone(), ident]);
        assert!(matches!(automorphism_count(&big), Err(GemError::TooLarge { .. })));
    }

    #[test]
    fn manifold_criterion() {
        assert!(is_manifold_3d(&elementary_melon(3)).unwrap());
        assert!(matches!(is_manifold_3d(&elementary_melon(4)), Err(GemError::WrongRank { .. })));
    }
}
