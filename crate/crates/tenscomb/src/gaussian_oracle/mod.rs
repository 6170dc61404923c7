//! Brute-force Gaussian moments: Wick pairings of tensor invariants, matrix
//! traces, the Hermite dictionary and a low-dimensional quadrature check.

mod hermite;
mod laurent;
mod matrix;
mod quadrature;
mod wick;

use thiserror::Error;

use crate::gem_core::GemError;

pub use hermite::{
    eval_f64 as hermite_eval, expansion_closed_form, hermite_basis, monomial_expansion, quarter_inverse_coefficient,
    quarter_inverse_is_consistent, recombine, Poly, HERMITE_DEGREE_LIMIT,
};
pub use laurent::LaurentPoly;
pub use matrix::{matrix_gaussian_moment, matrix_gaussian_moment_poly, MATRIX_POWER_LIMIT};
pub use quadrature::{hermite_relation_quadrature, QuadratureCheck};
pub use wick::{
    fold_pairings, index_sum_moment, leading_coefficient, order_two_invariant, pairing_exponent,
    perturbative_two_point, quartic_melonic, tensor_gaussian_moment, union_of, zero_faces, Convention, MomentRequest,
    MomentResult, PERTURBATIVE_ORDER_LIMIT, SYMBOLIC_VERTEX_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{white} white vs {black} black vertices")]
    ParityMismatch { white: usize, black: usize },
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("odd power {0} has vanishing moment")]
    OddPower(u32),
    #[error("quadrature did not converge on the {0}")]
    QuadratureNotConverged(String),
    #[error("invariant of rank {got}, expected {expected}")]
    RankMismatch { expected: usize, got: usize },
    #[error("expected an invariant: color 0 open, colors 1..=d closed")]
    NotAnInvariant,
    #[error("{0}")]
    InvalidArgument(String),
    #[error("independent routes disagree: {0}")]
    MismatchedRoutes(String),
    #[error(transparent)]
    Gem(#[from] GemError),
}

impl OracleError {
    pub fn is_internal(&self) -> bool {
        match self {
            OracleError::MismatchedRoutes(_) => true,
            OracleError::Gem(e) => e.is_internal(),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::melonic_series::{int, rat};

    fn moment(d: usize, invs: Vec<crate::gem_core::ColoredGraph>, n: Option<u64>) -> MomentResult {
        tensor_gaussian_moment(&MomentRequest { d, n, invariants: invs, convention: Convention::Scaled }).unwrap()
    }

    #[test]
    fn order_two() {
        for d in 2..=5 {
            let r = moment(d, vec![order_two_invariant(d)], Some(3));
            assert_eq!(r.poly, LaurentPoly::monomial(1, int(1)));
            assert_eq!(r.value, Some(int(3)));
        }
    }

    #[test]
    fn quartic_melonic_moments() {
        let r = moment(3, vec![quartic_melonic(3, 1)], Some(2));
        assert_eq!(r.poly.coeff(1), int(1));
        assert_eq!(r.poly.coeff(0), int(1));
        assert_eq!(r.index_sum, Some(int(3)));
        let r = moment(4, vec![quartic_melonic(4, 2)], Some(3));
        assert_eq!(r.poly.coeff(1), int(1));
        assert_eq!(r.poly.coeff(-1), int(1));
        assert_eq!(r.index_sum, Some(rat(10, 3)));
    }

    #[test]
    fn product_matches_index_sum() {
        let invs = vec![quartic_melonic(3, 1), quartic_melonic(3, 2)];
        let r = moment(3, invs, Some(2));
        assert_eq!(r.index_sum, r.value);
    }

    #[test]
    fn parity_mismatch() {
        let g = crate::gem_core::ColoredGraph::invariant(
            1,
            &[crate::gem_core::Vertex { id: 0, parity: crate::gem_core::Parity::White }],
            &[],
        );
        if let Ok(g) = g {
            let err = tensor_gaussian_moment(&MomentRequest { d: 1, n: None, invariants: vec![g], convention: Convention::Scaled });
            assert!(err.is_err());
        }
    }

    #[test]
    fn perturbative_leading_terms() {
        let coeffs = perturbative_two_point(3, 2).unwrap();
        assert_eq!(coeffs[0].coeff(0), int(1));
        assert_eq!(coeffs[1].coeff(0), int(-6));
        assert_eq!(coeffs[2].coeff(0), int(72));
    }
}
