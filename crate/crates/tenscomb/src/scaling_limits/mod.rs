//! Saddle-point observables, the covariance operator and double scaling.

mod cherry;
mod covariance;
mod ifmap;
mod saddle;

use thiserror::Error;

use crate::melonic_series::SeriesError;

pub use cherry::{
    cherry_amplitude, cherry_limit, cherry_sum_limit, double_scaled_two_point, rescaled_z, x_critical, z_critical,
};
pub use covariance::{covariance_operator, CovarianceOperator};
pub use ifmap::{
    map_n_exponent, prune_map, random_map, reduce_map, reduced_amplitude, EdgeLabel, IfMap, IfMapJson, ReducedEdge,
    ReducedGraph,
};
pub use saddle::{
    lo_observables, nnlo_closed_form, nnlo_two_point_d3, nnlo_via_dictionary, saddle_alpha, LoObservables, SaddleContext,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalingError {
    #[error("point outside the domain: {0}")]
    OutsideDomain(String),
    #[error("denominator vanishes at {0}")]
    PoleHit(String),
    #[error("covariance operator is singular: {0}")]
    SingularCovariance(String),
    #[error("invalid intermediate-field map: {0}")]
    InvalidMap(String),
    #[error("independent routes disagree: {0}")]
    MismatchedRoutes(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

impl ScalingError {
    pub fn is_internal(&self) -> bool {
        matches!(self, ScalingError::MismatchedRoutes(_))
    }
}
