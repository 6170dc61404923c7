//! Combinatorics and analytic evaluators for colored random tensor models.
//!
//! The crate is split by topic: [`gem_core`] holds edge-colored graphs and
//! their invariants, [`mo_graphs`] the multi-orientable stranded graphs,
//! [`melonic_series`] exact power series, [`gaussian_oracle`] brute-force Wick
//! moments, [`scaling_limits`] saddle-point and double-scaling closed forms,
//! [`loop_solver`] the resolvents, and [`knot_gem`] the knot-complement
//! construction. [`verify`] bundles the acceptance suite used by the CLI.

pub mod cli;
pub mod error;
pub mod gaussian_oracle;
pub mod gem_core;
pub mod knot_gem;
pub mod loop_solver;
pub mod melonic_series;
pub mod mo_graphs;
pub mod report;
pub mod scaling_limits;
pub mod verify;

pub use error::{Error, ErrorKind};


