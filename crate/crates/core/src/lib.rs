//! Effective resistance, biharmonic distance and total resistance of simple
//! graphs, closed-form oversquashing bounds built on them, and greedy
//! edge insertion that minimises total resistance with exact `O(n^2)`
//! incremental updates.
//!
//! The numeric code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below pin the common double-precision instantiations.
//!
//! ```
//! use resist::{gtr, Graph};
//!
//! let plan = gtr::<f64>(&Graph::path(5), 2).unwrap();
//! assert_eq!(plan.edges()[0], (0, 4));
//! assert!((plan.rtot_final() - 90.0 / 11.0).abs() < 1e-9);
//! ```

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod flow;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod random;
pub mod rewiring;
pub mod scalar;
pub mod spectral;
pub mod state;
pub mod verify;

pub use bounds::{
    jacobian_bound_adjacency, jacobian_bound_resistance, spectral_gap_jacobian_bound, total_jacobian_bound, BoundParams,
};
pub use error::{Error, Result};
pub use flow::effective_resistance_flow;
pub use graph::{Edge, Graph};
pub use linalg::{DenseMatrix, SymMatrix};
pub use rewiring::{
    brute_force_optimal, gtr, nonmonotonicity_witness, nonmonotonicity_witness_for, random_baseline, resistance_curve,
    Method, OptimalSet, RewirePlan,
};
pub use scalar::Scalar;
pub use spectral::{
    biharmonic_distance_sq, effective_resistance, effective_resistance_normalized, mu_bound, regularized_inverse,
    resistance_series_truncated, rmax, spectral_gap, total_resistance, Spectrum,
};
pub use state::{PairScore, ResistanceState};

pub type Matrix = SymMatrix<f64>;
pub type Spectrum64 = Spectrum<f64>;
pub type State = ResistanceState<f64>;
pub type Plan = RewirePlan<f64>;
pub type Params = BoundParams<f64>;
pub type State32 = ResistanceState<f32>;
