//! K-means clustering for data with missing elements.
//!
//! [`lloyd`] is the standard assign/update loop. [`mm`] runs the same loop on a working
//! copy of the data whose unobserved coordinates are re-imputed from the assigned centroid
//! after every update, a majorize-minimize scheme for the observed-coordinate objective.
//! [`synth`] builds the benchmark datasets and missingness masks, [`metrics`] scores
//! partitions, and [`harness`] wires everything into reproducible experiments.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`). The aliases below pin the
//! common `f64` instantiation.

pub mod error;
pub mod harness;
pub mod lloyd;
pub mod metrics;
pub mod mm;
pub mod model;
pub mod rng;
pub mod scalar;
pub mod synth;

pub use error::{ClusterError, Result};
pub use lloyd::{
    assign_step, centroid_update_step, init_random_samples, lloyd_from, run_lloyd,
    run_lloyd_restarts, LloydResult,
};
pub use mm::{
    impute_step, init_fully_observed, initial_imputation, run_mm, run_mm_restarts,
    run_mm_with_state, CompletedDataset,
};
pub use model::{
    majorizer, objective_complete, objective_observed, squared_distance, Assignment,
    ClusterModel, Dataset, IterationRecord, ObservationMask, RunConfig, RunTrace,
};
pub use scalar::Scalar;

pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type ClusterModel64 = ClusterModel<f64>;
pub type ClusterModel32 = ClusterModel<f32>;
pub type LloydResult64 = LloydResult<f64>;
pub type LloydResult32 = LloydResult<f32>;
pub type RunTrace64 = RunTrace<f64>;
