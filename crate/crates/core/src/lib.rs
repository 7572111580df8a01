//! Variational pattern-state classification of credit-sales risk.
//!
//! Observations are min-max normalized, padded to eight features and
//! amplitude encoded into 3-qubit states. For each class the samples are
//! clustered and one ansatz circuit per cluster is trained so that its
//! measurement distribution matches the cluster. New samples are assigned to
//! the class whose pattern states lie within the acceptance thresholds.
//!
//! The [`qsim`] module is a small exact statevector simulator that the rest
//! of the crate builds on.

pub mod ansatz;
pub mod classify;
pub mod encoding;
pub mod entanglement;
pub mod error;
pub mod qsim;
pub mod training;

pub use ansatz::{AnsatzSpec, ParameterVector, Variant};
pub use classify::{ClassificationReport, DistanceMode, FinalClass, TrainedModel};
pub use encoding::{Dataset, EncodedSample, RawObservation};
pub use error::{Error, Result};
pub use qsim::{Circuit, Gate, ProbDist, StateVector};
pub use training::{OptimizerConfig, TrainConfig, TrainedCluster};

/// SplitMix64 finalizer; derives independent sub-seeds from a base seed.
pub fn mix_seed(base: u64, tag: u64) -> u64 {
    let mut z = base ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
