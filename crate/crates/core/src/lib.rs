//! Simulation and verification of wide feedforward networks whose weights
//! share per-node random variances, and of their infinite-width limits
//! (mixtures of Gaussian processes driven by Poisson point processes).

pub mod activation;
pub mod dist;
pub mod error;
pub mod experiments;
pub mod harness;
pub mod kernels;
pub mod levy;
pub mod linalg;
pub mod network;
pub mod pruning;
pub mod quad;
pub mod rng;
pub mod special;
pub mod stats;
pub mod variance;

pub use activation::ActivationKind;
pub use error::{Error, Result};
pub use levy::{LevyTriple, Measure, PointProcessSample};
pub use rng::RngStream;
pub use stats::ExperimentReport;
pub use network::{NetworkConfig, NetworkRealization};
pub use variance::{make_model, ModelSpec, VarianceModel};
