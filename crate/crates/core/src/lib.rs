//! Quantum machine-learning algorithms on an exact classical simulator.
//!
//! The crate is organised bottom-up:
//!
//! * [`qsim`]: dense state vectors, gates, Born-rule sampling and a 2×2
//!   density-matrix engine for single-qubit channels.
//! * [`encode`]: amplitude and angle encodings of classical vectors.
//! * [`qsub`]: SWAP-test fidelity/distance estimation and Grover-based
//!   minimum finding.
//! * [`qcluster`]: quantum KNN and k-means with classical baselines and
//!   cost models.
//! * [`ttn`]: tree-tensor-network variational classifiers.
//! * [`mlp`]: a small feed-forward network with backpropagation.
//! * [`tomo`]: single-qubit tomography: noise channels, maximum-likelihood
//!   reconstruction and network-based reconstruction.
//!
//! Every stochastic routine takes an explicit RNG or seed; see [`rng`].

pub mod dataset;
pub mod encode;
pub mod error;
pub mod mlp;
pub mod qcluster;
pub mod qsim;
pub mod qsub;
pub mod rng;
pub mod tomo;
pub mod ttn;

pub use error::{Error, Result};
