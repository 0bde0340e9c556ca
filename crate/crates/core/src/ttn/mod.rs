//! Tree-tensor-network classifiers.
//!
//! Features are rescaled into `[0, π/2]` and angle-encoded one per qubit. The
//! tree pairs neighbouring live qubits `(a, b)`; each block applies
//! `RY(θ)` to both and then `CNOT(a → b)`, after which only `b` stays live.
//! Levels repeat until one qubit remains, which gets a final `RY` and is
//! read out. Four features therefore use seven angles:
//!
//! ```text
//! q0 ─RY(θ₁)─●──────────────────────────
//! q1 ─RY(θ₂)─X─RY(θ₅)─●─────────────────
//! q2 ─RY(θ₃)─●────────┼─────────────────
//! q3 ─RY(θ₄)─X─RY(θ₆)─X─RY(θ₇)─ measure
//! ```

mod model;
mod multiclass;
mod shots;
mod train;

pub use model::{theta_count, tree_gates, ttn_predict, TtnModel};
pub use multiclass::{argmax, multiclass_train, MulticlassTtnModel};
pub use shots::{shot_accuracy_curve, ShotAccuracy};
pub use train::{accuracy, ttn_train, EpochLoss, TrainConfig, TrainOutcome};
