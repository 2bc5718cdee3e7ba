//! Compressive sampling with chaotic and random measurement matrices.
//!
//! The crate is organized bottom-up:
//!
//! * [`dynamics`]: RK4 integration of the Chua, Lorenz and Rössler systems.
//! * [`ensembles`]: scalar sequences (chaotic trajectories and random
//!   processes) used to fill measurement matrices.
//! * [`sensing`]: columnwise matrix construction with `1/(σ√M)` scaling,
//!   sparse ±1 test signals and measurements `y = Φx`.
//! * [`l1solver`]: basis pursuit `min ‖s‖₁ s.t. Θs = y` via a primal-dual
//!   interior-point method.
//! * [`analysis`]: autocorrelation, densities, coherence, brute-force RIP
//!   constants and the Monte Carlo recovery experiments.
//!
//! Everything is deterministic given a seed; see [`seed`] for how per-trial
//! streams are derived.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod ensembles;
mod error;
pub mod l1solver;
pub mod seed;
pub mod sensing;
mod sequence;
pub mod trials;

pub use dynamics::{
    ChuaParams, Coordinate, IntegratorConfig, LorenzParams, RosslerParams, State3, System, SystemKind, Trajectory,
};
pub use ensembles::{ChaoticSource, SequenceKind, SequenceSpec};
pub use error::{Error, Result};
pub use l1solver::{BpProblem, BpSolution, SolveStatus, SolverConfig};
pub use sensing::{MeasurementMatrix, MeasurementVector, SparseSignal};
pub use sequence::{Sequence, SequenceSource};
