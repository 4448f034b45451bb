//! Two discrete-time quantum walkers on parallel lines whose joint state
//! acquires position-dependent gravitational phases.
//!
//! * [`walk`]: single-walker coin/shift dynamics.
//! * [`gravity`]: phase field `g_ij(t)` and the phased joint state.
//! * [`entanglement`]: partial traces, partial transposes, entropy, negativity.
//! * [`perturbative`]: small-phase diagnostics of the reduced spectrum.
//! * [`noise`]: flip noise on walker A as a trajectory ensemble.
//! * [`experiment`]: configuration, experiment drivers and table output.

pub mod entanglement;
pub mod error;
pub mod experiment;
pub mod gravity;
pub mod linalg;
pub mod noise;
pub mod perturbative;
pub mod walk;

pub use entanglement::{
    entanglement_entropy, entanglement_report, negativity, partial_transpose,
    pure_state_negativity, reduce_density, DensityMatrix, EntanglementReport, Subsystem,
};
pub use error::{Error, Result};
pub use gravity::{
    build_joint_state, mass_from_theta, pair_distance, phase_at, GeometrySpec, JointState,
    MassPair, PhaseField,
};
pub use noise::{
    ensemble_joint_density, kraus_joint_density, noisy_walk, NoiseKind, NoiseSpec,
    TrajectoryEnsemble,
};
pub use perturbative::{perturbation_correction, second_moment_functional};
pub use walk::{evolve, Coin, CoinSpec, PositionDistribution, Spin, SpinState, WalkState};
