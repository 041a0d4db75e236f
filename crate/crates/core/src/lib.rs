//! Reinforcement-learning eigensolver for one- and two-spin Hamiltonians
//! on a simulated noisy quantum device.
//!
//! The crate splits into five largely independent layers:
//!
//! - [`qsim`] — exact density-matrix simulation of 1–4 qubit registers:
//!   three-angle rotations and CNOT, Kraus noise channels (depolarizing,
//!   amplitude damping, phase damping), classical readout error, and
//!   shot-by-shot sampling.
//! - [`observables`] — measurement planning, Pauli correlator estimation,
//!   spin-Hamiltonian energies and the total-spin sum rule with its
//!   local-moment energy correction.
//! - [`mlp`] — the one-hidden-layer action-value network with hand-rolled
//!   backpropagation and per-weight adaptive gains.
//! - [`agent`] — the multi-network Q-learning agent that lowers a state's
//!   energy by appending gates to a circuit, plus training, evaluation and
//!   JSON checkpointing.
//! - [`vqe`] — a fixed-ansatz variational eigensolver baseline for the
//!   dimer with calibrated-step gradient descent.
//!
//! All numeric code is generic over the scalar type through
//! [`scalar::Real`]; this module exports `f64` aliases, which is what the
//! command-line tools use. Every stochastic routine takes an explicit
//! generator (see [`seeded_rng`]), making full runs reproducible bit for
//! bit from a config and a seed.

pub mod agent;
pub mod error;
pub mod kvfile;
pub mod mlp;
pub mod observables;
pub mod qsim;
pub mod rng;
pub mod scalar;
pub mod vqe;

pub use error::{Error, Result};
pub use qsim::{MeasurementOutcome, ShotMode};
pub use observables::{Axis, BasisSetting, PAIR_ORDER};
pub use agent::{ActionSetSpec, AgentCheckpoint};
pub use mlp::{GainsData, NetworkData};
pub use rng::{derive_seed, seeded_rng};

/// Double-precision register state.
pub type DensityState = qsim::DensityState<f64>;
/// Double-precision noise profile.
pub type NoiseModel = qsim::NoiseModel<f64>;
/// Double-precision single-qubit gate.
pub type Unitary1Q = qsim::Unitary1Q<f64>;
/// Double-precision two-qubit gate.
pub type Unitary2Q = qsim::Unitary2Q<f64>;
/// Double-precision gate of either arity.
pub type Gate = qsim::Gate<f64>;
/// Double-precision correlator vector.
pub type CorrelatorVector = observables::CorrelatorVector<f64>;
/// Double-precision Hamiltonian.
pub type Hamiltonian = observables::Hamiltonian<f64>;
/// Double-precision sum-rule correction result.
pub type LocalMomentCorrection = observables::LocalMomentCorrection<f64>;
/// Double-precision action-value network.
pub type QNetwork = mlp::QNetwork<f64>;
/// Double-precision network update components.
pub type Gradients = mlp::Gradients<f64>;
/// Double-precision action alphabet.
pub type ActionSet = agent::ActionSet<f64>;
/// Double-precision action.
pub type GateAction = agent::GateAction<f64>;
/// Double-precision replay memory.
pub type ReplayMemory = agent::ReplayMemory<f64>;
/// Double-precision stored transition.
pub type Transition = agent::Transition<f64>;
/// Double-precision exploration schedule.
pub type EpsilonSchedule = agent::EpsilonSchedule<f64>;
/// Double-precision agent.
pub type Agent = agent::Agent<f64>;
/// Double-precision training configuration.
pub type TrainConfig = agent::TrainConfig<f64>;
/// Double-precision training output.
pub type TrainOutput = agent::TrainOutput<f64>;
/// Double-precision per-episode training record.
pub type EpisodeMetrics = agent::EpisodeMetrics<f64>;
/// Double-precision circuit episode.
pub type Episode = agent::Episode<f64>;
/// Double-precision evaluation configuration.
pub type EvalConfig = agent::EvalConfig<f64>;
/// Double-precision evaluated episode.
pub type EvalEpisode = agent::EvalEpisode<f64>;
/// Double-precision optimizer configuration.
pub type VqeConfig = vqe::VqeConfig<f64>;
/// Double-precision optimizer trajectory row.
pub type VqeIterate = vqe::VqeIterate<f64>;
