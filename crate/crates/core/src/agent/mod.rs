//! Multi-network Q-learning agent that builds circuits gate by gate.
//!
//! One action-value network per action: selecting greedily means running
//! every network forward on the current correlator vector and taking the
//! argmax (first index wins ties). Learning follows the classic pattern of
//! replayed one-step targets against a slowly refreshed copy of the
//! networks:
//!
//! ```text
//! y = r                                  if the transition ended the episode
//! y = clip(r + gamma * max_a Q^(s', a))  otherwise, clipped to [-1, 1]
//! ```
//!
//! where `Q^` is the target copy, refreshed from the online networks every
//! `target_update_period` gradient steps. Rewards are energy drops
//! `E_t - E_{t+1}`, so a positive return means the circuit lowered the
//! energy.
//!
//! An *episode* starts from |0..0> plus a random rotation (two antiparallel
//! random rotations for the dimer), measures the correlator vector, then
//! lets the agent append a fixed budget of gates, measuring after each one.
//! The exploration rate anneals over a global measurement counter that
//! includes these initial-state measurements.

mod actions;
mod memory;

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mlp::{NetworkData, QNetwork};
use crate::observables::{estimate_correlators, CorrelatorVector, Hamiltonian};
use crate::qsim::{DensityState, NoiseModel, ShotMode};
use crate::rng::{derive_seed, seeded_rng};
use crate::scalar::{real, Real};

pub use actions::{ActionKind, ActionSet, ActionSetSpec, GateAction};
pub use memory::{EpsilonSchedule, ReplayMemory, Transition};

/// Everything a training run needs. `defaults` fills in the values used
/// throughout this project; fields are public so experiments can deviate.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig<R: Real> {
    pub hamiltonian: Hamiltonian<R>,
    pub noise: NoiseModel<R>,
    pub shot_mode: ShotMode,
    /// Training passes; each pass plays `circuits_per_epoch` episodes.
    pub epochs: usize,
    pub circuits_per_epoch: usize,
    /// Gate budget per episode.
    pub gates_per_circuit: usize,
    /// Hidden units per action-value network.
    pub n_hidden: usize,
    /// Global learning rate.
    pub alpha: R,
    /// Reward discount.
    pub gamma: R,
    pub replay_capacity: usize,
    /// Transitions replayed per gradient step (the classic setting is 1).
    pub batch_size: usize,
    /// Gradient steps between target-network refreshes.
    pub target_update_period: u64,
    pub epsilon: EpsilonSchedule<R>,
    /// Base rotation angle of the action menu.
    pub delta: R,
    pub include_random_rotation: bool,
    pub seed: u64,
}

impl<R: Real> TrainConfig<R> {
    /// Project defaults for a Hamiltonian: 32 hidden units and rotation
    /// step 0.5 rad for one spin, 64 and 1.0 rad for the dimer; 100
    /// circuits of 10 gates per epoch, 300 epochs; replay capacity 32,
    /// batch 1, discount 0.99, learning rate 0.05, target refresh every
    /// 500 steps; exploration 1 -> 0.05 over the first `10 * gates`
    /// measurements.
    pub fn defaults(hamiltonian: Hamiltonian<R>, seed: u64) -> Self {
        let one_qubit = hamiltonian.n_qubits() == 1;
        let gates_per_circuit = 10;
        TrainConfig {
            hamiltonian,
            noise: NoiseModel::off(),
            shot_mode: ShotMode::Shots(1024),
            epochs: 300,
            circuits_per_epoch: 100,
            gates_per_circuit,
            n_hidden: if one_qubit { 32 } else { 64 },
            alpha: real(0.05),
            gamma: real(0.99),
            replay_capacity: 32,
            batch_size: 1,
            target_update_period: 500,
            epsilon: EpsilonSchedule {
                initial: R::one(),
                final_value: real(0.05),
                anneal_measurements: 10 * gates_per_circuit as u64,
            },
            delta: if one_qubit { real(0.5) } else { real(1.0) },
            include_random_rotation: false,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        EpsilonSchedule::new(
            self.epsilon.initial,
            self.epsilon.final_value,
            self.epsilon.anneal_measurements,
        )?;
        let positive = |name: &str, ok: bool| -> Result<()> {
            if !ok {
                return Err(Error::InvalidConfig(format!("{name} must be positive")));
            }
            Ok(())
        };
        positive("epochs", self.epochs > 0)?;
        positive("circuits_per_epoch", self.circuits_per_epoch > 0)?;
        positive("gates_per_circuit", self.gates_per_circuit > 0)?;
        positive("n_hidden", self.n_hidden > 0)?;
        positive("batch_size", self.batch_size > 0)?;
        positive("replay_capacity", self.replay_capacity > 0)?;
        positive("target_update_period", self.target_update_period > 0)?;
        positive("alpha", self.alpha > R::zero())?;
        positive("delta", self.delta > R::zero())?;
        if !(self.gamma >= R::zero() && self.gamma <= R::one()) {
            return Err(Error::InvalidConfig(format!(
                "gamma must lie in [0, 1], got {}",
                self.gamma
            )));
        }
        if let ShotMode::Shots(0) = self.shot_mode {
            return Err(Error::InvalidShots);
        }
        Ok(())
    }
}

/// The agent: one online and one target network per action.
#[derive(Debug, Clone)]
pub struct Agent<R: Real> {
    actions: ActionSet<R>,
    online: Vec<QNetwork<R>>,
    target: Vec<QNetwork<R>>,
    gamma: R,
    alpha: R,
    target_update_period: u64,
    updates: u64,
}

impl<R: Real> Agent<R> {
    /// Fresh agent with randomly initialized networks, one per action,
    /// created in action order from the given generator.
    pub fn new(
        actions: ActionSet<R>,
        n_inp: usize,
        n_hidden: usize,
        gamma: R,
        alpha: R,
        target_update_period: u64,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let online: Vec<QNetwork<R>> = (0..actions.len())
            .map(|_| QNetwork::new_random(n_inp, n_hidden, rng))
            .collect::<Result<_>>()?;
        let target = online.clone();
        Ok(Agent {
            actions,
            online,
            target,
            gamma,
            alpha,
            target_update_period,
            updates: 0,
        })
    }

    pub fn actions(&self) -> &ActionSet<R> {
        &self.actions
    }

    /// Gradient steps taken so far.
    pub fn updates(&self) -> u64 {
        self.updates
    }

    /// Online action values for a state, in action order.
    pub fn q_values(&self, state: &CorrelatorVector<R>) -> Result<Vec<R>> {
        self.online
            .iter()
            .map(|net| net.forward(state.as_slice()))
            .collect()
    }

    /// Index of the best online action value; ties go to the lower index.
    pub fn greedy_action(&self, state: &CorrelatorVector<R>) -> Result<usize> {
        let q = self.q_values(state)?;
        let mut best = 0;
        for (i, &v) in q.iter().enumerate().skip(1) {
            if v > q[best] {
                best = i;
            }
        }
        Ok(best)
    }

    /// Epsilon-greedy selection: one uniform draw decides explore/exploit,
    /// and exploration draws one action index uniformly.
    pub fn select_action(
        &self,
        state: &CorrelatorVector<R>,
        epsilon: R,
        rng: &mut impl Rng,
    ) -> Result<usize> {
        if real::<R>(rng.random::<f64>()) < epsilon {
            Ok(rng.random_range(0..self.actions.len()))
        } else {
            self.greedy_action(state)
        }
    }

    /// Largest target-network value at a state.
    pub fn max_target_q(&self, state: &CorrelatorVector<R>) -> Result<R> {
        let mut best = R::neg_infinity();
        for net in &self.target {
            best = best.max(net.forward(state.as_slice())?);
        }
        Ok(best)
    }

    /// Replays `batch_size` uniformly sampled transitions, updating the
    /// sampled action's network toward the clipped one-step target after
    /// each draw, and refreshes the target copies on schedule.
    pub fn learn_step(
        &mut self,
        memory: &ReplayMemory<R>,
        batch_size: usize,
        rng: &mut impl Rng,
    ) -> Result<()> {
        for _ in 0..batch_size {
            let transition = memory.sample(rng)?;
            let y_raw = if transition.terminal {
                transition.reward
            } else {
                transition.reward + self.gamma * self.max_target_q(&transition.next_state)?
            };
            let y = y_raw.min(R::one()).max(-R::one());
            let grads = self.online[transition.action].backward(transition.state.as_slice(), y)?;
            self.online[transition.action].apply_update(&grads, self.alpha)?;
            self.updates += 1;
            if self.updates % self.target_update_period == 0 {
                self.target = self.online.clone();
            }
        }
        Ok(())
    }

    /// Serializable snapshot of the whole agent.
    pub fn to_checkpoint(&self) -> AgentCheckpoint {
        AgentCheckpoint {
            version: CHECKPOINT_FORMAT_VERSION,
            actions: self.actions.spec(),
            action_labels: self.actions.labels(),
            gamma: self.gamma.to_f64().unwrap_or(f64::NAN),
            alpha: self.alpha.to_f64().unwrap_or(f64::NAN),
            target_update_period: self.target_update_period,
            updates: self.updates,
            online: self.online.iter().map(QNetwork::to_data).collect(),
            target: self.target.iter().map(QNetwork::to_data).collect(),
        }
    }

    /// Rebuilds an agent from a snapshot, validating internal consistency.
    pub fn from_checkpoint(data: &AgentCheckpoint) -> Result<Self> {
        if data.version != CHECKPOINT_FORMAT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported checkpoint format version {}",
                data.version
            )));
        }
        let actions = ActionSet::<R>::from_spec(&data.actions)?;
        if actions.labels() != data.action_labels {
            return Err(Error::Checkpoint(
                "checkpoint action labels do not match its action-set recipe".to_string(),
            ));
        }
        if data.online.len() != actions.len() || data.target.len() != actions.len() {
            return Err(Error::Checkpoint(format!(
                "checkpoint holds {} online / {} target networks for {} actions",
                data.online.len(),
                data.target.len(),
                actions.len()
            )));
        }
        let n_inp = CorrelatorVector::<R>::len_for(actions.n_qubits())?;
        let load = |datas: &[NetworkData]| -> Result<Vec<QNetwork<R>>> {
            datas
                .iter()
                .map(|d| {
                    let net = QNetwork::from_data(d)?;
                    if net.n_inp() != n_inp {
                        return Err(Error::Checkpoint(format!(
                            "network expects {} inputs but the register needs {}",
                            net.n_inp(),
                            n_inp
                        )));
                    }
                    Ok(net)
                })
                .collect()
        };
        Ok(Agent {
            online: load(&data.online)?,
            target: load(&data.target)?,
            actions,
            gamma: real(data.gamma),
            alpha: real(data.alpha),
            target_update_period: data.target_update_period,
            updates: data.updates,
        })
    }
}

const CHECKPOINT_FORMAT_VERSION: u32 = 1;

/// On-disk form of an agent (always `f64`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentCheckpoint {
    pub version: u32,
    pub actions: ActionSetSpec,
    pub action_labels: Vec<String>,
    pub gamma: f64,
    pub alpha: f64,
    pub target_update_period: u64,
    pub updates: u64,
    pub online: Vec<NetworkData>,
    pub target: Vec<NetworkData>,
}

impl AgentCheckpoint {
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))
    }
}

/// A circuit being built: quantum state plus measured summary.
#[derive(Debug, Clone)]
pub struct Episode<R: Real> {
    state: DensityState<R>,
    correlators: CorrelatorVector<R>,
    energy: R,
    gates_applied: usize,
    gate_budget: usize,
    gate_labels: Vec<String>,
}

/// Reward and termination flag from one applied gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome<R: Real> {
    /// Energy drop `E_before - E_after`.
    pub reward: R,
    /// True when this gate exhausted the episode's budget.
    pub terminal: bool,
}

impl<R: Real> Episode<R> {
    /// Starts an episode: |0..0>, one random rotation on each qubit (the
    /// dimer's second spin is prepared antiparallel to the first), then one
    /// measurement of the correlator vector.
    ///
    /// The initial rotations are real gates and suffer gate noise; the
    /// generator is consumed in a fixed order (three angle draws, then any
    /// sampling draws), so a seeded episode is reproducible.
    pub fn begin(
        hamiltonian: &Hamiltonian<R>,
        noise: &NoiseModel<R>,
        shot_mode: ShotMode,
        gate_budget: usize,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let n = hamiltonian.n_qubits();
        let mut state = DensityState::zero_state(n)?;
        let pi = real::<R>(std::f64::consts::PI);
        let two = real::<R>(2.0);
        let theta = real::<R>(rng.random::<f64>()) * pi;
        let phi = real::<R>(rng.random::<f64>()) * two * pi;
        let lambda = real::<R>(rng.random::<f64>()) * two * pi;
        state.apply_gate(
            &crate::qsim::Gate::One(crate::qsim::u3(theta, phi, lambda)),
            &[0],
            noise,
        )?;
        if n == 2 {
            // Antiparallel Bloch vector: theta -> pi - theta, phi -> phi + pi.
            state.apply_gate(
                &crate::qsim::Gate::One(crate::qsim::u3(pi - theta, phi + pi, lambda)),
                &[1],
                noise,
            )?;
        }
        let correlators = estimate_correlators(&state, shot_mode, noise, rng)?;
        let energy = hamiltonian.energy(&correlators)?;
        Ok(Episode {
            state,
            correlators,
            energy,
            gates_applied: 0,
            gate_budget,
            gate_labels: Vec::new(),
        })
    }

    pub fn correlators(&self) -> &CorrelatorVector<R> {
        &self.correlators
    }

    pub fn energy(&self) -> R {
        self.energy
    }

    pub fn gates_applied(&self) -> usize {
        self.gates_applied
    }

    pub fn gate_labels(&self) -> &[String] {
        &self.gate_labels
    }

    pub fn is_complete(&self) -> bool {
        self.gates_applied >= self.gate_budget
    }

    /// Applies one action, re-measures, and returns the reward.
    pub fn apply_action(
        &mut self,
        action: &GateAction<R>,
        hamiltonian: &Hamiltonian<R>,
        noise: &NoiseModel<R>,
        shot_mode: ShotMode,
        rng: &mut impl Rng,
    ) -> Result<StepOutcome<R>> {
        if self.is_complete() {
            return Err(Error::EpisodeComplete(self.gates_applied));
        }
        if let Some((gate, targets)) = action.realize(rng) {
            self.state.apply_gate(&gate, &targets, noise)?;
        }
        let correlators = estimate_correlators(&self.state, shot_mode, noise, rng)?;
        let energy = hamiltonian.energy(&correlators)?;
        let reward = self.energy - energy;
        self.correlators = correlators;
        self.energy = energy;
        self.gates_applied += 1;
        self.gate_labels.push(action.label.clone());
        Ok(StepOutcome {
            reward,
            terminal: self.is_complete(),
        })
    }
}

/// Per-episode training record, one metrics row.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeMetrics<R: Real> {
    /// 1-based epoch number.
    pub epoch: usize,
    /// 1-based episode number within the epoch.
    pub episode: usize,
    /// Exploration rate when the episode's first gate was chosen.
    pub epsilon: R,
    pub e_initial: R,
    pub e_final: R,
    /// Lowest energy seen, including the initial state.
    pub e_min: R,
    /// Sum of step rewards, i.e. `e_initial - e_final` up to rounding.
    pub total_reward: R,
    pub gate_sequence: Vec<String>,
}

/// A finished training run.
#[derive(Debug, Clone)]
pub struct TrainOutput<R: Real> {
    pub agent: Agent<R>,
    pub metrics: Vec<EpisodeMetrics<R>>,
}

/// Runs the full training loop.
///
/// A single generator seeded from `config.seed` drives everything —
/// network initialization, episode preparation, exploration, sampling and
/// replay — in a fixed order, so a config and seed pin the entire run.
/// `on_epoch` fires after each epoch (for checkpointing); returning an
/// error aborts training.
pub fn train<R: Real>(
    config: &TrainConfig<R>,
    mut on_epoch: impl FnMut(usize, &Agent<R>) -> Result<()>,
) -> Result<TrainOutput<R>> {
    config.validate()?;
    let mut rng = seeded_rng(config.seed);
    let n = config.hamiltonian.n_qubits();
    let actions = ActionSet::for_qubits(n, config.delta, config.include_random_rotation)?;
    let n_inp = CorrelatorVector::<R>::len_for(n)?;
    let mut agent = Agent::new(
        actions,
        n_inp,
        config.n_hidden,
        config.gamma,
        config.alpha,
        config.target_update_period,
        &mut rng,
    )?;
    let mut memory = ReplayMemory::new(config.replay_capacity)?;
    let mut measurements: u64 = 0;
    let mut metrics = Vec::with_capacity(config.epochs * config.circuits_per_epoch);

    for epoch in 1..=config.epochs {
        for episode_no in 1..=config.circuits_per_epoch {
            let mut episode = Episode::begin(
                &config.hamiltonian,
                &config.noise,
                config.shot_mode,
                config.gates_per_circuit,
                &mut rng,
            )?;
            measurements += 1;
            let e_initial = episode.energy();
            let mut e_min = e_initial;
            let mut total_reward = R::zero();
            let epsilon_at_start = config.epsilon.value_at(measurements);

            while !episode.is_complete() {
                let epsilon = config.epsilon.value_at(measurements);
                let state = episode.correlators().clone();
                let action = agent.select_action(&state, epsilon, &mut rng)?;
                let gate_action = agent.actions().get(action).clone();
                let outcome = episode.apply_action(
                    &gate_action,
                    &config.hamiltonian,
                    &config.noise,
                    config.shot_mode,
                    &mut rng,
                )?;
                measurements += 1;
                total_reward += outcome.reward;
                e_min = e_min.min(episode.energy());
                memory.push(Transition {
                    state,
                    action,
                    next_state: episode.correlators().clone(),
                    reward: outcome.reward,
                    terminal: outcome.terminal,
                });
                agent.learn_step(&memory, config.batch_size, &mut rng)?;
            }

            metrics.push(EpisodeMetrics {
                epoch,
                episode: episode_no,
                epsilon: epsilon_at_start,
                e_initial,
                e_final: episode.energy(),
                e_min,
                total_reward,
                gate_sequence: episode.gate_labels().to_vec(),
            });
        }
        on_epoch(epoch, &agent)?;
    }
    Ok(TrainOutput { agent, metrics })
}

/// Greedy-evaluation settings (no learning, fixed exploration rate).
#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig<R: Real> {
    pub hamiltonian: Hamiltonian<R>,
    pub noise: NoiseModel<R>,
    pub shot_mode: ShotMode,
    pub episodes: usize,
    pub gates_per_circuit: usize,
    /// Residual exploration during evaluation (0.05 by convention).
    pub epsilon: R,
    pub seed: u64,
}

/// One evaluated episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalEpisode<R: Real> {
    /// 1-based episode number.
    pub episode: usize,
    pub e_initial: R,
    pub e_final: R,
    pub e_min: R,
    pub total_reward: R,
    pub gate_sequence: Vec<String>,
    /// Measured correlators after 0, 1, 2, ... gates; the last entry is
    /// the final state (the input to post-hoc corrections).
    pub step_correlators: Vec<CorrelatorVector<R>>,
    /// Energy after each step, aligned with `step_correlators`.
    pub step_energies: Vec<R>,
}

impl<R: Real> EvalEpisode<R> {
    /// Correlators of the final state.
    pub fn final_correlators(&self) -> &CorrelatorVector<R> {
        self.step_correlators.last().expect("episodes record the prepared state")
    }
}

/// Plays episodes with the trained agent and no learning.
///
/// Each episode runs on its own generator seeded by `derive_seed(seed, i)`,
/// so episodes are independent and could be played in any order (or in
/// parallel) without changing the results.
pub fn evaluate<R: Real>(agent: &Agent<R>, config: &EvalConfig<R>) -> Result<Vec<EvalEpisode<R>>> {
    if config.hamiltonian.n_qubits() != agent.actions().n_qubits() {
        return Err(Error::InvalidConfig(format!(
            "agent plays {} qubit(s) but the Hamiltonian needs {}",
            agent.actions().n_qubits(),
            config.hamiltonian.n_qubits()
        )));
    }
    if config.episodes == 0 || config.gates_per_circuit == 0 {
        return Err(Error::InvalidConfig(
            "evaluation needs at least one episode and one gate".to_string(),
        ));
    }
    let mut out = Vec::with_capacity(config.episodes);
    for index in 0..config.episodes {
        let mut rng = seeded_rng(derive_seed(config.seed, index as u64));
        let mut episode = Episode::begin(
            &config.hamiltonian,
            &config.noise,
            config.shot_mode,
            config.gates_per_circuit,
            &mut rng,
        )?;
        let e_initial = episode.energy();
        let mut e_min = e_initial;
        let mut total_reward = R::zero();
        let mut step_correlators = vec![episode.correlators().clone()];
        let mut step_energies = vec![e_initial];
        while !episode.is_complete() {
            let state = episode.correlators().clone();
            let action = agent.select_action(&state, config.epsilon, &mut rng)?;
            let gate_action = agent.actions().get(action).clone();
            let outcome = episode.apply_action(
                &gate_action,
                &config.hamiltonian,
                &config.noise,
                config.shot_mode,
                &mut rng,
            )?;
            total_reward += outcome.reward;
            e_min = e_min.min(episode.energy());
            step_correlators.push(episode.correlators().clone());
            step_energies.push(episode.energy());
        }
        out.push(EvalEpisode {
            episode: index + 1,
            e_initial,
            e_final: episode.energy(),
            e_min,
            total_reward,
            gate_sequence: episode.gate_labels().to_vec(),
            step_correlators,
            step_energies,
        });
    }
    Ok(out)
}
