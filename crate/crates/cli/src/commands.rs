//! Command implementations. Each command resolves its inputs, runs the
//! corresponding core routine and writes its artifacts — a resolved
//! `config.txt`, CSVs for row data and a `summary.json` — into the output
//! directory, touching nothing outside it.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use spinrl_core::agent::{evaluate, train};
use spinrl_core::observables::{estimate_correlators, local_spin_correction, spin_dot, sum_rule_residual};
use spinrl_core::qsim::u3;
use spinrl_core::rng::Rng;
use spinrl_core::vqe::{ansatz_energy, run_vqe};
use spinrl_core::{
    derive_seed, seeded_rng, Agent, AgentCheckpoint, Axis, CorrelatorVector, DensityState,
    EpisodeMetrics, EpsilonSchedule, EvalConfig, Gate, Hamiltonian, NoiseModel, ShotMode,
    TrainConfig, VqeConfig, VqeIterate, PAIR_ORDER,
};

use crate::config::{BaselineKind, BaselineRun, EvalRun, SumruleRun, TrainRun, VqeRun};
use crate::CliError;

/// The singlet-preparing angles for the dimer ansatz.
const SINGLET_ANGLES: [f64; 6] =
    [std::f64::consts::PI, 0.0, 0.0, -std::f64::consts::FRAC_PI_2, 0.0, 0.0];

fn ensure_out(dir: &Path) -> Result<(), CliError> {
    if dir.is_dir() {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "output directory {} does not exist",
            dir.display()
        )))
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn hamiltonian_for(qubits: usize, field: [f64; 3], exchange: f64) -> Hamiltonian {
    match qubits {
        1 => Hamiltonian::SingleSpin { field },
        _ => Hamiltonian::Dimer { exchange },
    }
}

/// Lowercase column names for a correlator vector in canonical order:
/// `x1,y1,z1,x2,y2,z2` then the nine pair products.
fn correlator_labels(n_qubits: usize) -> Vec<String> {
    let axis = |a: Axis| a.name().to_ascii_lowercase();
    if n_qubits == 1 {
        return Axis::ALL.iter().map(|&a| axis(a)).collect();
    }
    let mut labels = Vec::with_capacity(15);
    for qubit in 0..2 {
        for &a in &Axis::ALL {
            labels.push(format!("{}{}", axis(a), qubit + 1));
        }
    }
    for &(a0, a1) in &PAIR_ORDER {
        labels.push(format!("{}{}", axis(a0), axis(a1)));
    }
    labels
}

#[derive(Serialize)]
struct TrainSummary {
    epochs: usize,
    episodes_per_epoch: usize,
    best_epoch: usize,
    best_epoch_mean_reward: f64,
    final_epoch_mean_reward: f64,
    final_epoch_mean_e_final: f64,
    min_e_final: f64,
}

impl TrainSummary {
    fn from_metrics(metrics: &[EpisodeMetrics], epochs: usize, circuits: usize) -> Self {
        let epoch_rewards: Vec<f64> = (1..=epochs)
            .map(|e| {
                mean(
                    &metrics
                        .iter()
                        .filter(|m| m.epoch == e)
                        .map(|m| m.total_reward)
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        let best_epoch = epoch_rewards
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &r)| {
                if r > best.1 {
                    (i, r)
                } else {
                    best
                }
            })
            .0
            + 1;
        let last: Vec<&EpisodeMetrics> =
            metrics.iter().filter(|m| m.epoch == epochs).collect();
        TrainSummary {
            epochs,
            episodes_per_epoch: circuits,
            best_epoch,
            best_epoch_mean_reward: epoch_rewards[best_epoch - 1],
            final_epoch_mean_reward: epoch_rewards[epochs - 1],
            final_epoch_mean_e_final: mean(
                &last.iter().map(|m| m.e_final).collect::<Vec<_>>(),
            ),
            min_e_final: metrics.iter().map(|m| m.e_final).fold(f64::INFINITY, f64::min),
        }
    }
}

pub fn cmd_train(run: &TrainRun) -> Result<(), CliError> {
    ensure_out(&run.out)?;
    let config = TrainConfig {
        hamiltonian: hamiltonian_for(run.qubits, run.field, run.exchange),
        noise: run.noise.model(),
        shot_mode: run.shot_mode,
        epochs: run.epochs,
        circuits_per_epoch: run.circuits,
        gates_per_circuit: run.gates,
        n_hidden: run.hidden,
        alpha: run.alpha,
        gamma: run.gamma,
        replay_capacity: run.memory,
        batch_size: run.batch,
        target_update_period: run.target_period,
        epsilon: EpsilonSchedule {
            initial: run.epsilon_initial,
            final_value: run.epsilon_final,
            anneal_measurements: run.epsilon_anneal,
        },
        delta: run.delta,
        include_random_rotation: run.random_rotation,
        seed: run.seed,
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    write_file(&run.out.join("config.txt"), &run.serialize())?;

    let cadence = run.checkpoint_every;
    let out_dir = run.out.clone();
    let output = train(&config, |epoch, agent| {
        if cadence > 0 && epoch % cadence == 0 {
            agent
                .to_checkpoint()
                .save(&out_dir.join(format!("checkpoint_epoch_{epoch:04}.json")))?;
        }
        Ok(())
    })
    .map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut csv =
        String::from("epoch,episode,epsilon,e_initial,e_final,e_min,total_reward,gate_sequence\n");
    for m in &output.metrics {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            m.epoch,
            m.episode,
            m.epsilon,
            m.e_initial,
            m.e_final,
            m.e_min,
            m.total_reward,
            m.gate_sequence.join(";")
        )
        .expect("writing to a string cannot fail");
    }
    write_file(&run.out.join("metrics.csv"), &csv)?;
    output
        .agent
        .to_checkpoint()
        .save(&run.out.join("checkpoint.json"))
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let summary = TrainSummary::from_metrics(&output.metrics, run.epochs, run.circuits);
    write_file(&run.out.join("summary.json"), &to_json(&summary)?)?;
    println!(
        "trained {} epochs x {} episodes; best mean reward {} at epoch {}; artifacts in {}",
        run.epochs,
        run.circuits,
        summary.best_epoch_mean_reward,
        summary.best_epoch,
        run.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct EvalSummary {
    episodes: usize,
    mean_e_initial: f64,
    mean_e_final: f64,
    mean_e_min: f64,
    mean_total_reward: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    corrected_episodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_corrected_energy: Option<f64>,
}

pub fn cmd_eval(run: &EvalRun) -> Result<(), CliError> {
    ensure_out(&run.out)?;
    let checkpoint = AgentCheckpoint::load(&run.checkpoint)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let agent =
        Agent::from_checkpoint(&checkpoint).map_err(|e| CliError::Runtime(e.to_string()))?;
    let qubits = agent.actions().n_qubits();
    if let Some(q) = run.qubits {
        if q != qubits {
            return Err(CliError::Usage(format!(
                "checkpoint {} plays {qubits} qubit(s) but the config says {q}",
                run.checkpoint.display()
            )));
        }
    }
    if run.correct && qubits != 2 {
        return Err(CliError::Usage(
            "--correct applies to the two-spin dimer only".to_string(),
        ));
    }
    let hamiltonian = hamiltonian_for(qubits, run.field, run.exchange);
    let config = EvalConfig {
        hamiltonian: hamiltonian.clone(),
        noise: run.noise.model(),
        shot_mode: run.shot_mode,
        episodes: run.episodes,
        gates_per_circuit: run.gates,
        epsilon: run.epsilon,
        seed: run.seed,
    };
    let mut resolved = run.clone();
    resolved.qubits = Some(qubits);
    write_file(&run.out.join("config.txt"), &resolved.serialize())?;

    let episodes = evaluate(&agent, &config).map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut csv = String::from("episode,e_initial,e_final,e_min,total_reward,gate_sequence");
    if run.correct {
        csv.push_str(",corrected_energy");
    }
    csv.push('\n');
    let mut corrected = Vec::new();
    for ep in &episodes {
        write!(
            csv,
            "{},{},{},{},{},{}",
            ep.episode,
            ep.e_initial,
            ep.e_final,
            ep.e_min,
            ep.total_reward,
            ep.gate_sequence.join(";")
        )
        .expect("writing to a string cannot fail");
        if run.correct {
            match local_spin_correction(ep.final_correlators(), &hamiltonian) {
                Ok(c) => {
                    corrected.push(c.corrected_energy);
                    write!(csv, ",{}", c.corrected_energy).unwrap();
                }
                Err(_) => csv.push_str(",n/a"),
            }
        }
        csv.push('\n');
    }
    write_file(&run.out.join("eval.csv"), &csv)?;

    // Per-step correlator dump: the raw inputs for post-hoc analysis
    // (`sumrule` reads this file).
    let labels = correlator_labels(qubits);
    let mut correlators = format!("episode,step,{},energy\n", labels.join(","));
    for ep in &episodes {
        for (step, (c, e)) in ep.step_correlators.iter().zip(&ep.step_energies).enumerate() {
            write!(correlators, "{},{step}", ep.episode).unwrap();
            for value in c.as_slice() {
                write!(correlators, ",{value}").unwrap();
            }
            writeln!(correlators, ",{e}").unwrap();
        }
    }
    write_file(&run.out.join("correlators.csv"), &correlators)?;

    let summary = EvalSummary {
        episodes: episodes.len(),
        mean_e_initial: mean(&episodes.iter().map(|e| e.e_initial).collect::<Vec<_>>()),
        mean_e_final: mean(&episodes.iter().map(|e| e.e_final).collect::<Vec<_>>()),
        mean_e_min: mean(&episodes.iter().map(|e| e.e_min).collect::<Vec<_>>()),
        mean_total_reward: mean(&episodes.iter().map(|e| e.total_reward).collect::<Vec<_>>()),
        corrected_episodes: run.correct.then_some(corrected.len()),
        mean_corrected_energy: if corrected.is_empty() { None } else { Some(mean(&corrected)) },
    };
    write_file(&run.out.join("summary.json"), &to_json(&summary)?)?;
    println!(
        "evaluated {} episodes; mean final energy {}; artifacts in {}",
        summary.episodes,
        summary.mean_e_final,
        run.out.display()
    );
    Ok(())
}

/// Energy of the known optimal circuit for the problem, measured once
/// under the given noise and shot budget.
fn optimal_circuit_energy(
    hamiltonian: &Hamiltonian,
    noise: &NoiseModel,
    shot_mode: ShotMode,
    rng: &mut impl Rng,
) -> spinrl_core::Result<f64> {
    match hamiltonian {
        Hamiltonian::SingleSpin { field } => {
            // Point the spin against the field: theta and phi of the
            // Bloch vector -B/|B|.
            let b = field.iter().map(|x| x * x).sum::<f64>().sqrt();
            let theta = (-field[2] / b).clamp(-1.0, 1.0).acos();
            let phi = (-field[1]).atan2(-field[0]);
            let mut state = DensityState::zero_state(1)?;
            state.apply_gate(&Gate::One(u3(theta, phi, 0.0)), &[0], noise)?;
            let c = estimate_correlators(&state, shot_mode, noise, rng)?;
            hamiltonian.energy(&c)
        }
        Hamiltonian::Dimer { exchange } => {
            ansatz_energy(&SINGLET_ANGLES, *exchange, noise, shot_mode, rng)
        }
    }
}

#[derive(Serialize)]
struct BaselineSummary {
    kind: &'static str,
    runs: usize,
    mean_energy: f64,
    min_energy: f64,
    max_energy: f64,
    /// True ground-state energy of the configured Hamiltonian.
    target_energy: f64,
}

pub fn cmd_baseline(run: &BaselineRun) -> Result<(), CliError> {
    ensure_out(&run.out)?;
    write_file(&run.out.join("config.txt"), &run.serialize())?;
    match run.kind {
        BaselineKind::Vqe => {
            let config = VqeConfig {
                exchange: run.exchange,
                noise: run.noise.model(),
                shot_mode: run.shot_mode,
                iterations: run.iterations,
                seed: run.seed,
                ..VqeConfig::defaults(run.seed)
            };
            run_vqe_artifacts(&run.out, &config)
        }
        BaselineKind::ExactCircuit => {
            let hamiltonian = hamiltonian_for(run.qubits, run.field, run.exchange);
            let noise = run.noise.model();
            let mut energies = Vec::with_capacity(run.runs);
            for index in 0..run.runs {
                let mut rng = seeded_rng(derive_seed(run.seed, index as u64));
                let energy =
                    optimal_circuit_energy(&hamiltonian, &noise, run.shot_mode, &mut rng)
                        .map_err(|e| CliError::Runtime(e.to_string()))?;
                energies.push(energy);
            }
            let mut csv = String::from("run,energy\n");
            for (index, energy) in energies.iter().enumerate() {
                writeln!(csv, "{},{energy}", index + 1).unwrap();
            }
            write_file(&run.out.join("baseline.csv"), &csv)?;
            let summary = BaselineSummary {
                kind: run.kind.name(),
                runs: run.runs,
                mean_energy: mean(&energies),
                min_energy: energies.iter().copied().fold(f64::INFINITY, f64::min),
                max_energy: energies.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                target_energy: hamiltonian.ground_energy(),
            };
            write_file(&run.out.join("summary.json"), &to_json(&summary)?)?;
            println!(
                "mean energy over {} runs: {} (ground truth {})",
                run.runs, summary.mean_energy, summary.target_energy
            );
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct VqeSummary {
    iterations: usize,
    final_energy: f64,
    best_energy: f64,
    /// Mean energy over the last (up to) 100 iterations.
    plateau_mean: f64,
    target_energy: f64,
}

fn run_vqe_artifacts(out: &Path, config: &VqeConfig) -> Result<(), CliError> {
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let rows = run_vqe(config).map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut csv =
        String::from("iteration,alpha,theta0,theta1,theta2,theta3,theta4,theta5,energy\n");
    for row in &rows {
        write!(csv, "{},{}", row.iteration, row.alpha).unwrap();
        for t in &row.theta {
            write!(csv, ",{t}").unwrap();
        }
        writeln!(csv, ",{}", row.energy).unwrap();
    }
    write_file(&out.join("trajectory.csv"), &csv)?;
    let summary = vqe_summary(&rows, config.exchange);
    write_file(&out.join("summary.json"), &to_json(&summary)?)?;
    println!(
        "final energy {} after {} iterations (plateau mean {})",
        summary.final_energy, summary.iterations, summary.plateau_mean
    );
    Ok(())
}

fn vqe_summary(rows: &[VqeIterate], exchange: f64) -> VqeSummary {
    let energies: Vec<f64> = rows.iter().map(|r| r.energy).collect();
    let window = energies.len().min(100);
    VqeSummary {
        iterations: rows.len() - 1,
        final_energy: *energies.last().expect("trajectory is never empty"),
        best_energy: energies.iter().copied().fold(f64::INFINITY, f64::min),
        plateau_mean: mean(&energies[energies.len() - window..]),
        target_energy: -0.75 * exchange,
    }
}

pub fn cmd_vqe(run: &VqeRun) -> Result<(), CliError> {
    ensure_out(&run.out)?;
    let config = VqeConfig {
        exchange: run.exchange,
        noise: run.noise.model(),
        shot_mode: run.shot_mode,
        iterations: run.iterations,
        fd_step: run.fd_step,
        calibration_period: run.calibration_period,
        cap_step_size: run.cap_step,
        seed: run.seed,
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    write_file(&run.out.join("config.txt"), &run.serialize())?;
    run_vqe_artifacts(&run.out, &config)
}

pub fn cmd_sumrule(run: &SumruleRun) -> Result<(), CliError> {
    ensure_out(&run.out)?;
    write_file(&run.out.join("config.txt"), &run.serialize())?;
    let text = std::fs::read_to_string(&run.input)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", run.input.display())))?;
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(CliError::Runtime(format!(
            "{}: line 1: missing header",
            run.input.display()
        )));
    };
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let labels = correlator_labels(2);
    let mut indices = Vec::with_capacity(labels.len());
    for label in &labels {
        let index = columns.iter().position(|c| c == label).ok_or_else(|| {
            CliError::Runtime(format!(
                "{}: line 1: missing correlator column `{label}`",
                run.input.display()
            ))
        })?;
        indices.push(index);
    }
    let hamiltonian = Hamiltonian::Dimer { exchange: run.exchange };
    let mut out = format!("{header},spin_dot,residual,multiplier,corrected_energy\n");
    let mut rows = 0usize;
    let mut corrected_rows = 0usize;
    for (idx, line) in lines {
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(CliError::Runtime(format!(
                "{}: line {line_no}: expected {} fields, got {}",
                run.input.display(),
                columns.len(),
                fields.len()
            )));
        }
        let mut entries = Vec::with_capacity(labels.len());
        for (&index, label) in indices.iter().zip(&labels) {
            let value = fields[index].parse::<f64>().map_err(|_| {
                CliError::Runtime(format!(
                    "{}: line {line_no}: `{}` is not a number in column {label}",
                    run.input.display(),
                    fields[index]
                ))
            })?;
            entries.push(value);
        }
        let c = CorrelatorVector::new(2, entries)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        let dot = spin_dot(&c).map_err(|e| CliError::Runtime(e.to_string()))?;
        let residual = sum_rule_residual(&c).map_err(|e| CliError::Runtime(e.to_string()))?;
        write!(out, "{line},{dot},{residual}").unwrap();
        match local_spin_correction(&c, &hamiltonian) {
            Ok(correction) => {
                corrected_rows += 1;
                writeln!(out, ",{},{}", correction.multiplier, correction.corrected_energy)
                    .unwrap();
            }
            // Non-negative correlation: flagged, left uncorrected.
            Err(_) => out.push_str(",n/a,n/a\n"),
        }
        rows += 1;
    }
    write_file(&run.out.join("corrected.csv"), &out)?;
    println!("corrected {corrected_rows} of {rows} rows; wrote corrected.csv in {}", run.out.display());
    Ok(())
}
