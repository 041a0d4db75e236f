//! Run configuration: defaults, config-file merging and command-line
//! overrides, plus the resolved copy every command writes into its output
//! directory so a run can be reproduced from its artifacts alone.
//!
//! Precedence is defaults < config file < command line. Config files use
//! the `key = value` format from `spinrl_core::kvfile`: keys under a
//! `[command]` section apply to that command, unsectioned keys to every
//! command, and an optional `[noise]` section holds inline noise
//! parameters.

use std::path::{Path, PathBuf};

use clap::Args;
use spinrl_core::kvfile::{self, KvEntry};
use spinrl_core::{NoiseModel, ShotMode};

use crate::CliError;

/// Flags shared by every command.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Key-value configuration file; command-line flags win
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed for all randomness
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; must already exist
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Measurement shots per basis setting
    #[arg(long, conflicts_with = "exact")]
    pub shots: Option<u64>,
    /// Use exact expectation values instead of sampled shots
    #[arg(long)]
    pub exact: bool,
    /// Noise profile: off, melbourne-like, or a profile file path
    #[arg(long, value_name = "PROFILE")]
    pub noise: Option<String>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Problem size: 1 (spin in a field) or 2 (exchange dimer)
    #[arg(long)]
    pub qubits: Option<usize>,
    /// Gate budget per episode
    #[arg(long)]
    pub gates: Option<usize>,
    /// Training epochs
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Episodes played per epoch
    #[arg(long)]
    pub circuits: Option<usize>,
    /// Hidden units per action-value network
    #[arg(long)]
    pub hidden: Option<usize>,
    /// Base rotation angle of the action menu, radians
    #[arg(long)]
    pub delta: Option<f64>,
    /// Reward discount factor
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Learning rate
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Replay memory capacity
    #[arg(long)]
    pub memory: Option<usize>,
    /// Transitions replayed per gradient step
    #[arg(long)]
    pub batch: Option<usize>,
    /// Gradient steps between target-network refreshes
    #[arg(long)]
    pub target_period: Option<u64>,
    /// Exploration rate at the start of training
    #[arg(long)]
    pub epsilon_initial: Option<f64>,
    /// Exploration rate after annealing
    #[arg(long)]
    pub epsilon_final: Option<f64>,
    /// Measurements over which exploration anneals
    #[arg(long)]
    pub epsilon_anneal: Option<u64>,
    /// Add a fully random rotation to the action menu
    #[arg(long)]
    pub random_rotation: bool,
    /// Magnetic field "Bx,By,Bz" for the 1-qubit problem
    #[arg(long, value_name = "BX,BY,BZ")]
    pub field: Option<String>,
    /// Exchange coupling J for the dimer
    #[arg(long)]
    pub exchange: Option<f64>,
    /// Also save a checkpoint every N epochs (0 = final only)
    #[arg(long, value_name = "N")]
    pub checkpoint_every: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Trained agent checkpoint to evaluate
    #[arg(long, value_name = "PATH")]
    pub checkpoint: Option<PathBuf>,
    /// Episodes to play
    #[arg(long)]
    pub episodes: Option<usize>,
    /// Gate budget per episode
    #[arg(long)]
    pub gates: Option<usize>,
    /// Residual exploration rate
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Problem size; defaults to what the checkpoint was trained on
    #[arg(long)]
    pub qubits: Option<usize>,
    /// Magnetic field "Bx,By,Bz" for the 1-qubit problem
    #[arg(long, value_name = "BX,BY,BZ")]
    pub field: Option<String>,
    /// Exchange coupling J for the dimer
    #[arg(long)]
    pub exchange: Option<f64>,
    /// Append the local-moment corrected energy to each episode row
    #[arg(long)]
    pub correct: bool,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    /// What to run: exact-circuit or vqe
    pub kind: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Problem size for exact-circuit: 1 or 2
    #[arg(long)]
    pub qubits: Option<usize>,
    /// Independent repetitions of the exact circuit
    #[arg(long)]
    pub runs: Option<usize>,
    /// Gradient-descent iterations for the vqe kind
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Magnetic field "Bx,By,Bz" for the 1-qubit problem
    #[arg(long, value_name = "BX,BY,BZ")]
    pub field: Option<String>,
    /// Exchange coupling J for the dimer
    #[arg(long)]
    pub exchange: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VqeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Gradient-descent iterations
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Central finite-difference step, radians
    #[arg(long)]
    pub fd_step: Option<f64>,
    /// Iterations between step-size recalibrations
    #[arg(long)]
    pub calibration_period: Option<usize>,
    /// Let the step-size probes exceed the usual cap
    #[arg(long)]
    pub uncapped: bool,
    /// Exchange coupling J for the dimer
    #[arg(long)]
    pub exchange: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SumruleArgs {
    /// Correlator CSV to post-process
    pub input: Option<PathBuf>,
    /// Key-value configuration file; command-line flags win
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory; must already exist
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Exchange coupling J used for corrected energies
    #[arg(long)]
    pub exchange: Option<f64>,
}

/// How the noise model was specified, kept symbolic so the resolved
/// config names shipped profiles instead of copying their parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpec {
    Off,
    MelbourneLike,
    /// Parameters supplied inline or loaded from a profile file.
    Inline(NoiseModel),
}

impl NoiseSpec {
    pub fn model(&self) -> NoiseModel {
        match self {
            NoiseSpec::Off => NoiseModel::off(),
            NoiseSpec::MelbourneLike => NoiseModel::melbourne_like(),
            NoiseSpec::Inline(model) => model.clone(),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            NoiseSpec::Off => "off",
            NoiseSpec::MelbourneLike => "melbourne-like",
            NoiseSpec::Inline(_) => "inline",
        }
    }
}

const SECTIONS: [&str; 6] = ["train", "eval", "baseline", "vqe", "sumrule", "noise"];

/// The config-file entries applicable to one command: unsectioned keys
/// plus the command's own section, later lines winning. Tracks which keys
/// were consumed so leftovers (typos) fail loudly.
struct KeyBag {
    entries: Vec<KvEntry>,
    used: Vec<bool>,
    command: &'static str,
}

impl KeyBag {
    fn new(entries: &[KvEntry], command: &'static str) -> Result<Self, CliError> {
        for entry in entries {
            if let Some(section) = &entry.section {
                if !SECTIONS.contains(&section.as_str()) {
                    return Err(CliError::Usage(format!(
                        "line {}: unknown section [{}]",
                        entry.line, section
                    )));
                }
            }
        }
        let entries: Vec<KvEntry> = entries
            .iter()
            .filter(|e| e.section.is_none() || e.section.as_deref() == Some(command))
            .cloned()
            .collect();
        let used = vec![false; entries.len()];
        Ok(KeyBag { entries, used, command })
    }

    /// Last value for `key`, marking every occurrence as consumed.
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        let mut found = None;
        for (i, entry) in self.entries.iter().enumerate() {
            if entry.key == key {
                self.used[i] = true;
                found = Some((entry.value.clone(), entry.line));
            }
        }
        found
    }

    fn take_u64(&mut self, key: &str) -> Result<Option<u64>, CliError> {
        self.take_parsed(key, "a non-negative integer")
    }

    fn take_usize(&mut self, key: &str) -> Result<Option<usize>, CliError> {
        self.take_parsed(key, "a non-negative integer")
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        self.take_parsed(key, "a number")
    }

    fn take_bool(&mut self, key: &str) -> Result<Option<bool>, CliError> {
        self.take_parsed(key, "true or false")
    }

    fn take_parsed<T: std::str::FromStr>(
        &mut self,
        key: &str,
        expected: &str,
    ) -> Result<Option<T>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some((value, line)) => value.parse::<T>().map(Some).map_err(|_| {
                CliError::Usage(format!(
                    "line {line}: `{key}` must be {expected}, got `{value}`"
                ))
            }),
        }
    }

    fn take_shots(&mut self) -> Result<Option<ShotMode>, CliError> {
        match self.take("shots") {
            None => Ok(None),
            Some((value, _)) if value == "exact" => Ok(Some(ShotMode::Exact)),
            Some((value, line)) => {
                let n = value.parse::<u64>().map_err(|_| {
                    CliError::Usage(format!(
                        "line {line}: `shots` must be `exact` or a count, got `{value}`"
                    ))
                })?;
                Ok(Some(ShotMode::Shots(n)))
            }
        }
    }

    /// Errors on the first key this command does not understand.
    fn finish(self) -> Result<(), CliError> {
        for (entry, used) in self.entries.iter().zip(&self.used) {
            if !used {
                return Err(CliError::Usage(format!(
                    "line {}: unknown key `{}` for command `{}`",
                    entry.line, entry.key, self.command
                )));
            }
        }
        Ok(())
    }
}

/// Reads and parses `--config` if given.
fn load_entries(path: Option<&Path>) -> Result<Vec<KvEntry>, CliError> {
    let Some(path) = path else { return Ok(Vec::new()) };
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Usage(format!("cannot read config {}: {e}", path.display()))
    })?;
    kvfile::parse(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Resolves the noise specification from flag, `noise` key and the inline
/// `[noise]` section.
fn resolve_noise(
    flag: Option<&str>,
    bag: &mut KeyBag,
    entries: &[KvEntry],
) -> Result<NoiseSpec, CliError> {
    let inline: Vec<KvEntry> = entries
        .iter()
        .filter(|e| e.section.as_deref() == Some("noise"))
        .cloned()
        .collect();
    let load_inline = || -> Result<NoiseSpec, CliError> {
        if inline.is_empty() {
            return Err(CliError::Usage(
                "noise = inline requires a [noise] section in the config file".to_string(),
            ));
        }
        let model = NoiseModel::load_profile(&kvfile::serialize(&inline))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(NoiseSpec::Inline(model))
    };
    let file = bag.take("noise").map(|(v, _)| v);
    let named = flag.map(|v| v.to_string()).or(file);
    let spec = match named.as_deref() {
        None if !inline.is_empty() => load_inline()?,
        None => NoiseSpec::Off,
        Some("off") => NoiseSpec::Off,
        Some("melbourne-like") => NoiseSpec::MelbourneLike,
        Some("inline") => load_inline()?,
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Usage(format!("cannot read noise profile {path}: {e}"))
            })?;
            let model = NoiseModel::load_profile(&text)
                .map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
            NoiseSpec::Inline(model)
        }
    };
    if !matches!(spec, NoiseSpec::Inline(_)) && !inline.is_empty() {
        return Err(CliError::Usage(format!(
            "config has a [noise] section but `noise = {}` selects a named profile; drop one",
            spec.name()
        )));
    }
    Ok(spec)
}

fn resolve_shots(common: &CommonArgs, bag: &mut KeyBag) -> Result<ShotMode, CliError> {
    let mode = if common.exact {
        ShotMode::Exact
    } else if let Some(n) = common.shots {
        ShotMode::Shots(n)
    } else {
        bag.take_shots()?.unwrap_or(ShotMode::Shots(1024))
    };
    if mode == ShotMode::Shots(0) {
        return Err(CliError::Usage("shot count must be at least 1".to_string()));
    }
    Ok(mode)
}

fn parse_field(value: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "field must be three comma-separated numbers, got `{value}`"
        )));
    }
    let mut field = [0.0; 3];
    for (slot, part) in field.iter_mut().zip(&parts) {
        *slot = part.parse::<f64>().map_err(|_| {
            CliError::Usage(format!("field component `{part}` is not a number"))
        })?;
    }
    if field.iter().map(|b| b * b).sum::<f64>() <= 0.0 {
        return Err(CliError::Usage("field must be non-zero".to_string()));
    }
    Ok(field)
}

fn resolve_field(
    flag: Option<&str>,
    bag: &mut KeyBag,
) -> Result<[f64; 3], CliError> {
    let file = bag.take("field").map(|(v, _)| v);
    match flag.map(|v| v.to_string()).or(file) {
        Some(value) => parse_field(&value),
        None => Ok([1.0, 1.0, 1.0]),
    }
}

/// Flag-beats-file precedence for a path key. The file key is consumed
/// either way so an overridden value is not reported as unknown.
fn resolve_path(flag: Option<PathBuf>, bag: &mut KeyBag, key: &str) -> Option<PathBuf> {
    let file = bag.take(key).map(|(v, _)| PathBuf::from(v));
    flag.or(file)
}

fn resolve_exchange(flag: Option<f64>, bag: &mut KeyBag) -> Result<f64, CliError> {
    let exchange = match flag.or(bag.take_f64("exchange")?) {
        Some(j) => j,
        None => 1.0,
    };
    if !(exchange > 0.0) {
        return Err(CliError::Usage(format!(
            "exchange must be positive, got {exchange}"
        )));
    }
    Ok(exchange)
}

fn check_qubits(qubits: usize) -> Result<usize, CliError> {
    if qubits == 1 || qubits == 2 {
        Ok(qubits)
    } else {
        Err(CliError::Usage(format!("qubits must be 1 or 2, got {qubits}")))
    }
}

fn field_value(field: &[f64; 3]) -> String {
    format!("{},{},{}", field[0], field[1], field[2])
}

fn shots_value(mode: ShotMode) -> String {
    match mode {
        ShotMode::Exact => "exact".to_string(),
        ShotMode::Shots(n) => n.to_string(),
    }
}

fn entry(section: &str, key: &str, value: String) -> KvEntry {
    KvEntry { section: Some(section.to_string()), key: key.to_string(), value, line: 0 }
}

/// Appends the inline `[noise]` section for non-named profiles, so the
/// resolved config reproduces the run without the original profile file.
fn push_noise_entries(entries: &mut Vec<KvEntry>, spec: &NoiseSpec) {
    if let NoiseSpec::Inline(m) = spec {
        let mut push = |key: &str, value: String| entries.push(entry("noise", key, value));
        push("enabled", m.enabled.to_string());
        push("gate_depolarizing_1q", m.gate_depolarizing_1q.to_string());
        push("gate_depolarizing_2q", m.gate_depolarizing_2q.to_string());
        push("amplitude_damping", m.amplitude_damping.to_string());
        push("phase_damping", m.phase_damping.to_string());
        push("readout_flip_0to1", m.readout_flip_0to1.to_string());
        push("readout_flip_1to0", m.readout_flip_1to0.to_string());
        push("noisy_basis_rotations", m.noisy_basis_rotations.to_string());
    }
}

/// Fully resolved `train` run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainRun {
    pub seed: u64,
    pub out: PathBuf,
    pub shot_mode: ShotMode,
    pub noise: NoiseSpec,
    pub qubits: usize,
    pub gates: usize,
    pub epochs: usize,
    pub circuits: usize,
    pub hidden: usize,
    pub delta: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub memory: usize,
    pub batch: usize,
    pub target_period: u64,
    pub epsilon_initial: f64,
    pub epsilon_final: f64,
    pub epsilon_anneal: u64,
    pub random_rotation: bool,
    pub field: [f64; 3],
    pub exchange: f64,
    pub checkpoint_every: usize,
}

impl TrainRun {
    pub fn resolve(args: &TrainArgs) -> Result<Self, CliError> {
        let entries = load_entries(args.common.config.as_deref())?;
        let mut bag = KeyBag::new(&entries, "train")?;
        let qubits = check_qubits(args.qubits.or(bag.take_usize("qubits")?).unwrap_or(1))?;
        let gates = args.gates.or(bag.take_usize("gates")?).unwrap_or(10);
        let one = qubits == 1;
        let run = TrainRun {
            seed: args.common.seed.or(bag.take_u64("seed")?).unwrap_or(0),
            out: resolve_path(args.common.out.clone(), &mut bag, "out")
                .unwrap_or_else(|| PathBuf::from(".")),
            shot_mode: resolve_shots(&args.common, &mut bag)?,
            noise: resolve_noise(args.common.noise.as_deref(), &mut bag, &entries)?,
            qubits,
            gates,
            epochs: args.epochs.or(bag.take_usize("epochs")?).unwrap_or(300),
            circuits: args.circuits.or(bag.take_usize("circuits")?).unwrap_or(100),
            hidden: args
                .hidden
                .or(bag.take_usize("hidden")?)
                .unwrap_or(if one { 32 } else { 64 }),
            delta: args
                .delta
                .or(bag.take_f64("delta")?)
                .unwrap_or(if one { 0.5 } else { 1.0 }),
            gamma: args.gamma.or(bag.take_f64("gamma")?).unwrap_or(0.99),
            alpha: args.alpha.or(bag.take_f64("alpha")?).unwrap_or(0.05),
            memory: args.memory.or(bag.take_usize("memory")?).unwrap_or(32),
            batch: args.batch.or(bag.take_usize("batch")?).unwrap_or(1),
            target_period: args
                .target_period
                .or(bag.take_u64("target_period")?)
                .unwrap_or(500),
            epsilon_initial: args
                .epsilon_initial
                .or(bag.take_f64("epsilon_initial")?)
                .unwrap_or(1.0),
            epsilon_final: args
                .epsilon_final
                .or(bag.take_f64("epsilon_final")?)
                .unwrap_or(0.05),
            epsilon_anneal: args
                .epsilon_anneal
                .or(bag.take_u64("epsilon_anneal")?)
                .unwrap_or(10 * gates as u64),
            random_rotation: args.random_rotation
                || bag.take_bool("random_rotation")?.unwrap_or(false),
            field: resolve_field(args.field.as_deref(), &mut bag)?,
            exchange: resolve_exchange(args.exchange, &mut bag)?,
            checkpoint_every: args
                .checkpoint_every
                .or(bag.take_usize("checkpoint_every")?)
                .unwrap_or(0),
        };
        bag.finish()?;
        Ok(run)
    }

    pub fn serialize(&self) -> String {
        let mut entries = Vec::new();
        let mut push = |key: &str, value: String| entries.push(entry("train", key, value));
        push("seed", self.seed.to_string());
        push("out", self.out.display().to_string());
        push("shots", shots_value(self.shot_mode));
        push("noise", self.noise.name().to_string());
        push("qubits", self.qubits.to_string());
        push("gates", self.gates.to_string());
        push("epochs", self.epochs.to_string());
        push("circuits", self.circuits.to_string());
        push("hidden", self.hidden.to_string());
        push("delta", self.delta.to_string());
        push("gamma", self.gamma.to_string());
        push("alpha", self.alpha.to_string());
        push("memory", self.memory.to_string());
        push("batch", self.batch.to_string());
        push("target_period", self.target_period.to_string());
        push("epsilon_initial", self.epsilon_initial.to_string());
        push("epsilon_final", self.epsilon_final.to_string());
        push("epsilon_anneal", self.epsilon_anneal.to_string());
        push("random_rotation", self.random_rotation.to_string());
        push("field", field_value(&self.field));
        push("exchange", self.exchange.to_string());
        push("checkpoint_every", self.checkpoint_every.to_string());
        push_noise_entries(&mut entries, &self.noise);
        kvfile::serialize(&entries)
    }
}

/// Fully resolved `eval` run. `qubits` stays `None` until the checkpoint
/// pins the problem size.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRun {
    pub seed: u64,
    pub out: PathBuf,
    pub shot_mode: ShotMode,
    pub noise: NoiseSpec,
    pub checkpoint: PathBuf,
    pub episodes: usize,
    pub gates: usize,
    pub epsilon: f64,
    pub qubits: Option<usize>,
    pub field: [f64; 3],
    pub exchange: f64,
    pub correct: bool,
}

impl EvalRun {
    pub fn resolve(args: &EvalArgs) -> Result<Self, CliError> {
        let entries = load_entries(args.common.config.as_deref())?;
        let mut bag = KeyBag::new(&entries, "eval")?;
        let checkpoint = resolve_path(args.checkpoint.clone(), &mut bag, "checkpoint")
            .ok_or_else(|| {
                CliError::Usage("eval needs --checkpoint (or a `checkpoint` key)".to_string())
            })?;
        let qubits = match args.qubits.or(bag.take_usize("qubits")?) {
            Some(q) => Some(check_qubits(q)?),
            None => None,
        };
        let run = EvalRun {
            seed: args.common.seed.or(bag.take_u64("seed")?).unwrap_or(0),
            out: resolve_path(args.common.out.clone(), &mut bag, "out")
                .unwrap_or_else(|| PathBuf::from(".")),
            shot_mode: resolve_shots(&args.common, &mut bag)?,
            noise: resolve_noise(args.common.noise.as_deref(), &mut bag, &entries)?,
            checkpoint,
            episodes: args.episodes.or(bag.take_usize("episodes")?).unwrap_or(100),
            gates: args.gates.or(bag.take_usize("gates")?).unwrap_or(10),
            epsilon: args.epsilon.or(bag.take_f64("epsilon")?).unwrap_or(0.05),
            qubits,
            field: resolve_field(args.field.as_deref(), &mut bag)?,
            exchange: resolve_exchange(args.exchange, &mut bag)?,
            correct: args.correct || bag.take_bool("correct")?.unwrap_or(false),
        };
        bag.finish()?;
        Ok(run)
    }

    pub fn serialize(&self) -> String {
        let mut entries = Vec::new();
        let mut push = |key: &str, value: String| entries.push(entry("eval", key, value));
        push("seed", self.seed.to_string());
        push("out", self.out.display().to_string());
        push("shots", shots_value(self.shot_mode));
        push("noise", self.noise.name().to_string());
        push("checkpoint", self.checkpoint.display().to_string());
        push("episodes", self.episodes.to_string());
        push("gates", self.gates.to_string());
        push("epsilon", self.epsilon.to_string());
        if let Some(q) = self.qubits {
            push("qubits", q.to_string());
        }
        push("field", field_value(&self.field));
        push("exchange", self.exchange.to_string());
        push("correct", self.correct.to_string());
        push_noise_entries(&mut entries, &self.noise);
        kvfile::serialize(&entries)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    ExactCircuit,
    Vqe,
}

impl BaselineKind {
    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::ExactCircuit => "exact-circuit",
            BaselineKind::Vqe => "vqe",
        }
    }

    fn parse(value: &str) -> Result<Self, CliError> {
        match value {
            "exact-circuit" => Ok(BaselineKind::ExactCircuit),
            "vqe" => Ok(BaselineKind::Vqe),
            other => Err(CliError::Usage(format!(
                "baseline kind must be exact-circuit or vqe, got `{other}`"
            ))),
        }
    }
}

/// Fully resolved `baseline` run.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRun {
    pub kind: BaselineKind,
    pub seed: u64,
    pub out: PathBuf,
    pub shot_mode: ShotMode,
    pub noise: NoiseSpec,
    pub qubits: usize,
    pub runs: usize,
    pub iterations: usize,
    pub field: [f64; 3],
    pub exchange: f64,
}

impl BaselineRun {
    pub fn resolve(args: &BaselineArgs) -> Result<Self, CliError> {
        let entries = load_entries(args.common.config.as_deref())?;
        let mut bag = KeyBag::new(&entries, "baseline")?;
        let kind_file = bag.take("kind").map(|(v, _)| v);
        let kind = args.kind.clone().or(kind_file).ok_or_else(|| {
            CliError::Usage("baseline needs a kind: exact-circuit or vqe".to_string())
        })?;
        let run = BaselineRun {
            kind: BaselineKind::parse(&kind)?,
            seed: args.common.seed.or(bag.take_u64("seed")?).unwrap_or(0),
            out: resolve_path(args.common.out.clone(), &mut bag, "out")
                .unwrap_or_else(|| PathBuf::from(".")),
            shot_mode: resolve_shots(&args.common, &mut bag)?,
            noise: resolve_noise(args.common.noise.as_deref(), &mut bag, &entries)?,
            qubits: check_qubits(args.qubits.or(bag.take_usize("qubits")?).unwrap_or(1))?,
            runs: args.runs.or(bag.take_usize("runs")?).unwrap_or(100),
            iterations: args.iterations.or(bag.take_usize("iterations")?).unwrap_or(500),
            field: resolve_field(args.field.as_deref(), &mut bag)?,
            exchange: resolve_exchange(args.exchange, &mut bag)?,
        };
        if run.runs == 0 {
            return Err(CliError::Usage("runs must be at least 1".to_string()));
        }
        bag.finish()?;
        Ok(run)
    }

    pub fn serialize(&self) -> String {
        let mut entries = Vec::new();
        let mut push = |key: &str, value: String| entries.push(entry("baseline", key, value));
        push("kind", self.kind.name().to_string());
        push("seed", self.seed.to_string());
        push("out", self.out.display().to_string());
        push("shots", shots_value(self.shot_mode));
        push("noise", self.noise.name().to_string());
        push("qubits", self.qubits.to_string());
        push("runs", self.runs.to_string());
        push("iterations", self.iterations.to_string());
        push("field", field_value(&self.field));
        push("exchange", self.exchange.to_string());
        push_noise_entries(&mut entries, &self.noise);
        kvfile::serialize(&entries)
    }
}

/// Fully resolved `vqe` run.
#[derive(Debug, Clone, PartialEq)]
pub struct VqeRun {
    pub seed: u64,
    pub out: PathBuf,
    pub shot_mode: ShotMode,
    pub noise: NoiseSpec,
    pub exchange: f64,
    pub iterations: usize,
    pub fd_step: f64,
    pub calibration_period: usize,
    pub cap_step: bool,
}

impl VqeRun {
    pub fn resolve(args: &VqeArgs) -> Result<Self, CliError> {
        let entries = load_entries(args.common.config.as_deref())?;
        let mut bag = KeyBag::new(&entries, "vqe")?;
        let cap_from_file = bag.take_bool("cap_step")?;
        let run = VqeRun {
            seed: args.common.seed.or(bag.take_u64("seed")?).unwrap_or(0),
            out: resolve_path(args.common.out.clone(), &mut bag, "out")
                .unwrap_or_else(|| PathBuf::from(".")),
            shot_mode: resolve_shots(&args.common, &mut bag)?,
            noise: resolve_noise(args.common.noise.as_deref(), &mut bag, &entries)?,
            exchange: resolve_exchange(args.exchange, &mut bag)?,
            iterations: args.iterations.or(bag.take_usize("iterations")?).unwrap_or(500),
            fd_step: args.fd_step.or(bag.take_f64("fd_step")?).unwrap_or(0.1),
            calibration_period: args
                .calibration_period
                .or(bag.take_usize("calibration_period")?)
                .unwrap_or(20),
            cap_step: if args.uncapped { false } else { cap_from_file.unwrap_or(true) },
        };
        bag.finish()?;
        Ok(run)
    }

    pub fn serialize(&self) -> String {
        let mut entries = Vec::new();
        let mut push = |key: &str, value: String| entries.push(entry("vqe", key, value));
        push("seed", self.seed.to_string());
        push("out", self.out.display().to_string());
        push("shots", shots_value(self.shot_mode));
        push("noise", self.noise.name().to_string());
        push("exchange", self.exchange.to_string());
        push("iterations", self.iterations.to_string());
        push("fd_step", self.fd_step.to_string());
        push("calibration_period", self.calibration_period.to_string());
        push("cap_step", self.cap_step.to_string());
        push_noise_entries(&mut entries, &self.noise);
        kvfile::serialize(&entries)
    }
}

/// Fully resolved `sumrule` run.
#[derive(Debug, Clone, PartialEq)]
pub struct SumruleRun {
    pub input: PathBuf,
    pub out: PathBuf,
    pub exchange: f64,
}

impl SumruleRun {
    pub fn resolve(args: &SumruleArgs) -> Result<Self, CliError> {
        let entries = load_entries(args.config.as_deref())?;
        let mut bag = KeyBag::new(&entries, "sumrule")?;
        let run = SumruleRun {
            input: resolve_path(args.input.clone(), &mut bag, "input").ok_or_else(|| {
                CliError::Usage("sumrule needs a correlator CSV to read".to_string())
            })?,
            out: resolve_path(args.out.clone(), &mut bag, "out")
                .unwrap_or_else(|| PathBuf::from(".")),
            exchange: resolve_exchange(args.exchange, &mut bag)?,
        };
        bag.finish()?;
        Ok(run)
    }

    pub fn serialize(&self) -> String {
        let mut entries = Vec::new();
        let mut push = |key: &str, value: String| entries.push(entry("sumrule", key, value));
        push("input", self.input.display().to_string());
        push("out", self.out.display().to_string());
        push("exchange", self.exchange.to_string());
        kvfile::serialize(&entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    #[derive(Parser)]
    struct TrainCli {
        #[command(flatten)]
        args: TrainArgs,
    }

    #[derive(Parser)]
    struct VqeCli {
        #[command(flatten)]
        args: VqeArgs,
    }

    fn train_args(argv: &[&str]) -> TrainArgs {
        let mut full = vec!["spinrl-test"];
        full.extend_from_slice(argv);
        TrainCli::parse_from(full).args
    }

    #[test]
    fn defaults_track_the_problem_size() {
        let one = TrainRun::resolve(&train_args(&[])).unwrap();
        assert_eq!((one.qubits, one.hidden, one.delta), (1, 32, 0.5));
        assert_eq!(one.shot_mode, ShotMode::Shots(1024));
        assert_eq!(one.epsilon_anneal, 100);
        let two = TrainRun::resolve(&train_args(&["--qubits", "2"])).unwrap();
        assert_eq!((two.qubits, two.hidden, two.delta), (2, 64, 1.0));
    }

    #[test]
    fn command_line_beats_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "seed = 3\n[train]\nepochs = 7\nhidden = 48\n").unwrap();
        let args = train_args(&["--config", path.to_str().unwrap(), "--epochs", "9"]);
        let run = TrainRun::resolve(&args).unwrap();
        assert_eq!(run.seed, 3);
        assert_eq!(run.epochs, 9);
        assert_eq!(run.hidden, 48);
    }

    #[test]
    fn sections_for_other_commands_are_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "[eval]\nepisodes = 5\n[train]\nepochs = 2\n").unwrap();
        let run = TrainRun::resolve(&train_args(&["--config", path.to_str().unwrap()])).unwrap();
        assert_eq!(run.epochs, 2);
    }

    #[test]
    fn unknown_keys_and_sections_fail_loudly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "[train]\nepcohs = 2\n").unwrap();
        let err = TrainRun::resolve(&train_args(&["--config", path.to_str().unwrap()]))
            .unwrap_err();
        assert!(err.to_string().contains("unknown key `epcohs`"), "{err}");
        assert!(err.to_string().contains("line 2"), "{err}");

        std::fs::write(&path, "[trian]\nepochs = 2\n").unwrap();
        let err = TrainRun::resolve(&train_args(&["--config", path.to_str().unwrap()]))
            .unwrap_err();
        assert!(err.to_string().contains("unknown section"), "{err}");
    }

    #[test]
    fn round_trip_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let args = train_args(&[
            "--qubits",
            "2",
            "--shots",
            "256",
            "--noise",
            "melbourne-like",
            "--delta",
            "0.75",
            "--seed",
            "11",
        ]);
        let run = TrainRun::resolve(&args).unwrap();
        let path = dir.path().join("resolved.cfg");
        std::fs::write(&path, run.serialize()).unwrap();
        let again =
            TrainRun::resolve(&train_args(&["--config", path.to_str().unwrap()])).unwrap();
        assert_eq!(run, again);
    }

    #[test]
    fn round_trip_preserves_inline_noise() {
        let dir = tempfile::tempdir().unwrap();
        let profile = dir.path().join("custom.noise");
        std::fs::write(
            &profile,
            "gate_depolarizing_1q = 0.002\nreadout_flip_0to1 = 0.03\n",
        )
        .unwrap();
        let run = TrainRun::resolve(&train_args(&["--noise", profile.to_str().unwrap()]))
            .unwrap();
        let NoiseSpec::Inline(model) = &run.noise else { panic!("expected inline noise") };
        assert_eq!(model.gate_depolarizing_1q, 0.002);
        assert!(model.enabled);

        let path = dir.path().join("resolved.cfg");
        std::fs::write(&path, run.serialize()).unwrap();
        let again =
            TrainRun::resolve(&train_args(&["--config", path.to_str().unwrap()])).unwrap();
        assert_eq!(run, again);
    }

    #[test]
    fn named_profile_conflicts_with_inline_section() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "noise = off\n[noise]\nphase_damping = 0.01\n").unwrap();
        let err = TrainRun::resolve(&train_args(&["--config", path.to_str().unwrap()]))
            .unwrap_err();
        assert!(err.to_string().contains("named profile"), "{err}");
    }

    #[test]
    fn vqe_round_trip_and_uncapped_flag() {
        let vqe = |argv: &[&str]| {
            let mut full = vec!["spinrl-test"];
            full.extend_from_slice(argv);
            VqeCli::parse_from(full).args
        };
        let run = VqeRun::resolve(&vqe(&["--uncapped", "--iterations", "40"])).unwrap();
        assert!(!run.cap_step);
        assert_eq!(run.iterations, 40);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("resolved.cfg");
        std::fs::write(&path, run.serialize()).unwrap();
        let again = VqeRun::resolve(&vqe(&["--config", path.to_str().unwrap()])).unwrap();
        assert_eq!(run, again);
    }

    #[test]
    fn bad_values_name_their_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "[train]\nepochs = many\n").unwrap();
        let err = TrainRun::resolve(&train_args(&["--config", path.to_str().unwrap()]))
            .unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(matches!(err, CliError::Usage(_)));
    }
}
