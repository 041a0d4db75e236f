//! Noise channels and device-style noise profiles.
//!
//! Gate noise is modeled with standard single-qubit Kraus channels applied
//! after each gate on every qubit the gate touches:
//!
//! - depolarizing with probability `p`: `rho -> (1-p) rho + p I/2`,
//! - amplitude damping with rate `gamma` (energy relaxation toward |0>),
//! - phase damping with rate `lambda` (pure dephasing).
//!
//! Readout error is a classical confusion process applied at measurement
//! time: each bit flips `0 -> 1` with probability `readout_flip_0to1` and
//! `1 -> 0` with probability `readout_flip_1to0`, independently per qubit.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::kvfile;
use crate::qsim::gate::Mat2;
use crate::scalar::{real, Real};

/// Channel parameters for a simulated device.
///
/// A disabled model short-circuits everything: gates are applied exactly
/// and measurement is ideal. Basis-change rotations prepended for X/Y
/// measurements are treated as part of readout and are noiseless unless
/// `noisy_basis_rotations` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel<R: Real> {
    pub enabled: bool,
    /// Depolarizing probability after each single-qubit gate.
    pub gate_depolarizing_1q: R,
    /// Depolarizing probability applied to each qubit of a two-qubit gate.
    pub gate_depolarizing_2q: R,
    /// Amplitude-damping rate applied per qubit touched by a gate.
    pub amplitude_damping: R,
    /// Phase-damping rate applied per qubit touched by a gate.
    pub phase_damping: R,
    /// Probability that a measured 0 is reported as 1.
    pub readout_flip_0to1: R,
    /// Probability that a measured 1 is reported as 0.
    pub readout_flip_1to0: R,
    /// Whether measurement-basis rotations also suffer gate noise.
    pub noisy_basis_rotations: bool,
}

impl<R: Real> NoiseModel<R> {
    /// Ideal device: all channels off.
    pub fn off() -> Self {
        NoiseModel {
            enabled: false,
            gate_depolarizing_1q: R::zero(),
            gate_depolarizing_2q: R::zero(),
            amplitude_damping: R::zero(),
            phase_damping: R::zero(),
            readout_flip_0to1: R::zero(),
            readout_flip_1to0: R::zero(),
            noisy_basis_rotations: false,
        }
    }

    /// Noise profile shaped like a small public superconducting device:
    /// weak single-qubit gate noise, an order of magnitude more on
    /// two-qubit gates, mild relaxation and dephasing per gate, and an
    /// asymmetric percent-level readout error (1s decay toward 0 during
    /// the readout window, so flipping 1->0 is more likely than 0->1).
    pub fn melbourne_like() -> Self {
        NoiseModel {
            enabled: true,
            gate_depolarizing_1q: real(0.001),
            gate_depolarizing_2q: real(0.01),
            amplitude_damping: real(0.003),
            phase_damping: real(0.003),
            readout_flip_0to1: real(0.017),
            readout_flip_1to0: real(0.024),
            noisy_basis_rotations: false,
        }
    }

    /// Checks every rate is a valid probability.
    pub fn validate(&self) -> Result<()> {
        let fields: [(&'static str, R); 6] = [
            ("gate_depolarizing_1q", self.gate_depolarizing_1q),
            ("gate_depolarizing_2q", self.gate_depolarizing_2q),
            ("amplitude_damping", self.amplitude_damping),
            ("phase_damping", self.phase_damping),
            ("readout_flip_0to1", self.readout_flip_0to1),
            ("readout_flip_1to0", self.readout_flip_1to0),
        ];
        for (name, value) in fields {
            if !(value >= R::zero() && value <= R::one()) {
                return Err(Error::InvalidProbability {
                    name,
                    value: value.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }

    /// True when readout flips can change sampled bitstrings.
    pub fn has_readout_error(&self) -> bool {
        self.enabled && (self.readout_flip_0to1 > R::zero() || self.readout_flip_1to0 > R::zero())
    }

    /// Kraus channels applied to one qubit after a single-qubit gate.
    pub fn channels_after_1q(&self) -> Vec<Vec<Mat2<R>>> {
        self.channels_with_depolarizing(self.gate_depolarizing_1q)
    }

    /// Kraus channels applied to each qubit after a two-qubit gate.
    pub fn channels_after_2q(&self) -> Vec<Vec<Mat2<R>>> {
        self.channels_with_depolarizing(self.gate_depolarizing_2q)
    }

    fn channels_with_depolarizing(&self, p: R) -> Vec<Vec<Mat2<R>>> {
        let mut out = Vec::new();
        if !self.enabled {
            return out;
        }
        if p > R::zero() {
            out.push(depolarizing_kraus(p));
        }
        if self.amplitude_damping > R::zero() {
            out.push(amplitude_damping_kraus(self.amplitude_damping));
        }
        if self.phase_damping > R::zero() {
            out.push(phase_damping_kraus(self.phase_damping));
        }
        out
    }

    /// Loads a profile from a `key = value` text file. Keys may sit at the
    /// top level or under a `[noise]` section and must match the field
    /// names of this struct; unknown keys are rejected so typos fail loudly.
    pub fn load_profile(text: &str) -> Result<Self> {
        let entries = kvfile::parse(text)?;
        let mut model = Self::off();
        model.enabled = true;
        for entry in &entries {
            match entry.section.as_deref() {
                None | Some("noise") => {}
                Some(other) => {
                    return Err(Error::InvalidConfig(format!(
                        "line {}: unknown section [{other}] in noise profile",
                        entry.line
                    )))
                }
            }
            let parse_rate = |value: &str| -> Result<R> {
                value.parse::<f64>().map(real).map_err(|_| {
                    Error::InvalidConfig(format!(
                        "line {}: {} must be a number, got `{}`",
                        entry.line, entry.key, value
                    ))
                })
            };
            match entry.key.as_str() {
                "gate_depolarizing_1q" => model.gate_depolarizing_1q = parse_rate(&entry.value)?,
                "gate_depolarizing_2q" => model.gate_depolarizing_2q = parse_rate(&entry.value)?,
                "amplitude_damping" => model.amplitude_damping = parse_rate(&entry.value)?,
                "phase_damping" => model.phase_damping = parse_rate(&entry.value)?,
                "readout_flip_0to1" => model.readout_flip_0to1 = parse_rate(&entry.value)?,
                "readout_flip_1to0" => model.readout_flip_1to0 = parse_rate(&entry.value)?,
                "noisy_basis_rotations" => {
                    model.noisy_basis_rotations =
                        entry.value.parse::<bool>().map_err(|_| {
                            Error::InvalidConfig(format!(
                                "line {}: noisy_basis_rotations must be true or false",
                                entry.line
                            ))
                        })?
                }
                "enabled" => {
                    model.enabled = entry.value.parse::<bool>().map_err(|_| {
                        Error::InvalidConfig(format!(
                            "line {}: enabled must be true or false",
                            entry.line
                        ))
                    })?
                }
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "line {}: unknown noise parameter `{other}`",
                        entry.line
                    )))
                }
            }
        }
        model.validate()?;
        Ok(model)
    }
}

/// Kraus operators `{sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}`
/// realizing `rho -> (1-p) rho + p I/2`.
pub fn depolarizing_kraus<R: Real>(p: R) -> Vec<Mat2<R>> {
    let z = Complex::new(R::zero(), R::zero());
    let quarter = p / real::<R>(4.0);
    let k_i = (R::one() - real::<R>(3.0) * quarter).sqrt();
    let k_p = quarter.sqrt();
    vec![
        // sqrt(1 - 3p/4) I
        [
            Complex::new(k_i, R::zero()),
            z,
            z,
            Complex::new(k_i, R::zero()),
        ],
        // sqrt(p/4) X
        [z, Complex::new(k_p, R::zero()), Complex::new(k_p, R::zero()), z],
        // sqrt(p/4) Y
        [z, Complex::new(R::zero(), -k_p), Complex::new(R::zero(), k_p), z],
        // sqrt(p/4) Z
        [
            Complex::new(k_p, R::zero()),
            z,
            z,
            Complex::new(-k_p, R::zero()),
        ],
    ]
}

/// Kraus operators `{diag(1, sqrt(1-gamma)), sqrt(gamma) |0><1|}`.
pub fn amplitude_damping_kraus<R: Real>(gamma: R) -> Vec<Mat2<R>> {
    let z = Complex::new(R::zero(), R::zero());
    vec![
        [
            Complex::new(R::one(), R::zero()),
            z,
            z,
            Complex::new((R::one() - gamma).sqrt(), R::zero()),
        ],
        [z, Complex::new(gamma.sqrt(), R::zero()), z, z],
    ]
}

/// Kraus operators `{diag(1, sqrt(1-lambda)), diag(0, sqrt(lambda))}`.
pub fn phase_damping_kraus<R: Real>(lambda: R) -> Vec<Mat2<R>> {
    let z = Complex::new(R::zero(), R::zero());
    vec![
        [
            Complex::new(R::one(), R::zero()),
            z,
            z,
            Complex::new((R::one() - lambda).sqrt(), R::zero()),
        ],
        [z, z, z, Complex::new(lambda.sqrt(), R::zero())],
    ]
}
