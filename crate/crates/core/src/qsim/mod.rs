//! Exact density-matrix simulation of small qubit registers.
//!
//! States are dense row-major matrices over `Complex<R>` for registers of
//! one to four qubits. Qubit 0 is the *most significant* bit of a basis
//! index, so for two qubits the basis order is |00>, |01>, |10>, |11> and
//! a bitstring reads left to right as qubit 0, qubit 1.
//!
//! Gates are applied as `rho -> U rho U^dagger` with `U` embedded into the
//! full register; gate noise is applied afterwards as single-qubit Kraus
//! channels on every qubit the gate touched (see [`noise`]). Measurement
//! either samples bitstrings shot by shot or returns the exact outcome
//! distribution, in both cases routed through the classical readout-error
//! model when one is enabled.

mod gate;
pub mod linalg;
mod noise;

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

pub use gate::{
    cis, cnot, identity_1q, u3, unitary_1q_from_matrix, unitary_2q_from_matrix, x_basis_rotation,
    y_basis_rotation, Gate, Mat2, Mat4, Unitary1Q, Unitary2Q,
};
pub use noise::{amplitude_damping_kraus, depolarizing_kraus, phase_damping_kraus, NoiseModel};

/// How measurement statistics are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShotMode {
    /// Exact outcome probabilities (infinite-shot limit).
    Exact,
    /// Finite sampling with the given number of shots per basis setting.
    Shots(u64),
}

/// Density matrix of a small qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState<R: Real> {
    n_qubits: usize,
    /// Row-major `dim x dim` matrix, `dim = 2^n_qubits`.
    rho: Vec<Complex<R>>,
}

impl<R: Real> DensityState<R> {
    /// All-zeros computational basis state |0...0><0...0|.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        if !(1..=4).contains(&n_qubits) {
            return Err(Error::UnsupportedQubits(n_qubits));
        }
        let dim = 1 << n_qubits;
        let mut rho = vec![Complex::new(R::zero(), R::zero()); dim * dim];
        rho[0] = Complex::new(R::one(), R::zero());
        Ok(DensityState { n_qubits, rho })
    }

    /// Pure state |psi><psi| from a normalized amplitude vector.
    pub fn from_pure(amplitudes: &[Complex<R>]) -> Result<Self> {
        let dim = amplitudes.len();
        let n_qubits = match dim {
            2 => 1,
            4 => 2,
            8 => 3,
            16 => 4,
            _ => return Err(Error::UnsupportedQubits(0)),
        };
        let mut rho = vec![Complex::new(R::zero(), R::zero()); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                rho[r * dim + c] = amplitudes[r] * amplitudes[c].conj();
            }
        }
        Ok(DensityState { n_qubits, rho })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Raw row-major matrix entries.
    pub fn matrix(&self) -> &[Complex<R>] {
        &self.rho
    }

    /// Real part of the trace (the imaginary part is zero up to rounding).
    pub fn trace(&self) -> R {
        let dim = self.dim();
        let mut t = R::zero();
        for i in 0..dim {
            t += self.rho[i * dim + i].re;
        }
        t
    }

    /// Checks the defining properties of a density matrix: Hermitian,
    /// unit trace and positive semidefinite, all within `tol`.
    pub fn validate(&self, tol: R) -> Result<()> {
        let dim = self.dim();
        if (self.trace() - R::one()).abs() > tol {
            return Err(Error::InvalidConfig(format!(
                "density matrix trace {} is not 1",
                self.trace()
            )));
        }
        for r in 0..dim {
            for c in 0..dim {
                let d = self.rho[r * dim + c] - self.rho[c * dim + r].conj();
                if d.norm() > tol {
                    return Err(Error::InvalidConfig(
                        "density matrix is not Hermitian".to_string(),
                    ));
                }
            }
        }
        let eigs = linalg::hermitian_eigenvalues(&self.rho, dim);
        if eigs.iter().any(|&e| e < -tol) {
            return Err(Error::InvalidConfig(
                "density matrix has a negative eigenvalue".to_string(),
            ));
        }
        Ok(())
    }

    /// Computational-basis outcome probabilities (diagonal, clamped at 0).
    pub fn probabilities(&self) -> Vec<R> {
        let dim = self.dim();
        (0..dim)
            .map(|i| self.rho[i * dim + i].re.max(R::zero()))
            .collect()
    }

    /// Applies a gate to the given targets, followed by the noise model's
    /// per-qubit channels on every target (when noise is enabled).
    pub fn apply_gate(
        &mut self,
        gate: &Gate<R>,
        targets: &[usize],
        noise: &NoiseModel<R>,
    ) -> Result<()> {
        self.check_targets(targets, gate.arity())?;
        match gate {
            Gate::One(g) => self.apply_unitary_1q(g, targets[0])?,
            Gate::Two(g) => self.apply_unitary_2q(g, targets[0], targets[1])?,
        }
        let channels = match gate {
            Gate::One(_) => noise.channels_after_1q(),
            Gate::Two(_) => noise.channels_after_2q(),
        };
        for &t in targets {
            for kraus in &channels {
                self.apply_kraus_1q(kraus, t)?;
            }
        }
        debug_assert!(
            (self.trace() - R::one()).abs() < real::<R>(1e3) * R::epsilon() * real::<R>(16.0),
            "trace drifted from 1 after a gate"
        );
        Ok(())
    }

    /// Applies a bare single-qubit unitary with no noise (used for
    /// measurement-basis rotations and for building reference circuits).
    pub fn apply_unitary_1q(&mut self, gate: &Unitary1Q<R>, target: usize) -> Result<()> {
        self.check_targets(&[target], 1)?;
        let full = embed_1q(&gate.matrix, target, self.n_qubits);
        self.conjugate_by(&full);
        Ok(())
    }

    /// Applies a bare two-qubit unitary with no noise. The first target is
    /// the more significant local bit of the gate matrix.
    pub fn apply_unitary_2q(&mut self, gate: &Unitary2Q<R>, a: usize, b: usize) -> Result<()> {
        self.check_targets(&[a, b], 2)?;
        let full = embed_2q(&gate.matrix, a, b, self.n_qubits);
        self.conjugate_by(&full);
        Ok(())
    }

    /// Applies one single-qubit Kraus channel to `target`:
    /// `rho -> sum_k K_k rho K_k^dagger`.
    pub fn apply_kraus_1q(&mut self, kraus: &[Mat2<R>], target: usize) -> Result<()> {
        self.check_targets(&[target], 1)?;
        let dim = self.dim();
        let zero = Complex::new(R::zero(), R::zero());
        let mut acc = vec![zero; dim * dim];
        for k in kraus {
            let full = embed_1q(k, target, self.n_qubits);
            let tmp = linalg::mat_mul(&full, &self.rho, dim);
            let out = linalg::mat_mul(&tmp, &linalg::dagger(&full, dim), dim);
            for i in 0..dim * dim {
                acc[i] = acc[i] + out[i];
            }
        }
        self.rho = acc;
        Ok(())
    }

    /// Exact outcome distribution, with the readout confusion applied when
    /// the noise model has readout error.
    pub fn exact_probabilities(&self, noise: &NoiseModel<R>) -> Vec<R> {
        let mut p = self.probabilities();
        if noise.has_readout_error() {
            for q in 0..self.n_qubits {
                p = confuse_bit(&p, q, self.n_qubits, noise.readout_flip_0to1, noise.readout_flip_1to0);
            }
        }
        p
    }

    /// Draws `shots` bitstrings from the outcome distribution, flipping
    /// each reported bit through the readout-error model.
    ///
    /// Sampling consumes the generator in a fixed order (one draw per shot,
    /// plus one per bit whose flip probability is nonzero), so equal seeds
    /// give equal counts.
    pub fn sample_counts(
        &self,
        shots: u64,
        noise: &NoiseModel<R>,
        rng: &mut impl Rng,
    ) -> Result<MeasurementOutcome> {
        if shots == 0 {
            return Err(Error::InvalidShots);
        }
        let n = self.n_qubits;
        let dim = self.dim();
        let p: Vec<f64> = self
            .probabilities()
            .iter()
            .map(|v| v.to_f64().unwrap_or(0.0))
            .collect();
        let mut cdf = Vec::with_capacity(dim);
        let mut acc = 0.0;
        for &v in &p {
            acc += v;
            cdf.push(acc);
        }
        let total = acc;
        let p01 = noise.readout_flip_0to1.to_f64().unwrap_or(0.0);
        let p10 = noise.readout_flip_1to0.to_f64().unwrap_or(0.0);
        let readout = noise.has_readout_error();

        let mut counts: BTreeMap<String, u64> =
            (0..dim).map(|i| (bitstring(i, n), 0)).collect();
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * total;
            let mut idx = cdf.partition_point(|&c| c <= u);
            if idx >= dim {
                idx = dim - 1;
            }
            if readout {
                for q in 0..n {
                    let bit = (idx >> (n - 1 - q)) & 1;
                    let flip_p = if bit == 0 { p01 } else { p10 };
                    if flip_p > 0.0 && rng.random::<f64>() < flip_p {
                        idx ^= 1 << (n - 1 - q);
                    }
                }
            }
            *counts.get_mut(&bitstring(idx, n)).unwrap() += 1;
        }
        Ok(MeasurementOutcome { counts, shots })
    }

    fn conjugate_by(&mut self, full: &[Complex<R>]) {
        let dim = self.dim();
        let tmp = linalg::mat_mul(full, &self.rho, dim);
        self.rho = linalg::mat_mul(&tmp, &linalg::dagger(full, dim), dim);
    }

    fn check_targets(&self, targets: &[usize], arity: usize) -> Result<()> {
        if targets.len() != arity {
            return Err(Error::ArityMismatch {
                arity,
                targets: targets.len(),
            });
        }
        for &t in targets {
            if t >= self.n_qubits {
                return Err(Error::TargetOutOfRange {
                    target: t,
                    n_qubits: self.n_qubits,
                });
            }
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::DuplicateTargets);
        }
        Ok(())
    }
}

/// Counted measurement outcomes over every bitstring of the register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementOutcome {
    /// Bitstring -> count; every possible bitstring is present, possibly 0.
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
}

impl MeasurementOutcome {
    /// Relative frequencies in basis-index order (|0..0>, |0..1>, ...).
    pub fn frequencies<R: Real>(&self) -> Vec<R> {
        let shots = real::<R>(self.shots as f64);
        self.counts
            .values()
            .map(|&c| real::<R>(c as f64) / shots)
            .collect()
    }
}

/// Bitstring for a basis index, qubit 0 leftmost.
pub fn bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|q| {
            if (index >> (n_qubits - 1 - q)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Embeds a 2x2 matrix acting on `target` into the full register.
pub fn embed_1q<R: Real>(m: &Mat2<R>, target: usize, n_qubits: usize) -> Vec<Complex<R>> {
    let dim = 1 << n_qubits;
    let shift = n_qubits - 1 - target;
    let zero = Complex::new(R::zero(), R::zero());
    let mut full = vec![zero; dim * dim];
    for r in 0..dim {
        let rb = (r >> shift) & 1;
        for lc in 0..2 {
            let c = (r & !(1 << shift)) | (lc << shift);
            full[r * dim + c] = m[rb * 2 + lc];
        }
    }
    full
}

/// Embeds a 4x4 matrix acting on `(a, b)` into the full register; `a` is
/// the more significant local bit.
pub fn embed_2q<R: Real>(m: &Mat4<R>, a: usize, b: usize, n_qubits: usize) -> Vec<Complex<R>> {
    let dim = 1 << n_qubits;
    let sa = n_qubits - 1 - a;
    let sb = n_qubits - 1 - b;
    let zero = Complex::new(R::zero(), R::zero());
    let mut full = vec![zero; dim * dim];
    for r in 0..dim {
        let lr = (((r >> sa) & 1) << 1) | ((r >> sb) & 1);
        let base = r & !(1 << sa) & !(1 << sb);
        for lc in 0..4 {
            let c = base | (((lc >> 1) & 1) << sa) | ((lc & 1) << sb);
            full[r * dim + c] = m[lr * 4 + lc];
        }
    }
    full
}

/// Applies the per-qubit readout confusion to an outcome distribution for
/// one bit position.
fn confuse_bit<R: Real>(p: &[R], qubit: usize, n_qubits: usize, p01: R, p10: R) -> Vec<R> {
    let dim = p.len();
    let shift = n_qubits - 1 - qubit;
    let mut out = vec![R::zero(); dim];
    for i in 0..dim {
        let flipped = i ^ (1 << shift);
        if (i >> shift) & 1 == 0 {
            // Reported 0: true 0 kept, or true 1 flipped down.
            out[i] = p[i] * (R::one() - p01) + p[flipped] * p10;
        } else {
            out[i] = p[i] * (R::one() - p10) + p[flipped] * p01;
        }
    }
    out
}
