//! Pauli correlator estimation and spin-Hamiltonian energies.
//!
//! Everything is measured in the computational basis. To read out X or Y
//! components, a basis-change rotation is prepended per qubit (`H` for X,
//! `H S^dagger` for Y) and the rotated register is measured in Z. A
//! *measurement plan* enumerates the basis settings needed to fill a full
//! correlator vector: three axes for one qubit, all nine axis pairs for
//! two. Single-qubit expectations on a two-qubit register are read from the
//! matched-axis settings (X,X), (Y,Y), (Z,Z), so one plan yields the six
//! singles and nine pair correlators that make up the network input.

use rand::Rng;

use crate::error::{Error, Result};
use crate::qsim::{
    x_basis_rotation, y_basis_rotation, DensityState, Gate, NoiseModel, ShotMode, Unitary1Q,
};
use crate::scalar::{real, Real};

/// Measurement axis for one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// Basis-change rotation bringing this axis onto Z (none for Z itself).
    pub fn rotation<R: Real>(self) -> Option<Unitary1Q<R>> {
        match self {
            Axis::X => Some(x_basis_rotation()),
            Axis::Y => Some(y_basis_rotation()),
            Axis::Z => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        }
    }
}

/// One basis setting: a measurement axis per qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisSetting {
    pub axes: Vec<Axis>,
}

impl BasisSetting {
    pub fn label(&self) -> String {
        self.axes.iter().map(|a| a.name()).collect()
    }
}

/// Ordered pair correlators of the two-qubit layout, after the six singles.
pub const PAIR_ORDER: [(Axis, Axis); 9] = [
    (Axis::Z, Axis::Z),
    (Axis::X, Axis::X),
    (Axis::Y, Axis::Y),
    (Axis::X, Axis::Y),
    (Axis::Y, Axis::X),
    (Axis::X, Axis::Z),
    (Axis::Z, Axis::X),
    (Axis::Y, Axis::Z),
    (Axis::Z, Axis::Y),
];

/// The basis settings required to fill a correlator vector.
///
/// One qubit: X, Y, Z. Two qubits: the nine axis pairs in row-major order
/// with qubit 0's axis outermost (XX, XY, XZ, YX, ...).
pub fn measurement_plan(n_qubits: usize) -> Result<Vec<BasisSetting>> {
    match n_qubits {
        1 => Ok(Axis::ALL
            .iter()
            .map(|&a| BasisSetting { axes: vec![a] })
            .collect()),
        2 => {
            let mut plan = Vec::with_capacity(9);
            for &a0 in &Axis::ALL {
                for &a1 in &Axis::ALL {
                    plan.push(BasisSetting { axes: vec![a0, a1] });
                }
            }
            Ok(plan)
        }
        n => Err(Error::UnsupportedQubits(n)),
    }
}

/// Pauli expectation values in the fixed layout used as network input.
///
/// One qubit: `[<X>, <Y>, <Z>]`. Two qubits: the six singles
/// `[<X1>, <Y1>, <Z1>, <X2>, <Y2>, <Z2>]` followed by the nine pair
/// correlators in [`PAIR_ORDER`].
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorVector<R: Real> {
    n_qubits: usize,
    entries: Vec<R>,
}

impl<R: Real> CorrelatorVector<R> {
    pub fn new(n_qubits: usize, entries: Vec<R>) -> Result<Self> {
        let expected = Self::len_for(n_qubits)?;
        if entries.len() != expected {
            return Err(Error::LayoutMismatch {
                expected,
                got: entries.len(),
            });
        }
        Ok(CorrelatorVector { n_qubits, entries })
    }

    pub fn len_for(n_qubits: usize) -> Result<usize> {
        match n_qubits {
            1 => Ok(3),
            2 => Ok(15),
            n => Err(Error::UnsupportedQubits(n)),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Flat layout, suitable as a network input vector.
    pub fn as_slice(&self) -> &[R] {
        &self.entries
    }

    /// Single-qubit expectation `<A_qubit>`.
    pub fn single(&self, qubit: usize, axis: Axis) -> R {
        let a = axis_offset(axis);
        match self.n_qubits {
            1 => {
                debug_assert_eq!(qubit, 0);
                self.entries[a]
            }
            _ => self.entries[qubit * 3 + a],
        }
    }

    /// Two-qubit correlator `<A_0 B_1>`; panics for one-qubit layouts.
    pub fn pair(&self, axis0: Axis, axis1: Axis) -> R {
        assert_eq!(self.n_qubits, 2, "pair correlators need two qubits");
        self.entries[6 + pair_offset(axis0, axis1)]
    }
}

fn axis_offset(axis: Axis) -> usize {
    match axis {
        Axis::X => 0,
        Axis::Y => 1,
        Axis::Z => 2,
    }
}

fn pair_offset(axis0: Axis, axis1: Axis) -> usize {
    PAIR_ORDER
        .iter()
        .position(|&(a, b)| a == axis0 && b == axis1)
        .expect("all nine axis pairs are in PAIR_ORDER")
}

/// Estimates the full correlator vector of a state.
///
/// Each basis setting is measured on its own copy of the state. Basis
/// rotations are ideal unless the noise model asks for noisy ones; readout
/// error applies in both exact and sampled modes. In `Shots` mode the
/// settings consume the generator in plan order, so equal seeds give equal
/// estimates.
pub fn estimate_correlators<R: Real>(
    state: &DensityState<R>,
    mode: ShotMode,
    noise: &NoiseModel<R>,
    rng: &mut impl Rng,
) -> Result<CorrelatorVector<R>> {
    let n = state.n_qubits();
    let plan = measurement_plan(n)?;
    let mut entries = vec![R::zero(); CorrelatorVector::<R>::len_for(n)?];

    for setting in &plan {
        let mut rotated = state.clone();
        for (q, axis) in setting.axes.iter().enumerate() {
            if let Some(rot) = axis.rotation::<R>() {
                if noise.enabled && noise.noisy_basis_rotations {
                    rotated.apply_gate(&Gate::One(rot), &[q], noise)?;
                } else {
                    rotated.apply_unitary_1q(&rot, q)?;
                }
            }
        }
        let probs: Vec<R> = match mode {
            ShotMode::Exact => rotated.exact_probabilities(noise),
            ShotMode::Shots(s) => rotated.sample_counts(s, noise, rng)?.frequencies(),
        };
        match n {
            1 => {
                entries[axis_offset(setting.axes[0])] = probs[0] - probs[1];
            }
            _ => {
                let (a0, a1) = (setting.axes[0], setting.axes[1]);
                // <A0 B1> = P(00) - P(01) - P(10) + P(11).
                entries[6 + pair_offset(a0, a1)] = probs[0] - probs[1] - probs[2] + probs[3];
                if a0 == a1 {
                    // Matched-axis settings also yield the singles.
                    entries[axis_offset(a0)] = probs[0] + probs[1] - probs[2] - probs[3];
                    entries[3 + axis_offset(a1)] = probs[0] - probs[1] + probs[2] - probs[3];
                }
            }
        }
    }
    CorrelatorVector::new(n, entries)
}

/// The spin Hamiltonians this crate can play against.
///
/// Spins are spin-1/2, `S = sigma/2`.
#[derive(Debug, Clone, PartialEq)]
pub enum Hamiltonian<R: Real> {
    /// `H = B . S` for a single spin in field `B`.
    SingleSpin { field: [R; 3] },
    /// `H = J S_1 . S_2` for two exchange-coupled spins.
    Dimer { exchange: R },
}

impl<R: Real> Hamiltonian<R> {
    pub fn n_qubits(&self) -> usize {
        match self {
            Hamiltonian::SingleSpin { .. } => 1,
            Hamiltonian::Dimer { .. } => 2,
        }
    }

    /// Exact ground-state energy.
    ///
    /// A single spin aligns against the field: `-|B|/2`. The dimer ground
    /// state is the singlet at `-3J/4` for antiferromagnetic coupling
    /// (`J > 0`) and a triplet at `J/4` for `J < 0`.
    pub fn ground_energy(&self) -> R {
        match self {
            Hamiltonian::SingleSpin { field } => {
                let norm =
                    (field[0] * field[0] + field[1] * field[1] + field[2] * field[2]).sqrt();
                -norm / real::<R>(2.0)
            }
            Hamiltonian::Dimer { exchange } => {
                if *exchange >= R::zero() {
                    *exchange * real::<R>(-0.75)
                } else {
                    *exchange * real::<R>(0.25)
                }
            }
        }
    }

    /// Energy of a state from its measured correlators.
    ///
    /// Single spin: `E = (Bx <X> + By <Y> + Bz <Z>) / 2`.
    /// Dimer: `E = J (<XX> + <YY> + <ZZ>) / 4`.
    pub fn energy(&self, c: &CorrelatorVector<R>) -> Result<R> {
        if c.n_qubits() != self.n_qubits() {
            return Err(Error::LayoutMismatch {
                expected: CorrelatorVector::<R>::len_for(self.n_qubits())?,
                got: c.as_slice().len(),
            });
        }
        match self {
            Hamiltonian::SingleSpin { field } => {
                let half = real::<R>(0.5);
                Ok(half
                    * (field[0] * c.single(0, Axis::X)
                        + field[1] * c.single(0, Axis::Y)
                        + field[2] * c.single(0, Axis::Z)))
            }
            Hamiltonian::Dimer { exchange } => Ok(*exchange * spin_dot(c)?),
        }
    }
}

/// `<S_1 . S_2> = (<XX> + <YY> + <ZZ>) / 4` for a two-qubit layout.
pub fn spin_dot<R: Real>(c: &CorrelatorVector<R>) -> Result<R> {
    if c.n_qubits() != 2 {
        return Err(Error::LayoutMismatch {
            expected: 15,
            got: c.as_slice().len(),
        });
    }
    let quarter = real::<R>(0.25);
    Ok(quarter
        * (c.pair(Axis::X, Axis::X) + c.pair(Axis::Y, Axis::Y) + c.pair(Axis::Z, Axis::Z)))
}

/// Total-spin sum-rule residual for two spins 1/2:
/// `2 S(S+1) + 2 <S_1 . S_2>`, which vanishes exactly on the singlet.
///
/// A perfect singlet gives 0, the product state |00> gives 2, and the
/// maximally mixed state gives 1.5; noise pushes the value up from 0.
pub fn sum_rule_residual<R: Real>(c: &CorrelatorVector<R>) -> Result<R> {
    let s_s1 = real::<R>(2.0 * SPIN_HALF_MOMENT);
    Ok(s_s1 + real::<R>(2.0) * spin_dot(c)?)
}

/// `S(S+1)` for a spin 1/2.
const SPIN_HALF_MOMENT: f64 = 0.75;

/// Result of the local-moment rescaling of a measured dimer energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMomentCorrection<R: Real> {
    /// Rescaling factor `X = S(S+1) / |<S_1 . S_2>|`.
    pub multiplier: R,
    /// `J * X * <S_1 . S_2>`, algebraically `-0.75 J`.
    pub corrected_energy: R,
}

/// Rescales a measured dimer energy to compensate depolarizing-style
/// shrinkage of the spin correlations.
///
/// If the prepared state is the singlet contracted uniformly toward the
/// maximally mixed state, every spin correlation shrinks by the same
/// factor, so dividing by the measured `|<S_1 . S_2>| / S(S+1)` restores
/// the ideal energy `-0.75 J` (computed in that closed form, hence exact).
/// The correction is only defined while the correlation stays
/// antiferromagnetic; `<S_1 . S_2> >= 0` is rejected.
pub fn local_spin_correction<R: Real>(
    c: &CorrelatorVector<R>,
    hamiltonian: &Hamiltonian<R>,
) -> Result<LocalMomentCorrection<R>> {
    let exchange = match hamiltonian {
        Hamiltonian::Dimer { exchange } => *exchange,
        Hamiltonian::SingleSpin { .. } => {
            return Err(Error::InvalidConfig(
                "the local-moment correction applies to the two-spin dimer only".to_string(),
            ))
        }
    };
    let dot = spin_dot(c)?;
    if dot >= R::zero() {
        return Err(Error::CorrectionUndefined(dot.to_f64().unwrap_or(f64::NAN)));
    }
    let multiplier = real::<R>(SPIN_HALF_MOMENT) / -dot;
    Ok(LocalMomentCorrection {
        multiplier,
        corrected_energy: real::<R>(-SPIN_HALF_MOMENT) * exchange,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{cnot, u3};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(42)
    }

    /// Exact singlet (|01> - |10>)/sqrt(2) via u3 gates and one CNOT.
    fn singlet() -> DensityState<f64> {
        let mut s = DensityState::zero_state(2).unwrap();
        s.apply_unitary_1q(&u3(PI, 0.0, 0.0), 0).unwrap();
        s.apply_unitary_1q(&u3(-PI / 2.0, 0.0, 0.0), 1).unwrap();
        // Control on qubit 1, flip qubit 0.
        s.apply_unitary_2q(&cnot(), 1, 0).unwrap();
        s
    }

    #[test]
    fn plan_covers_three_axes_then_nine_pairs() {
        let p1 = measurement_plan(1).unwrap();
        assert_eq!(
            p1.iter().map(|s| s.label()).collect::<Vec<_>>(),
            vec!["X", "Y", "Z"]
        );
        let p2 = measurement_plan(2).unwrap();
        assert_eq!(p2.len(), 9);
        assert_eq!(p2[0].label(), "XX");
        assert_eq!(p2[4].label(), "YY");
        assert_eq!(p2[8].label(), "ZZ");
        assert!(measurement_plan(3).is_err());
    }

    #[test]
    fn single_spin_correlators_reproduce_the_bloch_vector() {
        let theta = 1.9_f64;
        let phi = 2.4_f64;
        let mut s = DensityState::zero_state(1).unwrap();
        s.apply_unitary_1q(&u3(theta, phi, 0.0), 0).unwrap();
        let c =
            estimate_correlators(&s, ShotMode::Exact, &NoiseModel::off(), &mut rng()).unwrap();
        assert!((c.single(0, Axis::X) - theta.sin() * phi.cos()).abs() < 1e-12);
        assert!((c.single(0, Axis::Y) - theta.sin() * phi.sin()).abs() < 1e-12);
        assert!((c.single(0, Axis::Z) - theta.cos()).abs() < 1e-12);
    }

    #[test]
    fn field_aligned_ground_state_hits_minus_half_field_norm() {
        // B = (1,1,1): ground Bloch vector -B/|B|, energy -sqrt(3)/2.
        let h = Hamiltonian::SingleSpin { field: [1.0, 1.0, 1.0] };
        let theta = (-(1.0 / 3.0_f64.sqrt())).acos();
        let phi = -3.0 * PI / 4.0;
        let mut s = DensityState::zero_state(1).unwrap();
        s.apply_unitary_1q(&u3(theta, phi, 0.0), 0).unwrap();
        let c =
            estimate_correlators(&s, ShotMode::Exact, &NoiseModel::off(), &mut rng()).unwrap();
        let e = h.energy(&c).unwrap();
        assert!((e - h.ground_energy()).abs() < 1e-12);
        assert!((e + 3.0_f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn singlet_correlators_are_fully_antiparallel() {
        let c = estimate_correlators(&singlet(), ShotMode::Exact, &NoiseModel::off(), &mut rng())
            .unwrap();
        for axis in Axis::ALL {
            assert!((c.pair(axis, axis) + 1.0).abs() < 1e-12, "{:?}", axis);
            assert!(c.single(0, axis).abs() < 1e-12);
            assert!(c.single(1, axis).abs() < 1e-12);
        }
        // Cross-axis pairs vanish on the singlet.
        assert!(c.pair(Axis::X, Axis::Y).abs() < 1e-12);
        assert!(c.pair(Axis::Z, Axis::X).abs() < 1e-12);

        let h = Hamiltonian::Dimer { exchange: 1.0 };
        assert!((h.energy(&c).unwrap() + 0.75).abs() < 1e-12);
        assert!((spin_dot(&c).unwrap() + 0.75).abs() < 1e-12);
        assert!(sum_rule_residual(&c).unwrap().abs() < 1e-12);
    }

    #[test]
    fn product_states_cannot_beat_the_classical_bound() {
        // Antiparallel product states sit exactly at <S1.S2> = -1/4.
        let mut r = rng();
        for _ in 0..20 {
            let theta: f64 = r.random::<f64>() * PI;
            let phi: f64 = r.random::<f64>() * 2.0 * PI;
            let mut s = DensityState::zero_state(2).unwrap();
            s.apply_unitary_1q(&u3(theta, phi, 0.0), 0).unwrap();
            s.apply_unitary_1q(&u3(PI - theta, phi + PI, 0.0), 1).unwrap();
            let c = estimate_correlators(&s, ShotMode::Exact, &NoiseModel::off(), &mut rng())
                .unwrap();
            assert!((spin_dot(&c).unwrap() + 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_state_residual_and_mixed_state_residual() {
        let s = DensityState::<f64>::zero_state(2).unwrap();
        let c =
            estimate_correlators(&s, ShotMode::Exact, &NoiseModel::off(), &mut rng()).unwrap();
        assert!((sum_rule_residual(&c).unwrap() - 2.0).abs() < 1e-12);

        // Fully depolarize both qubits: residual of the mixed state is 1.5.
        let mut m = DensityState::<f64>::zero_state(2).unwrap();
        m.apply_kraus_1q(&crate::qsim::depolarizing_kraus(1.0), 0).unwrap();
        m.apply_kraus_1q(&crate::qsim::depolarizing_kraus(1.0), 1).unwrap();
        let c =
            estimate_correlators(&m, ShotMode::Exact, &NoiseModel::off(), &mut rng()).unwrap();
        assert!((sum_rule_residual(&c).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn correction_rescales_shrunken_singlet_exactly() {
        let j = 2.0;
        let h = Hamiltonian::Dimer { exchange: j };
        // A depolarized singlet: every correlator shrinks by the same factor.
        let mut s = singlet();
        s.apply_kraus_1q(&crate::qsim::depolarizing_kraus(0.12), 0).unwrap();
        s.apply_kraus_1q(&crate::qsim::depolarizing_kraus(0.05), 1).unwrap();
        let c =
            estimate_correlators(&s, ShotMode::Exact, &NoiseModel::off(), &mut rng()).unwrap();
        let dot = spin_dot(&c).unwrap();
        assert!(dot < 0.0 && dot > -0.75);
        let corr = local_spin_correction(&c, &h).unwrap();
        assert!((corr.multiplier - 0.75 / (-dot)).abs() < 1e-12);
        // The closed form makes the corrected energy exact, not approximate.
        assert_eq!(corr.corrected_energy, -0.75 * j);
    }

    #[test]
    fn correction_rejects_non_negative_correlations() {
        let h = Hamiltonian::Dimer { exchange: 1.0 };
        let s = DensityState::zero_state(2).unwrap();
        let c =
            estimate_correlators(&s, ShotMode::Exact, &NoiseModel::off(), &mut rng()).unwrap();
        assert!(matches!(
            local_spin_correction(&c, &h),
            Err(Error::CorrectionUndefined(_))
        ));
        let h1 = Hamiltonian::SingleSpin { field: [0.0, 0.0, 1.0] };
        assert!(local_spin_correction(&c, &h1).is_err());
    }

    #[test]
    fn sampled_correlators_approach_exact_ones() {
        let mut s = DensityState::<f64>::zero_state(2).unwrap();
        s.apply_unitary_1q(&u3(0.8, 1.1, 0.0), 0).unwrap();
        s.apply_unitary_2q(&cnot(), 0, 1).unwrap();
        let exact =
            estimate_correlators(&s, ShotMode::Exact, &NoiseModel::off(), &mut rng()).unwrap();
        let sampled = estimate_correlators(
            &s,
            ShotMode::Shots(400_000),
            &NoiseModel::off(),
            &mut rng(),
        )
        .unwrap();
        for (a, b) in exact.as_slice().iter().zip(sampled.as_slice()) {
            assert!((a - b).abs() < 6e-3, "exact {a} vs sampled {b}");
        }
    }

    #[test]
    fn sampled_correlators_are_deterministic_per_seed() {
        let s = singlet();
        let noise = NoiseModel::melbourne_like();
        let a = estimate_correlators(&s, ShotMode::Shots(1024), &noise, &mut rng()).unwrap();
        let b = estimate_correlators(&s, ShotMode::Shots(1024), &noise, &mut rng()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn readout_error_shrinks_singlet_correlators_in_exact_mode() {
        let mut noise = NoiseModel::<f64>::off();
        noise.enabled = true;
        noise.readout_flip_0to1 = 0.02;
        noise.readout_flip_1to0 = 0.02;
        let c = estimate_correlators(&singlet(), ShotMode::Exact, &noise, &mut rng()).unwrap();
        // Each bit flip multiplies a correlator by (1 - 2p) per qubit.
        let shrink = (1.0 - 2.0 * 0.02_f64).powi(2);
        for axis in Axis::ALL {
            assert!((c.pair(axis, axis) + shrink).abs() < 1e-12);
        }
    }

    #[test]
    fn layout_accessors_match_the_flat_vector() {
        let entries: Vec<f64> = (0..15).map(|i| i as f64).collect();
        let c = CorrelatorVector::new(2, entries).unwrap();
        assert_eq!(c.single(0, Axis::X), 0.0);
        assert_eq!(c.single(0, Axis::Z), 2.0);
        assert_eq!(c.single(1, Axis::Y), 4.0);
        assert_eq!(c.pair(Axis::Z, Axis::Z), 6.0);
        assert_eq!(c.pair(Axis::X, Axis::X), 7.0);
        assert_eq!(c.pair(Axis::Z, Axis::Y), 14.0);
        assert!(CorrelatorVector::new(2, vec![0.0; 9]).is_err());
    }
}
