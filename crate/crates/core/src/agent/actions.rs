//! The discrete gate alphabet the agent chooses from.
//!
//! Rotations come in a fixed menu derived from one base angle `delta`:
//! positive and negative Z and Y rotations at the full and half angle, per
//! qubit, plus a do-nothing action, and on two qubits the two CNOT
//! orientations. An optional fully random rotation can be appended for
//! experiments with a stochastic alphabet.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{cnot, u3, Gate};
use crate::scalar::{real, Real};

/// What an action does when it is realized as a gate.
#[derive(Debug, Clone, PartialEq)]
pub enum ActionKind<R: Real> {
    /// No gate at all; the state is left untouched (and suffers no noise).
    Idle,
    /// Fixed-angle rotation `u3(theta, phi, lambda)` on one qubit.
    Rotation { qubit: usize, theta: R, phi: R, lambda: R },
    /// CNOT with explicit control and target.
    Cnot { control: usize, target: usize },
    /// Rotation with all three angles drawn fresh on every application.
    RandomRotation { qubit: usize },
}

/// One selectable action with its display label.
///
/// Labels are stable, contain no commas or whitespace, and are what appears
/// in the `gate_sequence` column of metrics files.
#[derive(Debug, Clone, PartialEq)]
pub struct GateAction<R: Real> {
    pub label: String,
    pub kind: ActionKind<R>,
}

impl<R: Real> GateAction<R> {
    /// Concrete gate and target list, or `None` for the idle action.
    ///
    /// Only [`ActionKind::RandomRotation`] consumes the generator (three
    /// draws: theta in [0, pi), phi and lambda in [0, 2 pi)).
    pub fn realize(&self, rng: &mut impl Rng) -> Option<(Gate<R>, Vec<usize>)> {
        match &self.kind {
            ActionKind::Idle => None,
            ActionKind::Rotation { qubit, theta, phi, lambda } => {
                Some((Gate::One(u3(*theta, *phi, *lambda)), vec![*qubit]))
            }
            ActionKind::Cnot { control, target } => {
                Some((Gate::Two(cnot()), vec![*control, *target]))
            }
            ActionKind::RandomRotation { qubit } => {
                let pi = real::<R>(std::f64::consts::PI);
                let two = real::<R>(2.0);
                let theta = real::<R>(rng.random::<f64>()) * pi;
                let phi = real::<R>(rng.random::<f64>()) * two * pi;
                let lambda = real::<R>(rng.random::<f64>()) * two * pi;
                Some((Gate::One(u3(theta, phi, lambda)), vec![*qubit]))
            }
        }
    }
}

/// The ordered action alphabet for a register size.
///
/// One qubit (9 actions, 10 with the random rotation):
/// `IDLE, Z+d, Z-d, Y+d, Y-d, Z+d/2, Z-d/2, Y+d/2, Y-d/2`.
/// Two qubits (19 or 21): `IDLE`, the eight rotations on qubit 1, the same
/// on qubit 2, then `CNOT12` and `CNOT21`. Action indices are the network
/// indices, so this order is part of the checkpoint format.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSet<R: Real> {
    actions: Vec<GateAction<R>>,
    n_qubits: usize,
    delta: R,
    include_random_rotation: bool,
}

impl<R: Real> ActionSet<R> {
    pub fn for_qubits(n_qubits: usize, delta: R, include_random_rotation: bool) -> Result<Self> {
        if !(1..=2).contains(&n_qubits) {
            return Err(Error::UnsupportedQubits(n_qubits));
        }
        if !(delta > R::zero()) {
            return Err(Error::InvalidConfig(format!(
                "rotation step delta must be positive, got {delta}"
            )));
        }
        let mut actions = vec![GateAction {
            label: "IDLE".to_string(),
            kind: ActionKind::Idle,
        }];
        for qubit in 0..n_qubits {
            actions.extend(rotation_menu(qubit, n_qubits, delta));
        }
        if n_qubits == 2 {
            actions.push(GateAction {
                label: "CNOT12".to_string(),
                kind: ActionKind::Cnot { control: 0, target: 1 },
            });
            actions.push(GateAction {
                label: "CNOT21".to_string(),
                kind: ActionKind::Cnot { control: 1, target: 0 },
            });
        }
        if include_random_rotation {
            for qubit in 0..n_qubits {
                actions.push(GateAction {
                    label: qualify("RAND", qubit, n_qubits),
                    kind: ActionKind::RandomRotation { qubit },
                });
            }
        }
        Ok(ActionSet {
            actions,
            n_qubits,
            delta,
            include_random_rotation,
        })
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn get(&self, index: usize) -> &GateAction<R> {
        &self.actions[index]
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn delta(&self) -> R {
        self.delta
    }

    pub fn labels(&self) -> Vec<String> {
        self.actions.iter().map(|a| a.label.clone()).collect()
    }

    /// Serializable recipe; [`ActionSet::from_spec`] rebuilds the same set.
    pub fn spec(&self) -> ActionSetSpec {
        ActionSetSpec {
            n_qubits: self.n_qubits,
            delta: self.delta.to_f64().unwrap_or(f64::NAN),
            include_random_rotation: self.include_random_rotation,
        }
    }

    pub fn from_spec(spec: &ActionSetSpec) -> Result<Self> {
        ActionSet::for_qubits(
            spec.n_qubits,
            real::<R>(spec.delta),
            spec.include_random_rotation,
        )
    }
}

/// The information needed to rebuild an action set from a checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSetSpec {
    pub n_qubits: usize,
    pub delta: f64,
    pub include_random_rotation: bool,
}

/// The eight fixed rotations for one qubit: Z then Y, positive then
/// negative, full angle then half angle.
fn rotation_menu<R: Real>(qubit: usize, n_qubits: usize, delta: R) -> Vec<GateAction<R>> {
    let half = delta / real::<R>(2.0);
    let z = R::zero();
    let entries: [(&str, R, R); 8] = [
        // (label stem, theta, phi): Z rotations are u3(0, angle, 0),
        // Y rotations are u3(angle, 0, 0).
        ("Z+d", z, delta),
        ("Z-d", z, -delta),
        ("Y+d", delta, z),
        ("Y-d", -delta, z),
        ("Z+d/2", z, half),
        ("Z-d/2", z, -half),
        ("Y+d/2", half, z),
        ("Y-d/2", -half, z),
    ];
    entries
        .iter()
        .map(|&(stem, theta, phi)| GateAction {
            label: qualify(stem, qubit, n_qubits),
            kind: ActionKind::Rotation { qubit, theta, phi, lambda: R::zero() },
        })
        .collect()
}

fn qualify(stem: &str, qubit: usize, n_qubits: usize) -> String {
    if n_qubits == 1 {
        stem.to_string()
    } else {
        format!("{stem}@{}", qubit + 1)
    }
}
