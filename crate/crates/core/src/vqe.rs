//! Variational baseline for the dimer.
//!
//! The ansatz is the minimal entangling circuit
//!
//! ```text
//! |psi(theta)> = CNOT(2 -> 1) ( u3(theta[0..3]) on qubit 1  (x)  u3(theta[3..6]) on qubit 2 ) |00>
//! ```
//!
//! whose energy is minimized by plain gradient descent on central
//! finite-difference gradients measured the same way the agent measures
//! (so shot noise and device noise flow into the optimizer). Every
//! `calibration_period` iterations the step size is re-picked by probing a
//! short menu of candidates along the current descent direction and
//! keeping the lowest-energy one; the menu tops out at 2 unless the cap is
//! disabled, which appends larger candidates.
//!
//! `theta = (pi, 0, 0, -pi/2, 0, 0)` reproduces the singlet exactly: the
//! rotations prepare |1> and (|0> - |1>)/sqrt(2), and the CNOT controlled
//! on qubit 2 entangles them into (|10> - |01>)/sqrt(2).

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::observables::{estimate_correlators, Hamiltonian};
use crate::qsim::{cnot, u3, DensityState, Gate, NoiseModel, ShotMode};
use crate::rng::seeded_rng;
use crate::scalar::{real, Real};

/// Step-size candidates probed during calibration.
pub const ALPHA_PROBES: [f64; 4] = [0.1, 0.5, 1.0, 2.0];
/// Extra candidates when the step-size cap is disabled.
pub const ALPHA_PROBES_UNCAPPED: [f64; 2] = [4.0, 8.0];

/// Settings for one optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct VqeConfig<R: Real> {
    /// Exchange coupling `J` of the dimer Hamiltonian.
    pub exchange: R,
    pub noise: NoiseModel<R>,
    pub shot_mode: ShotMode,
    /// Gradient-descent iterations (the trajectory has one extra row for
    /// the starting point).
    pub iterations: usize,
    /// Central finite-difference step for the measured gradient.
    pub fd_step: R,
    /// Iterations between step-size recalibrations.
    pub calibration_period: usize,
    /// Keep the step-size menu capped at 2.
    pub cap_step_size: bool,
    pub seed: u64,
}

impl<R: Real> VqeConfig<R> {
    pub fn defaults(seed: u64) -> Self {
        VqeConfig {
            exchange: R::one(),
            noise: NoiseModel::off(),
            shot_mode: ShotMode::Shots(1024),
            iterations: 500,
            fd_step: real(0.1),
            calibration_period: 20,
            cap_step_size: true,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        if !(self.fd_step > R::zero()) {
            return Err(Error::InvalidConfig(format!(
                "finite-difference step must be positive, got {}",
                self.fd_step
            )));
        }
        if self.calibration_period == 0 {
            return Err(Error::InvalidConfig(
                "calibration period must be at least 1".to_string(),
            ));
        }
        if let ShotMode::Shots(0) = self.shot_mode {
            return Err(Error::InvalidShots);
        }
        Ok(())
    }
}

/// One row of the optimization trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct VqeIterate<R: Real> {
    pub iteration: usize,
    /// Step size in effect when leaving this point.
    pub alpha: R,
    pub theta: [R; 6],
    pub energy: R,
}

/// Measured energy of the ansatz state, through the full simulator path
/// (gates with noise, basis rotations, readout, shots).
pub fn ansatz_energy<R: Real>(
    theta: &[R; 6],
    exchange: R,
    noise: &NoiseModel<R>,
    shot_mode: ShotMode,
    rng: &mut impl Rng,
) -> Result<R> {
    let mut state = DensityState::zero_state(2)?;
    state.apply_gate(&Gate::One(u3(theta[0], theta[1], theta[2])), &[0], noise)?;
    state.apply_gate(&Gate::One(u3(theta[3], theta[4], theta[5])), &[1], noise)?;
    // Control on qubit 2, target qubit 1.
    state.apply_gate(&Gate::Two(cnot()), &[1, 0], noise)?;
    let correlators = estimate_correlators(&state, shot_mode, noise, rng)?;
    Hamiltonian::Dimer { exchange }.energy(&correlators)
}

/// Central finite-difference gradient of the measured energy.
pub fn measured_gradient<R: Real>(
    theta: &[R; 6],
    exchange: R,
    fd_step: R,
    noise: &NoiseModel<R>,
    shot_mode: ShotMode,
    rng: &mut impl Rng,
) -> Result<[R; 6]> {
    let mut grad = [R::zero(); 6];
    let two = real::<R>(2.0);
    for i in 0..6 {
        let mut up = *theta;
        up[i] += fd_step;
        let mut down = *theta;
        down[i] -= fd_step;
        let e_up = ansatz_energy(&up, exchange, noise, shot_mode, rng)?;
        let e_down = ansatz_energy(&down, exchange, noise, shot_mode, rng)?;
        grad[i] = (e_up - e_down) / (two * fd_step);
    }
    Ok(grad)
}

/// Ideal (noiseless, infinite-shot) ansatz energy from a dense state
/// vector — an independent reference path that never touches the
/// density-matrix simulator.
pub fn analytic_energy<R: Real>(theta: &[R; 6], exchange: R) -> R {
    let psi = ansatz_statevector(theta);
    let h_psi = apply_dimer_hamiltonian(&psi, exchange);
    let mut e = R::zero();
    for k in 0..4 {
        e += (psi[k].conj() * h_psi[k]).re;
    }
    e
}

/// Exact gradient of [`analytic_energy`]: `2 Re <d_i psi | H | psi>`.
///
/// The third angle of each rotation never reaches the state (u3 acts on
/// |0>, whose image ignores it), so components 2 and 5 are exactly zero.
pub fn analytic_gradient<R: Real>(theta: &[R; 6], exchange: R) -> [R; 6] {
    let psi = ansatz_statevector(theta);
    let h_psi = apply_dimer_hamiltonian(&psi, exchange);
    let mut grad = [R::zero(); 6];
    for i in 0..6 {
        let dpsi = ansatz_statevector_derivative(theta, i);
        let mut g = R::zero();
        for k in 0..4 {
            g += (dpsi[k].conj() * h_psi[k]).re;
        }
        grad[i] = real::<R>(2.0) * g;
    }
    grad
}

/// Runs gradient descent and returns the trajectory
/// (`iterations + 1` rows; only the starting point for zero iterations).
///
/// The starting angles are drawn uniformly from [-pi, pi); the step size
/// is calibrated at iteration 0 and then every `calibration_period`
/// iterations.
pub fn run_vqe<R: Real>(config: &VqeConfig<R>) -> Result<Vec<VqeIterate<R>>> {
    config.validate()?;
    let mut rng = seeded_rng(config.seed);
    let pi = real::<R>(std::f64::consts::PI);
    let two = real::<R>(2.0);
    let mut theta = [R::zero(); 6];
    for t in theta.iter_mut() {
        *t = real::<R>(rng.random::<f64>()) * two * pi - pi;
    }

    let mut probes: Vec<R> = ALPHA_PROBES.iter().map(|&a| real(a)).collect();
    if !config.cap_step_size {
        probes.extend(ALPHA_PROBES_UNCAPPED.iter().map(|&a| real::<R>(a)));
    }

    let mut alpha = R::one();
    let mut trajectory = Vec::with_capacity(config.iterations + 1);
    for iteration in 0..config.iterations {
        let energy =
            ansatz_energy(&theta, config.exchange, &config.noise, config.shot_mode, &mut rng)?;
        let grad = measured_gradient(
            &theta,
            config.exchange,
            config.fd_step,
            &config.noise,
            config.shot_mode,
            &mut rng,
        )?;
        if iteration % config.calibration_period == 0 {
            alpha = calibrate_step(&theta, &grad, &probes, config, &mut rng)?;
        }
        trajectory.push(VqeIterate { iteration, alpha, theta, energy });
        for (t, g) in theta.iter_mut().zip(&grad) {
            *t = *t - alpha * *g;
        }
    }
    let energy =
        ansatz_energy(&theta, config.exchange, &config.noise, config.shot_mode, &mut rng)?;
    trajectory.push(VqeIterate {
        iteration: config.iterations,
        alpha,
        theta,
        energy,
    });
    Ok(trajectory)
}

/// Probes each candidate step along `-grad` and keeps the lowest-energy
/// one (ties go to the smaller step).
fn calibrate_step<R: Real>(
    theta: &[R; 6],
    grad: &[R; 6],
    probes: &[R],
    config: &VqeConfig<R>,
    rng: &mut impl Rng,
) -> Result<R> {
    let mut best = probes[0];
    let mut best_energy = R::infinity();
    for &a in probes {
        let mut candidate = *theta;
        for (t, g) in candidate.iter_mut().zip(grad) {
            *t = *t - a * *g;
        }
        let e = ansatz_energy(
            &candidate,
            config.exchange,
            &config.noise,
            config.shot_mode,
            rng,
        )?;
        if e < best_energy {
            best_energy = e;
            best = a;
        }
    }
    Ok(best)
}

/// `CNOT(2 -> 1) (u3_1 (x) u3_2) |00>` as four amplitudes.
fn ansatz_statevector<R: Real>(theta: &[R; 6]) -> [Complex<R>; 4] {
    let q1 = qubit_column(theta[0], theta[1]);
    let q2 = qubit_column(theta[3], theta[4]);
    let mut psi = [
        q1[0] * q2[0], // |00>
        q1[0] * q2[1], // |01>
        q1[1] * q2[0], // |10>
        q1[1] * q2[1], // |11>
    ];
    psi.swap(1, 3); // CNOT controlled on qubit 2 flips qubit 1.
    psi
}

/// Derivative of the ansatz state with respect to one angle.
fn ansatz_statevector_derivative<R: Real>(theta: &[R; 6], index: usize) -> [Complex<R>; 4] {
    let zero = Complex::new(R::zero(), R::zero());
    // The lambda angles never enter u3(...)|0>.
    if index == 2 || index == 5 {
        return [zero; 4];
    }
    let q1 = qubit_column(theta[0], theta[1]);
    let q2 = qubit_column(theta[3], theta[4]);
    let (a, b) = match index {
        0 => (qubit_column_dtheta(theta[0], theta[1]), q2),
        1 => (qubit_column_dphi(theta[0], theta[1]), q2),
        3 => (q1, qubit_column_dtheta(theta[3], theta[4])),
        4 => (q1, qubit_column_dphi(theta[3], theta[4])),
        _ => unreachable!("angle index is 0..6"),
    };
    let mut dpsi = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]];
    dpsi.swap(1, 3);
    dpsi
}

/// `u3(theta, phi, _)|0> = (cos(theta/2), e^{i phi} sin(theta/2))`.
fn qubit_column<R: Real>(theta: R, phi: R) -> [Complex<R>; 2] {
    let half = theta / real::<R>(2.0);
    [
        Complex::new(half.cos(), R::zero()),
        Complex::new(phi.cos(), phi.sin()) * half.sin(),
    ]
}

fn qubit_column_dtheta<R: Real>(theta: R, phi: R) -> [Complex<R>; 2] {
    let half = theta / real::<R>(2.0);
    let two = real::<R>(2.0);
    [
        Complex::new(-half.sin() / two, R::zero()),
        Complex::new(phi.cos(), phi.sin()) * (half.cos() / two),
    ]
}

fn qubit_column_dphi<R: Real>(theta: R, phi: R) -> [Complex<R>; 2] {
    let half = theta / real::<R>(2.0);
    let zero = Complex::new(R::zero(), R::zero());
    // d/dphi e^{i phi} = i e^{i phi}.
    [
        zero,
        Complex::new(R::zero(), R::one()) * Complex::new(phi.cos(), phi.sin()) * half.sin(),
    ]
}

/// `H |psi>` for `H = J (XX + YY + ZZ) / 4`.
fn apply_dimer_hamiltonian<R: Real>(psi: &[Complex<R>; 4], exchange: R) -> [Complex<R>; 4] {
    let j4 = exchange / real::<R>(4.0);
    let two = real::<R>(2.0);
    // XX + YY + ZZ = diag(1, -1, -1, 1) plus 2 on the |01><10| swap block.
    [
        psi[0] * j4,
        (psi[2] * two - psi[1]) * j4,
        (psi[1] * two - psi[2]) * j4,
        psi[3] * j4,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rng() -> rand_chacha::ChaCha8Rng {
        seeded_rng(7)
    }

    #[test]
    fn singlet_angles_hit_the_ground_energy_exactly() {
        let theta = [PI, 0.0, 0.0, -PI / 2.0, 0.0, 0.0];
        let e = ansatz_energy(&theta, 1.0, &NoiseModel::off(), ShotMode::Exact, &mut rng())
            .unwrap();
        assert!((e + 0.75).abs() < 1e-12);
        assert!((analytic_energy(&theta, 1.0) + 0.75).abs() < 1e-12);
    }

    #[test]
    fn simulator_and_dense_paths_agree_on_random_angles() {
        let mut r = rng();
        for _ in 0..25 {
            let mut theta = [0.0_f64; 6];
            for t in theta.iter_mut() {
                *t = r.random::<f64>() * 2.0 * PI - PI;
            }
            let sim =
                ansatz_energy(&theta, 1.3, &NoiseModel::off(), ShotMode::Exact, &mut rng())
                    .unwrap();
            let dense = analytic_energy(&theta, 1.3);
            assert!((sim - dense).abs() < 1e-12, "{sim} vs {dense}");
        }
    }

    #[test]
    fn measured_gradient_tracks_the_analytic_one() {
        let mut r = rng();
        for _ in 0..50 {
            let mut theta = [0.0_f64; 6];
            for t in theta.iter_mut() {
                *t = r.random::<f64>() * 2.0 * PI - PI;
            }
            let fd = measured_gradient(
                &theta,
                1.0,
                0.1,
                &NoiseModel::off(),
                ShotMode::Exact,
                &mut rng(),
            )
            .unwrap();
            let exact = analytic_gradient(&theta, 1.0);
            for i in 0..6 {
                assert!(
                    (fd[i] - exact[i]).abs() < 1e-3,
                    "component {i}: fd {} vs exact {}",
                    fd[i],
                    exact[i]
                );
            }
            // The lambda components carry no signal at all.
            assert_eq!(exact[2], 0.0);
            assert_eq!(exact[5], 0.0);
            assert!(fd[2].abs() < 1e-12 && fd[5].abs() < 1e-12);
        }
    }

    #[test]
    fn trajectory_has_one_row_per_iteration_plus_the_start() {
        let mut config = VqeConfig::<f64>::defaults(3);
        config.shot_mode = ShotMode::Exact;
        config.iterations = 0;
        assert_eq!(run_vqe(&config).unwrap().len(), 1);
        config.iterations = 7;
        let t = run_vqe(&config).unwrap();
        assert_eq!(t.len(), 8);
        assert_eq!(t[0].iteration, 0);
        assert_eq!(t[7].iteration, 7);
    }

    #[test]
    fn step_sizes_stay_within_the_capped_menu() {
        let mut config = VqeConfig::<f64>::defaults(1);
        config.shot_mode = ShotMode::Exact;
        config.iterations = 60;
        for row in run_vqe(&config).unwrap() {
            assert!(ALPHA_PROBES.contains(&row.alpha) || row.alpha == 1.0);
            assert!(row.alpha <= 2.0);
        }
    }

    #[test]
    fn exact_descent_reaches_the_singlet_energy() {
        let mut config = VqeConfig::<f64>::defaults(0);
        config.shot_mode = ShotMode::Exact;
        let t = run_vqe(&config).unwrap();
        let last = t.last().unwrap();
        assert!(
            last.energy < -0.74,
            "final energy {} after {} iterations",
            last.energy,
            last.iteration
        );
    }

    #[test]
    fn runs_are_deterministic_per_seed() {
        let mut config = VqeConfig::<f64>::defaults(11);
        config.iterations = 5;
        let a = run_vqe(&config).unwrap();
        let b = run_vqe(&config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_settings_are_rejected() {
        let mut config = VqeConfig::<f64>::defaults(0);
        config.fd_step = 0.0;
        assert!(run_vqe(&config).is_err());
        let mut config = VqeConfig::<f64>::defaults(0);
        config.calibration_period = 0;
        assert!(run_vqe(&config).is_err());
        let mut config = VqeConfig::<f64>::defaults(0);
        config.shot_mode = ShotMode::Shots(0);
        assert!(run_vqe(&config).is_err());
    }
}
