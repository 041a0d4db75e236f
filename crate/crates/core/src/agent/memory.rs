//! Replay memory and the exploration schedule.

use std::collections::VecDeque;

use rand::Rng;

use crate::error::{Error, Result};
use crate::observables::CorrelatorVector;
use crate::scalar::{real, Real};

/// One stored interaction: correlators before and after a gate, the action
/// index, the energy-drop reward and whether the episode ended there.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition<R: Real> {
    pub state: CorrelatorVector<R>,
    pub action: usize,
    pub next_state: CorrelatorVector<R>,
    pub reward: R,
    pub terminal: bool,
}

/// Fixed-capacity FIFO of recent transitions with uniform sampling.
#[derive(Debug, Clone)]
pub struct ReplayMemory<R: Real> {
    capacity: usize,
    buffer: VecDeque<Transition<R>>,
}

impl<R: Real> ReplayMemory<R> {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidConfig(
                "replay memory capacity must be at least 1".to_string(),
            ));
        }
        Ok(ReplayMemory {
            capacity,
            buffer: VecDeque::with_capacity(capacity),
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    /// Appends a transition, evicting the oldest one when full.
    pub fn push(&mut self, transition: Transition<R>) {
        if self.buffer.len() == self.capacity {
            self.buffer.pop_front();
        }
        self.buffer.push_back(transition);
    }

    /// Uniformly random stored transition (one generator draw).
    pub fn sample(&self, rng: &mut impl Rng) -> Result<&Transition<R>> {
        if self.buffer.is_empty() {
            return Err(Error::EmptyMemory);
        }
        let idx = rng.random_range(0..self.buffer.len());
        Ok(&self.buffer[idx])
    }
}

/// Linear exploration annealing measured in circuit measurements.
///
/// The rate starts at `initial`, falls linearly over the first
/// `anneal_measurements` measurements, and stays at `final_value` forever
/// after (the endpoint is returned verbatim, not recomputed, so it is hit
/// exactly).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonSchedule<R: Real> {
    pub initial: R,
    pub final_value: R,
    pub anneal_measurements: u64,
}

impl<R: Real> EpsilonSchedule<R> {
    pub fn new(initial: R, final_value: R, anneal_measurements: u64) -> Result<Self> {
        let unit = |name: &'static str, v: R| -> Result<()> {
            if !(v >= R::zero() && v <= R::one()) {
                return Err(Error::InvalidProbability {
                    name,
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
            Ok(())
        };
        unit("epsilon_initial", initial)?;
        unit("epsilon_final", final_value)?;
        if anneal_measurements == 0 {
            return Err(Error::InvalidConfig(
                "epsilon annealing needs at least one measurement".to_string(),
            ));
        }
        Ok(EpsilonSchedule { initial, final_value, anneal_measurements })
    }

    /// Exploration rate after `measurements` measurements have been taken.
    pub fn value_at(&self, measurements: u64) -> R {
        if measurements >= self.anneal_measurements {
            return self.final_value;
        }
        let frac =
            real::<R>(measurements as f64) / real::<R>(self.anneal_measurements as f64);
        self.initial + (self.final_value - self.initial) * frac
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::CorrelatorVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(tag: f64) -> Transition<f64> {
        let c = CorrelatorVector::new(1, vec![tag, 0.0, 0.0]).unwrap();
        Transition {
            state: c.clone(),
            action: 0,
            next_state: c,
            reward: tag,
            terminal: false,
        }
    }

    #[test]
    fn eviction_is_first_in_first_out() {
        let mut m = ReplayMemory::new(3).unwrap();
        for k in 0..5 {
            m.push(t(k as f64));
        }
        assert_eq!(m.len(), 3);
        let rewards: Vec<f64> = m.buffer.iter().map(|x| x.reward).collect();
        assert_eq!(rewards, vec![2.0, 3.0, 4.0]);
    }

    #[test]
    fn sampling_covers_the_buffer_and_is_seeded() {
        let mut m = ReplayMemory::new(4).unwrap();
        for k in 0..4 {
            m.push(t(k as f64));
        }
        let mut seen = [false; 4];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            seen[m.sample(&mut rng).unwrap().reward as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));

        let a: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            (0..10).map(|_| m.sample(&mut rng).unwrap().reward).collect()
        };
        let b: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            (0..10).map(|_| m.sample(&mut rng).unwrap().reward).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn empty_memory_cannot_be_sampled() {
        let m = ReplayMemory::<f64>::new(2).unwrap();
        assert!(matches!(
            m.sample(&mut ChaCha8Rng::seed_from_u64(0)),
            Err(Error::EmptyMemory)
        ));
        assert!(ReplayMemory::<f64>::new(0).is_err());
    }

    #[test]
    fn epsilon_anneals_linearly_and_clamps_exactly() {
        let s = EpsilonSchedule::<f64>::new(1.0, 0.05, 100).unwrap();
        assert_eq!(s.value_at(0), 1.0);
        assert!((s.value_at(50) - 0.525).abs() < 1e-12);
        // The endpoint is the stored final value, bit for bit.
        assert_eq!(s.value_at(100), 0.05);
        assert_eq!(s.value_at(1_000_000), 0.05);
        // Never increasing.
        let mut last = f64::INFINITY;
        for m in 0..200 {
            let v = s.value_at(m);
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn schedule_validates_its_parameters() {
        assert!(EpsilonSchedule::<f64>::new(1.5, 0.05, 10).is_err());
        assert!(EpsilonSchedule::<f64>::new(1.0, -0.1, 10).is_err());
        assert!(EpsilonSchedule::<f64>::new(1.0, 0.05, 0).is_err());
    }
}
