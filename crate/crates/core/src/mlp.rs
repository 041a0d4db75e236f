//! One-hidden-layer action-value network.
//!
//! The architecture is deliberately minimal — no biases, sigmoid hidden
//! units and a rescaled sigmoid output covering (-1, 1):
//!
//! ```text
//! h_j = sigmoid( sum_i s_i Wh[i][j] )
//! o   = 2 ( sigmoid( sum_j h_j Wo[j] ) - 1/2 )
//! ```
//!
//! Training uses the delta rule on the squared error to a clipped target:
//!
//! ```text
//! delta_o    = (target - o) (o + 1) (1/2 - o/2)
//! dWo[j]     = delta_o h_j
//! delta_h[j] = h_j (1 - h_j) Wo[j] delta_o
//! dWh[i][j]  = delta_h[j] s_i
//! ```
//!
//! (equivalently, `-1/2` times the gradient of `(target - o)^2`), and each
//! weight carries an adaptive gain: consecutive update components with the
//! same sign grow the gain additively by 0.05 up to 2, a sign change decays
//! it by 0.95 down to 0.1. Weights then move by `alpha * gain * dW`. The
//! first update after initialization (or after loading a checkpoint, which
//! does not store the previous update) leaves the gains untouched.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

const GAIN_STEP: f64 = 0.05;
const GAIN_DECAY: f64 = 0.95;
const GAIN_MIN: f64 = 0.1;
const GAIN_MAX: f64 = 2.0;

/// Weight-update components for one network, laid out like the weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<R: Real> {
    /// Hidden-layer components, row-major `[n_inp][n_hidden]`.
    pub w_h: Vec<R>,
    /// Output-layer components, `[n_hidden]`.
    pub w_o: Vec<R>,
}

/// Action-value network: maps a correlator vector to a scalar in (-1, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct QNetwork<R: Real> {
    n_inp: usize,
    n_hidden: usize,
    /// Hidden weights, row-major `[n_inp][n_hidden]`.
    w_h: Vec<R>,
    /// Output weights, `[n_hidden]`.
    w_o: Vec<R>,
    /// Per-weight gains, same layouts as the weights.
    g_h: Vec<R>,
    g_o: Vec<R>,
    /// Previous update components, for the gain sign comparison.
    prev: Option<Gradients<R>>,
}

impl<R: Real> QNetwork<R> {
    /// Fresh network with weights uniform in [-0.5, 0.5] and gains 1.
    ///
    /// Draws the hidden matrix row-major, then the output vector, so a
    /// seeded generator reproduces the same network.
    pub fn new_random(n_inp: usize, n_hidden: usize, rng: &mut impl Rng) -> Result<Self> {
        if n_inp == 0 || n_hidden == 0 {
            return Err(Error::InvalidConfig(
                "network needs at least one input and one hidden unit".to_string(),
            ));
        }
        let mut draw = || real::<R>(rng.random::<f64>() - 0.5);
        let w_h: Vec<R> = (0..n_inp * n_hidden).map(|_| draw()).collect();
        let w_o: Vec<R> = (0..n_hidden).map(|_| draw()).collect();
        Ok(QNetwork {
            n_inp,
            n_hidden,
            w_h,
            w_o,
            g_h: vec![R::one(); n_inp * n_hidden],
            g_o: vec![R::one(); n_hidden],
            prev: None,
        })
    }

    pub fn n_inp(&self) -> usize {
        self.n_inp
    }

    pub fn n_hidden(&self) -> usize {
        self.n_hidden
    }

    /// Network output for an input vector; always in (-1, 1).
    pub fn forward(&self, s: &[R]) -> Result<R> {
        Ok(self.forward_parts(s)?.1)
    }

    /// Hidden activations and output in one pass.
    fn forward_parts(&self, s: &[R]) -> Result<(Vec<R>, R)> {
        if s.len() != self.n_inp {
            return Err(Error::DimensionMismatch {
                expected: self.n_inp,
                got: s.len(),
            });
        }
        let mut h_in = vec![R::zero(); self.n_hidden];
        for (i, &si) in s.iter().enumerate() {
            let row = &self.w_h[i * self.n_hidden..(i + 1) * self.n_hidden];
            for (j, &w) in row.iter().enumerate() {
                h_in[j] += si * w;
            }
        }
        let h: Vec<R> = h_in.into_iter().map(sigmoid).collect();
        let mut o_in = R::zero();
        for (hj, &w) in h.iter().zip(&self.w_o) {
            o_in += *hj * w;
        }
        let o = real::<R>(2.0) * (sigmoid(o_in) - real::<R>(0.5));
        Ok((h, o))
    }

    /// Delta-rule update components toward `target` (see module docs).
    pub fn backward(&self, s: &[R], target: R) -> Result<Gradients<R>> {
        let (h, o) = self.forward_parts(s)?;
        let half = real::<R>(0.5);
        let delta_o = (target - o) * (o + R::one()) * (half - o * half);
        let w_o: Vec<R> = h.iter().map(|&hj| delta_o * hj).collect();
        let mut w_h = vec![R::zero(); self.n_inp * self.n_hidden];
        for (j, &hj) in h.iter().enumerate() {
            let delta_h = hj * (R::one() - hj) * self.w_o[j] * delta_o;
            for (i, &si) in s.iter().enumerate() {
                w_h[i * self.n_hidden + j] = delta_h * si;
            }
        }
        Ok(Gradients { w_h, w_o })
    }

    /// Adapts the gains against the previous update, then moves every
    /// weight by `alpha * gain * component`.
    pub fn apply_update(&mut self, grads: &Gradients<R>, alpha: R) -> Result<()> {
        if grads.w_h.len() != self.w_h.len() || grads.w_o.len() != self.w_o.len() {
            return Err(Error::DimensionMismatch {
                expected: self.w_h.len() + self.w_o.len(),
                got: grads.w_h.len() + grads.w_o.len(),
            });
        }
        if let Some(prev) = &self.prev {
            adapt_gains(&mut self.g_h, &grads.w_h, &prev.w_h);
            adapt_gains(&mut self.g_o, &grads.w_o, &prev.w_o);
        }
        for ((w, &g), &dw) in self.w_h.iter_mut().zip(&self.g_h).zip(&grads.w_h) {
            *w += alpha * g * dw;
        }
        for ((w, &g), &dw) in self.w_o.iter_mut().zip(&self.g_o).zip(&grads.w_o) {
            *w += alpha * g * dw;
        }
        self.prev = Some(grads.clone());
        Ok(())
    }

    /// Serializable snapshot (weights and gains; the previous-update memory
    /// is transient and not persisted).
    pub fn to_data(&self) -> NetworkData {
        let f = |v: &[R]| v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
        NetworkData {
            version: NETWORK_FORMAT_VERSION,
            n_inp: self.n_inp,
            n_hidden: self.n_hidden,
            w_h: f(&self.w_h),
            w_o: f(&self.w_o),
            gains: GainsData {
                hidden: f(&self.g_h),
                output: f(&self.g_o),
            },
        }
    }

    /// Rebuilds a network from a snapshot, validating shapes.
    pub fn from_data(data: &NetworkData) -> Result<Self> {
        if data.version != NETWORK_FORMAT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported network format version {}",
                data.version
            )));
        }
        let expect = |name: &str, got: usize, expected: usize| -> Result<()> {
            if got != expected {
                return Err(Error::Checkpoint(format!(
                    "{name} has {got} entries, expected {expected}"
                )));
            }
            Ok(())
        };
        expect("w_h", data.w_h.len(), data.n_inp * data.n_hidden)?;
        expect("w_o", data.w_o.len(), data.n_hidden)?;
        expect("gains.hidden", data.gains.hidden.len(), data.n_inp * data.n_hidden)?;
        expect("gains.output", data.gains.output.len(), data.n_hidden)?;
        let r = |v: &[f64]| v.iter().map(|&x| real::<R>(x)).collect();
        Ok(QNetwork {
            n_inp: data.n_inp,
            n_hidden: data.n_hidden,
            w_h: r(&data.w_h),
            w_o: r(&data.w_o),
            g_h: r(&data.gains.hidden),
            g_o: r(&data.gains.output),
            prev: None,
        })
    }
}

fn sigmoid<R: Real>(x: R) -> R {
    R::one() / (R::one() + (-x).exp())
}

fn adapt_gains<R: Real>(gains: &mut [R], now: &[R], prev: &[R]) {
    let step = real::<R>(GAIN_STEP);
    let decay = real::<R>(GAIN_DECAY);
    let lo = real::<R>(GAIN_MIN);
    let hi = real::<R>(GAIN_MAX);
    for ((g, &a), &b) in gains.iter_mut().zip(now).zip(prev) {
        if a * b > R::zero() {
            *g = (*g + step).min(hi);
        } else {
            *g = (*g * decay).max(lo);
        }
    }
}

const NETWORK_FORMAT_VERSION: u32 = 1;

/// On-disk form of one network (always stored as `f64`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkData {
    pub version: u32,
    pub n_inp: usize,
    pub n_hidden: usize,
    pub w_h: Vec<f64>,
    pub w_o: Vec<f64>,
    pub gains: GainsData,
}

/// Gain vectors, split by layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainsData {
    pub hidden: Vec<f64>,
    pub output: Vec<f64>,
}
