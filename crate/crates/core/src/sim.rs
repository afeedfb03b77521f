// SPDX-License-Identifier: Apache-2.0

//! Synchronous average-consensus iteration on the sparse topology.
//!
//! Each step applies `x_i <- x_i + h sum_{j in N_i} (x_j - x_i)`, which is
//! `x <- W x` with `W = I - hL`, without materializing `W`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::topology::{neighbor_list, NeighborList, TopologySpec};

pub const DEFAULT_EPS: f64 = 1e-6;
pub const DEFAULT_T_MAX: usize = 1_000_000;
/// Smallest tail window used when fitting the contraction factor.
pub const MIN_FIT_POINTS: usize = 30;

const PARALLEL_MIN_NODES: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusState {
    pub x: Vec<f64>,
    pub t: usize,
    /// Average of the initial values, preserved by every step.
    pub x_avg: f64,
}

impl ConsensusState {
    pub fn from_values(x: Vec<f64>) -> Self {
        let x_avg = mean(&x);
        ConsensusState { x, t: 0, x_avg }
    }

    pub fn mean(&self) -> f64 {
        mean(&self.x)
    }

    /// `||x(t) - x_avg 1||_2`.
    pub fn error(&self) -> f64 {
        self.x
            .iter()
            .map(|v| (v - self.x_avg).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Initial values drawn i.i.d. uniform on `[0, 1)` from ChaCha8 seeded with `seed`.
pub fn init_state(spec: &TopologySpec, seed: u64) -> ConsensusState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = (0..spec.n()).map(|_| rng.gen::<f64>()).collect();
    ConsensusState::from_values(x)
}

/// The consensus operator for one network.
#[derive(Debug, Clone)]
pub struct Consensus {
    neighbors: NeighborList,
}

impl Consensus {
    pub fn new(spec: &TopologySpec) -> Self {
        Consensus {
            neighbors: neighbor_list(spec),
        }
    }

    pub fn neighbors(&self) -> &NeighborList {
        &self.neighbors
    }

    /// Writes one update of `x` into `out`.
    pub fn apply(&self, x: &[f64], out: &mut [f64], h: f64) {
        let update = |(u, slot): (usize, &mut f64)| {
            let xi = x[u];
            let pull: f64 = self.neighbors.neighbors(u).iter().map(|&j| x[j] - xi).sum();
            *slot = xi + h * pull;
        };
        if x.len() >= PARALLEL_MIN_NODES {
            out.par_iter_mut().enumerate().for_each(update);
        } else {
            out.iter_mut().enumerate().for_each(update);
        }
    }

    pub fn step(&self, state: &ConsensusState, h: f64) -> ConsensusState {
        let mut x = vec![0.0; state.x.len()];
        self.apply(&state.x, &mut x, h);
        ConsensusState {
            x,
            t: state.t + 1,
            x_avg: state.x_avg,
        }
    }
}

/// One synchronous step. Builds the neighbor lists on every call; use
/// [`Consensus`] when stepping repeatedly.
pub fn step(state: &ConsensusState, spec: &TopologySpec, h: f64) -> ConsensusState {
    Consensus::new(spec).step(state, h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Stop once `e(t) <= eps * e(0)`.
    pub eps: f64,
    pub t_max: usize,
    /// Replaces the seeded random start.
    pub initial: Option<Vec<f64>>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            eps: DEFAULT_EPS,
            t_max: DEFAULT_T_MAX,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub iterations: usize,
    /// `e(t)` for `t = 0..=iterations`.
    pub error_trace: Vec<f64>,
    /// Geometric decay rate of the trace tail; `None` when too few positive errors remain.
    pub fitted_contraction: Option<f64>,
    /// `max_t |mean(x(t)) - x_avg|`, tracked on the deviation from `x_avg`.
    pub avg_residual: f64,
    pub seed: u64,
    /// Final node values.
    pub final_values: Vec<f64>,
}

pub fn run(spec: &TopologySpec, h: f64, seed: u64, eps: f64) -> Result<SimReport> {
    run_with(
        spec,
        h,
        seed,
        &RunOptions {
            eps,
            ..RunOptions::default()
        },
    )
}

pub fn run_with(spec: &TopologySpec, h: f64, seed: u64, opts: &RunOptions) -> Result<SimReport> {
    if !(opts.eps > 0.0 && opts.eps < 1.0) {
        return Err(Error::OutOfRange(format!(
            "eps = {} is outside (0, 1)",
            opts.eps
        )));
    }
    if !(h.is_finite() && h >= 0.0) {
        return Err(Error::OutOfRange(format!(
            "h = {h} must be finite and nonnegative"
        )));
    }
    let state = match &opts.initial {
        Some(x) if x.len() != spec.n() => {
            return Err(Error::InvalidSpec(format!(
                "initial vector has {} entries for {} nodes",
                x.len(),
                spec.n()
            )))
        }
        Some(x) => ConsensusState::from_values(x.clone()),
        None => init_state(spec, seed),
    };

    // W maps 1 to 1, so iterating on y = x - x_avg 1 is exact and keeps
    // rounding at the scale of the error rather than of the values.
    let op = Consensus::new(spec);
    let x_avg = state.x_avg;
    let mut y: Vec<f64> = state.x.iter().map(|v| v - x_avg).collect();
    let shift = mean(&y);
    y.iter_mut().for_each(|v| *v -= shift);
    let mut next = vec![0.0; y.len()];
    let e0 = norm2(&y);
    let target = opts.eps * e0;
    let mut trace = vec![e0];
    let mut avg_residual = mean(&y).abs();
    let mut t = 0;
    while trace[t] > target {
        if t == opts.t_max {
            return Err(Error::NoConvergence(format!(
                "error {:e} after {} iterations, target {:e}",
                trace[t], t, target
            )));
        }
        op.apply(&y, &mut next, h);
        std::mem::swap(&mut y, &mut next);
        t += 1;
        let e = norm2(&y);
        if !e.is_finite() {
            return Err(Error::NoConvergence(format!(
                "error diverged at iteration {t}"
            )));
        }
        trace.push(e);
        avg_residual = avg_residual.max(mean(&y).abs());
    }

    Ok(SimReport {
        iterations: t,
        fitted_contraction: fit_contraction(&trace),
        error_trace: trace,
        avg_residual,
        seed,
        final_values: y.into_iter().map(|v| v + x_avg).collect(),
    })
}

fn norm2(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `exp(slope)` of the least-squares line through `ln e(t)` over the final
/// third of the trace (at least [`MIN_FIT_POINTS`] points when available).
pub fn fit_contraction(trace: &[f64]) -> Option<f64> {
    let window = (trace.len() / 3).max(MIN_FIT_POINTS).min(trace.len());
    let start = trace.len() - window;
    let pts: Vec<(f64, f64)> = trace[start..]
        .iter()
        .enumerate()
        .filter(|(_, e)| **e > 0.0 && e.is_finite())
        .map(|(i, e)| ((start + i) as f64, e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    Some((sxy / sxx).exp())
}
