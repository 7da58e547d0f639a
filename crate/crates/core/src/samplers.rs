//! Sampling rules: oracle tracking, Track-and-Stop, and a game learner
//! driven by best responses. All return the next arm from current statistics.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::allocation::{best_response_in, kl_vector, optimal_weights, track, SolverOptions, Tracking};
use crate::error::{Error, Result};
use crate::model::{BanditInstance, InverseDesign, Statistics, Structure};
use crate::problems::{Answer, PieceId, ProblemSpec};
use crate::stopping::Threshold;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Oracle,
    Tas,
    Lingame,
}

impl SamplerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplerKind::Oracle => "oracle",
            SamplerKind::Tas => "tas",
            SamplerKind::Lingame => "lingame",
        }
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(SamplerKind::Oracle),
            "tas" => Ok(SamplerKind::Tas),
            "lingame" => Ok(SamplerKind::Lingame),
            _ => Err(Error::InvalidConfig(format!("unknown sampler {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerOptions {
    pub tracking: Tracking,
    pub solver: SolverOptions,
    /// Track-and-Stop recomputes its allocation every this many steps.
    pub recompute_every: u64,
    /// Warm-start Track-and-Stop from the previous allocation.
    pub warm_start: bool,
    pub learner_rate_scale: f64,
    /// Fixed gain clip for the learner; `None` uses four times the largest gain seen.
    pub gain_cap: Option<f64>,
    /// Confidence width reported for an unstructured arm with no pulls.
    pub width_cap: f64,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self {
            tracking: Tracking::Cumulative,
            // Per-step solves only need a coarse allocation; warm starts carry accuracy forward.
            solver: SolverOptions { tol: 1e-4, max_iter: 200, ..SolverOptions::default() },
            recompute_every: 1,
            warm_start: true,
            learner_rate_scale: 1.0,
            gain_cap: None,
            width_cap: 1e6,
        }
    }
}

/// Everything a sampler may read at one step.
pub struct SamplingContext<'a> {
    pub spec: &'a ProblemSpec,
    pub inst: &'a BanditInstance,
    pub stats: &'a Statistics,
    pub thr: &'a Threshold,
    /// Empirical answer `i*(θ̂_t)`.
    pub answer: &'a Answer,
    /// Pieces of `answer` the sampler plays against.
    pub pieces: &'a [PieceId],
}

/// A sampling rule. Samplers never touch stopping state.
pub trait Sampler: Send {
    fn next_arm(&mut self, ctx: &SamplingContext<'_>) -> Result<usize>;

    /// Allocation used at the last step.
    fn last_weights(&self) -> &[f64];
}

/// Optimism bonus `√(2 β_{t,1/t²}) ‖φ_k‖_{(V+ridge)⁻¹}`.
pub fn confidence_width(inst: &BanditInstance, stats: &Statistics, k: usize, thr: &Threshold, cap: f64) -> f64 {
    let scale = 2.0 * thr.beta_confidence(stats.t());
    match inst.structure() {
        Structure::Unstructured => {
            let n = stats.counts()[k];
            if n == 0 {
                cap
            } else {
                (scale / n as f64).sqrt().min(cap)
            }
        }
        Structure::Linear => (scale * stats.inverse().feature_norm_sq(inst, k)).sqrt().min(cap),
    }
}

/// Cumulative allocation sums, seeded with the warm-up pulls.
#[derive(Debug, Clone)]
struct Tracker {
    mode: Tracking,
    cumulative: Vec<f64>,
    seeded: bool,
}

impl Tracker {
    fn new(mode: Tracking, k: usize) -> Self {
        Self { mode, cumulative: vec![0.0; k], seeded: false }
    }

    fn pull(&mut self, w: &[f64], stats: &Statistics) -> usize {
        if !self.seeded {
            for (c, &n) in self.cumulative.iter_mut().zip(stats.counts()) {
                *c = n as f64;
            }
            self.seeded = true;
        }
        for (c, x) in self.cumulative.iter_mut().zip(w) {
            *c += x;
        }
        let t = stats.t();
        match self.mode {
            Tracking::Cumulative => track(&self.cumulative, stats.counts(), t),
            Tracking::PerStep => {
                let target: Vec<f64> = w.iter().map(|x| x * t as f64).collect();
                track(&target, stats.counts(), t)
            }
        }
    }

    fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }
}

/// Tracks the optimal allocation of the true parameter.
#[derive(Debug, Clone)]
pub struct OracleSampler {
    weights: Vec<f64>,
    tracker: Tracker,
}

impl OracleSampler {
    pub fn new(spec: &ProblemSpec, inst: &BanditInstance, opts: &SamplerOptions) -> Result<Self> {
        let sol = crate::allocation::characteristic_value(spec, inst, &opts.solver)?;
        Ok(Self::with_weights(sol.weights.into_vec(), opts.tracking))
    }

    pub fn with_weights(weights: Vec<f64>, tracking: Tracking) -> Self {
        let k = weights.len();
        Self { weights, tracker: Tracker::new(tracking, k) }
    }

    pub fn cumulative(&self) -> &[f64] {
        self.tracker.cumulative()
    }
}

impl Sampler for OracleSampler {
    fn next_arm(&mut self, ctx: &SamplingContext<'_>) -> Result<usize> {
        Ok(self.tracker.pull(&self.weights, ctx.stats))
    }

    fn last_weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Track-and-Stop: plug-in optimal allocation against the given pieces.
#[derive(Debug, Clone)]
pub struct TrackAndStop {
    opts: SamplerOptions,
    tracker: Tracker,
    weights: Vec<f64>,
    steps: u64,
    nonconverged: u64,
}

impl TrackAndStop {
    pub fn new(k: usize, opts: SamplerOptions) -> Self {
        Self { opts, tracker: Tracker::new(opts.tracking, k), weights: vec![1.0 / k as f64; k], steps: 0, nonconverged: 0 }
    }

    pub fn nonconverged(&self) -> u64 {
        self.nonconverged
    }
}

impl Sampler for TrackAndStop {
    fn next_arm(&mut self, ctx: &SamplingContext<'_>) -> Result<usize> {
        if self.steps.is_multiple_of(self.opts.recompute_every.max(1)) {
            let warm = (self.opts.warm_start && self.steps > 0).then_some(self.weights.as_slice());
            let sol = optimal_weights(ctx.spec, ctx.inst, ctx.stats.theta_hat(), ctx.answer, ctx.pieces, &self.opts.solver, warm)?;
            if !sol.converged {
                self.nonconverged += 1;
                log::warn!("allocation solver did not converge at t={}", ctx.stats.t());
            }
            self.weights = sol.weights.into_vec();
        }
        self.steps += 1;
        Ok(self.tracker.pull(&self.weights, ctx.stats))
    }

    fn last_weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Exponential weights over arms with anytime rate `√(8 ln K / t)`, gains in `[0, cap]`.
#[derive(Debug, Clone)]
pub struct Hedge {
    gains: Vec<f64>,
    rounds: u64,
    scale: f64,
}

impl Hedge {
    pub fn new(k: usize, scale: f64) -> Self {
        Self { gains: vec![0.0; k], rounds: 0, scale }
    }

    /// Current weights for gains bounded by `cap`.
    pub fn weights(&self, cap: f64) -> Vec<f64> {
        let k = self.gains.len();
        if cap <= 0.0 {
            return vec![1.0 / k as f64; k];
        }
        let t = (self.rounds + 1) as f64;
        let eta = self.scale * (8.0 * (k as f64).ln() / t).sqrt() / cap;
        let max = self.gains.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = self.gains.iter().map(|g| (eta * (g - max)).exp()).collect();
        let s: f64 = e.iter().sum();
        e.into_iter().map(|x| x / s).collect()
    }

    pub fn update(&mut self, gains: &[f64]) {
        for (c, g) in self.gains.iter_mut().zip(gains) {
            *c += g;
        }
        self.rounds += 1;
    }
}

/// Game learner sampler: the learner proposes `w_t`, a best response picks
/// `λ_t`, and optimistic per-arm information gains update the learner.
#[derive(Debug, Clone)]
pub struct LearnerSampler {
    opts: SamplerOptions,
    hedge: Hedge,
    tracker: Tracker,
    weights: Vec<f64>,
    largest_gain: f64,
}

impl LearnerSampler {
    pub fn new(k: usize, opts: SamplerOptions) -> Self {
        Self {
            opts,
            hedge: Hedge::new(k, opts.learner_rate_scale),
            tracker: Tracker::new(opts.tracking, k),
            weights: vec![1.0 / k as f64; k],
            largest_gain: 0.0,
        }
    }

    fn cap(&self) -> f64 {
        self.opts.gain_cap.unwrap_or(4.0 * self.largest_gain)
    }
}

impl Sampler for LearnerSampler {
    fn next_arm(&mut self, ctx: &SamplingContext<'_>) -> Result<usize> {
        let w = self.hedge.weights(self.cap());
        let theta = ctx.stats.theta_hat();
        let metric = InverseDesign::from_weights(ctx.inst, &w);
        let (piece, _) = best_response_in(ctx.spec, ctx.inst, &metric, theta, ctx.answer, ctx.pieces)?;
        let lambda = metric.project(ctx.inst, theta, ctx.spec.half_space(ctx.answer, piece)).minimizer;
        let kl = kl_vector(ctx.inst, theta, &lambda);
        self.largest_gain = kl.iter().cloned().fold(self.largest_gain, f64::max);
        let cap = self.cap();
        let gains: Vec<f64> = kl
            .iter()
            .enumerate()
            .map(|(k, g)| (g + confidence_width(ctx.inst, ctx.stats, k, ctx.thr, self.opts.width_cap)).clamp(0.0, cap))
            .collect();
        self.hedge.update(&gains);
        let arm = self.tracker.pull(&w, ctx.stats);
        self.weights = w;
        Ok(arm)
    }

    fn last_weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Builds the configured sampler.
pub fn make_sampler(kind: SamplerKind, spec: &ProblemSpec, inst: &BanditInstance, opts: &SamplerOptions) -> Result<Box<dyn Sampler>> {
    Ok(match kind {
        SamplerKind::Oracle => Box::new(OracleSampler::new(spec, inst, opts)?),
        SamplerKind::Tas => Box::new(TrackAndStop::new(inst.k(), *opts)),
        SamplerKind::Lingame => Box::new(LearnerSampler::new(inst.k(), *opts)),
    })
}
