//! Lower-bound game: information values `H_p(ω, θ)`, best responses,
//! an entropic mirror-ascent max-min solver, and tracking.

use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BanditInstance, InverseDesign, Projection};
use crate::problems::{Answer, PieceId, ProblemSpec};

/// A point of the simplex `Δ_K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weights(Vec<f64>);

impl Weights {
    /// Renormalizes a nonnegative vector with positive sum.
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        if raw.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(Error::InvalidConfig("weights must be finite and nonnegative".into()));
        }
        let sum: f64 = raw.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidConfig("weights must have positive mass".into()));
        }
        Ok(Self(raw.into_iter().map(|x| x / sum).collect()))
    }

    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0 / k as f64; k])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Approximate solution of `max_ω min_p H_p(ω, θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSolution {
    pub weights: Weights,
    pub value: f64,
    pub worst: PieceId,
    pub iterations: usize,
    /// Relative improvement over the last convergence window.
    pub gap: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub window: usize,
    pub rate: f64,
    /// Added to the iteration count in the step size when warm-started.
    pub warm_offset: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iter: 2000, window: 50, rate: 1.0, warm_offset: 100 }
    }
}

/// `H_p(ω, θ) = inf_{λ ∈ Λ_p(i)} ½‖θ − λ‖²_{V_ω}`.
pub fn info_value(spec: &ProblemSpec, inst: &BanditInstance, theta: &DVector<f64>, omega: &[f64], answer: &Answer, piece: PieceId) -> f64 {
    InverseDesign::from_weights(inst, omega).value(inst, theta, spec.half_space(answer, piece))
}

/// Minimizes `H_p(ω, θ)` over `pieces`, ties to the lowest piece id.
pub fn best_response(
    spec: &ProblemSpec,
    inst: &BanditInstance,
    theta: &DVector<f64>,
    omega: &[f64],
    answer: &Answer,
    pieces: &[PieceId],
) -> Result<(PieceId, f64)> {
    let metric = InverseDesign::from_weights(inst, omega);
    best_response_in(spec, inst, &metric, theta, answer, pieces)
}

pub(crate) fn best_response_in(
    spec: &ProblemSpec,
    inst: &BanditInstance,
    metric: &InverseDesign,
    theta: &DVector<f64>,
    answer: &Answer,
    pieces: &[PieceId],
) -> Result<(PieceId, f64)> {
    let mut best: Option<(PieceId, f64)> = None;
    for &p in pieces {
        let v = metric.value(inst, theta, spec.half_space(answer, p));
        best = match best {
            Some((bp, bv)) if bv < v || (bv == v && bp < p) => Some((bp, bv)),
            _ => Some((p, v)),
        };
    }
    best.ok_or(Error::EmptyPieceSet)
}

/// Per-arm information `½(φ_kᵀθ − φ_kᵀλ)²`.
pub fn kl_vector(inst: &BanditInstance, theta: &DVector<f64>, lambda: &DVector<f64>) -> Vec<f64> {
    let diff = theta - lambda;
    inst.features().iter().map(|f| f.dot(&diff).powi(2) / 2.0).collect()
}

fn evaluate(
    spec: &ProblemSpec,
    inst: &BanditInstance,
    theta: &DVector<f64>,
    w: &[f64],
    answer: &Answer,
    pieces: &[PieceId],
) -> Result<(PieceId, f64, InverseDesign)> {
    let metric = InverseDesign::from_weights(inst, w);
    let (p, v) = best_response_in(spec, inst, &metric, theta, answer, pieces)?;
    Ok((p, v, metric))
}

/// Entropic mirror ascent on `ω ↦ min_p H_p(ω, θ)` with normalized
/// subgradient steps `rate / √iter`. Returns the better of the best iterate
/// and the averaged iterate.
pub fn optimal_weights(
    spec: &ProblemSpec,
    inst: &BanditInstance,
    theta: &DVector<f64>,
    answer: &Answer,
    pieces: &[PieceId],
    opts: &SolverOptions,
    warm: Option<&[f64]>,
) -> Result<GameSolution> {
    let k = inst.k();
    let uniform = vec![1.0 / k as f64; k];
    if pieces.is_empty() {
        return Err(Error::EmptyPieceSet);
    }
    // A small uniform mix keeps every arm reachable from a warm start.
    let (mut logw, offset) = match warm {
        Some(w) => (w.iter().map(|&x| (0.9999 * x + 1e-4 / k as f64).ln()).collect::<Vec<f64>>(), opts.warm_offset),
        None => (vec![0.0; k], 0),
    };
    let mut w = softmax(&logw);
    let mut avg = vec![0.0; k];
    let mut best_w = w.clone();
    let mut best_value = f64::NEG_INFINITY;
    let mut best_piece = pieces[0];
    let mut window_start = f64::NEG_INFINITY;
    let mut gap = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=opts.max_iter {
        iterations = it;
        let (p, value, metric) = evaluate(spec, inst, theta, &w, answer, pieces)?;
        if value > best_value {
            best_value = value;
            best_w.clone_from(&w);
            best_piece = p;
        }
        for (a, x) in avg.iter_mut().zip(&w) {
            *a += x;
        }
        let Projection { minimizer, .. } = metric.project(inst, theta, spec.half_space(answer, p));
        let grad = kl_vector(inst, theta, &minimizer);
        let gmax = grad.iter().cloned().fold(0.0, f64::max);
        if gmax <= 0.0 {
            // θ sits on the piece boundary: every allocation is worthless.
            if best_value <= 0.0 {
                let (worst, _) = best_response(spec, inst, theta, &uniform, answer, pieces)?;
                return Ok(GameSolution {
                    weights: Weights(uniform),
                    value: 0.0,
                    worst,
                    iterations: it,
                    gap: 0.0,
                    converged: true,
                });
            }
            converged = true;
            gap = 0.0;
            break;
        }
        let eta = opts.rate / ((it + offset) as f64).sqrt() / gmax;
        for (l, g) in logw.iter_mut().zip(&grad) {
            *l += eta * g;
        }
        w = softmax(&logw);
        if it % opts.window == 0 {
            gap = (best_value - window_start) / best_value.abs().max(f64::MIN_POSITIVE);
            if gap <= opts.tol {
                converged = true;
                break;
            }
            window_start = best_value;
        }
    }

    let n = iterations as f64;
    let avg: Vec<f64> = avg.into_iter().map(|a| a / n).collect();
    let (avg_piece, avg_value, _) = evaluate(spec, inst, theta, &avg, answer, pieces)?;
    let (weights, value, worst) =
        if avg_value > best_value { (avg, avg_value, avg_piece) } else { (best_w, best_value, best_piece) };
    if !converged {
        log::debug!("allocation solver stopped at {iterations} iterations, window gap {gap:e}");
    }
    Ok(GameSolution { weights: Weights::new(weights)?, value, worst, iterations, gap, converged })
}

/// `H*(θ)` for the instance's own parameter and answer.
pub fn characteristic_value(spec: &ProblemSpec, inst: &BanditInstance, opts: &SolverOptions) -> Result<GameSolution> {
    let answer = spec.answer_of(inst.means()).answer;
    let pieces = spec.pieces(&answer);
    optimal_weights(spec, inst, inst.theta(), &answer, &pieces, opts, None)
}

fn softmax(logw: &[f64]) -> Vec<f64> {
    let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logw.iter().map(|l| (l - max).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tracking {
    /// Deficit against `Σ_s ω_s`.
    Cumulative,
    /// Deficit against `t·ω_t`.
    PerStep,
}

impl FromStr for Tracking {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cumulative" => Ok(Tracking::Cumulative),
            "per_step" => Ok(Tracking::PerStep),
            _ => Err(Error::InvalidConfig(format!("unknown tracking {s:?}"))),
        }
    }
}

/// Forced exploration when some `N_k < √t`, else the largest deficit
/// `target_k − N_k`. Ties go to the lowest index.
pub fn track(target: &[f64], counts: &[u64], t: u64) -> usize {
    let root = (t as f64).sqrt();
    if counts.iter().any(|&n| (n as f64) < root) {
        return argmin_by(counts.len(), |k| counts[k] as f64);
    }
    argmin_by(counts.len(), |k| counts[k] as f64 - target[k])
}

fn argmin_by(n: usize, f: impl Fn(usize) -> f64) -> usize {
    let mut best = 0;
    let mut bv = f(0);
    for k in 1..n {
        let v = f(k);
        if v < bv {
            best = k;
            bv = v;
        }
    }
    best
}
