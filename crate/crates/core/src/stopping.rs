//! Stopping thresholds, stopping monitors and the sampling-side active sets
//! with their doubly exponential reset schedule.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BanditInstance, Statistics};
use crate::problems::{inf_llr_value, ActivePieceState, Answer, PieceId, ProblemSpec, Update};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    /// One shared active set, `β = log(1/δ) + log(1 + t)`.
    Heuristic,
    /// Separate sampling sets with resets, `β = log(1/δ) + c₂ log t`.
    Theory,
}

/// Stopping threshold `β_{t,δ}` and, in theory mode, the sampling threshold `α_{t,δ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub mode: ThresholdMode,
    pub delta: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Threshold {
    pub const DEFAULT_C1: f64 = 2.0;
    pub const DEFAULT_C2: f64 = 2.0;

    pub fn heuristic(delta: f64) -> Result<Self> {
        Self::new(ThresholdMode::Heuristic, delta, Self::DEFAULT_C1, Self::DEFAULT_C2)
    }

    pub fn theory(delta: f64, c1: f64, c2: f64) -> Result<Self> {
        Self::new(ThresholdMode::Theory, delta, c1, c2)
    }

    pub fn new(mode: ThresholdMode, delta: f64, c1: f64, c2: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidConfig(format!("delta must lie in (0,1), got {delta}")));
        }
        if !(c1 > 0.0 && c2 > 0.0 && c1 <= c2) {
            return Err(Error::InvalidConfig(format!("need 0 < c1 <= c2, got c1={c1}, c2={c2}")));
        }
        Ok(Self { mode, delta, c1, c2 })
    }

    /// `β_{t,δ}` at the configured δ.
    pub fn beta(&self, t: u64) -> f64 {
        self.beta_at(t, self.delta)
    }

    /// `β_{t,δ'}` for an arbitrary confidence level.
    pub fn beta_at(&self, t: u64, delta: f64) -> f64 {
        let base = (1.0 / delta).ln();
        match self.mode {
            ThresholdMode::Heuristic => base + (1.0 + t as f64).ln(),
            ThresholdMode::Theory => base + self.c2 * (t.max(1) as f64).ln(),
        }
    }

    /// `β_{t,1/t²}`, the level used by confidence widths.
    pub fn beta_confidence(&self, t: u64) -> f64 {
        let t = t.max(1) as f64;
        self.beta_at_log(t, 2.0 * t.ln())
    }

    fn beta_at_log(&self, t: f64, log_inv_delta: f64) -> f64 {
        match self.mode {
            ThresholdMode::Heuristic => log_inv_delta + (1.0 + t).ln(),
            ThresholdMode::Theory => log_inv_delta + self.c2 * t.ln(),
        }
    }

    /// `α_{t,δ} = (√(β_{t,δ} + (4c₂ − c₁) log t) + 4√((c₂/c₁) β_{t,1/t²}))²`, theory mode, `t ≥ 2`.
    pub fn alpha(&self, t: u64) -> Result<f64> {
        if self.mode == ThresholdMode::Heuristic {
            return Err(Error::AlphaInHeuristicMode);
        }
        if t < 2 {
            return Err(Error::InvalidConfig(format!("alpha needs t >= 2, got {t}")));
        }
        let lt = (t as f64).ln();
        let first = (self.beta(t) + (4.0 * self.c2 - self.c1) * lt).sqrt();
        let second = 4.0 * (self.c2 / self.c1 * self.beta_confidence(t)).sqrt();
        Ok((first + second).powi(2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StoppingRule {
    Llr,
    Selective,
    Full,
}

impl StoppingRule {
    pub fn as_str(self) -> &'static str {
        match self {
            StoppingRule::Llr => "llr",
            StoppingRule::Selective => "selective",
            StoppingRule::Full => "full",
        }
    }
}

impl FromStr for StoppingRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "llr" => Ok(StoppingRule::Llr),
            "selective" => Ok(StoppingRule::Selective),
            "full" => Ok(StoppingRule::Full),
            _ => Err(Error::InvalidConfig(format!("unknown stopping rule {s:?}"))),
        }
    }
}

/// A piece elimination, timestamped with the step at which the test fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elimination {
    pub t: u64,
    pub piece: PieceId,
}

/// Applies a selective or full update to `state`, as `rule` dictates. LLR maps to selective.
pub fn update_state(
    rule: StoppingRule,
    state: &mut ActivePieceState,
    spec: &ProblemSpec,
    inst: &BanditInstance,
    stats: &Statistics,
    threshold: f64,
) -> Update {
    match rule {
        StoppingRule::Full => state.update_full(spec, inst, stats, threshold),
        StoppingRule::Llr | StoppingRule::Selective => state.update_selective(spec, inst, stats, threshold),
    }
}

/// One stopping rule tracked along a run.
#[derive(Debug, Clone)]
pub struct StoppingMonitor {
    rule: StoppingRule,
    state: Option<ActivePieceState>,
    minimizations: u64,
    stopped: Option<(u64, Answer)>,
    events: Vec<Elimination>,
}

impl StoppingMonitor {
    pub fn new(rule: StoppingRule, spec: &ProblemSpec) -> Self {
        let state = (rule != StoppingRule::Llr).then(|| ActivePieceState::init(spec));
        Self { rule, state, minimizations: 0, stopped: None, events: Vec::new() }
    }

    pub fn rule(&self) -> StoppingRule {
        self.rule
    }

    /// Active set of an elimination rule; `None` for LLR.
    pub fn state(&self) -> Option<&ActivePieceState> {
        self.state.as_ref()
    }

    /// Total piece infima evaluated so far.
    pub fn minimizations(&self) -> u64 {
        self.minimizations
    }

    /// Stopping time and answer, once stopped.
    pub fn stopped(&self) -> Option<&(u64, Answer)> {
        self.stopped.as_ref()
    }

    pub fn events(&self) -> &[Elimination] {
        &self.events
    }

    /// Processes the statistics at step `stats.t()`. Idempotent after stopping.
    pub fn step(&mut self, spec: &ProblemSpec, inst: &BanditInstance, stats: &Statistics, thr: &Threshold) -> Option<Answer> {
        self.step_with_beta(spec, inst, stats, thr.beta(stats.t()))
    }

    /// As [`step`](Self::step) with an explicit threshold value.
    pub fn step_with_beta(&mut self, spec: &ProblemSpec, inst: &BanditInstance, stats: &Statistics, beta: f64) -> Option<Answer> {
        if let Some((_, answer)) = &self.stopped {
            return Some(answer.clone());
        }
        let t = stats.t();
        let answer = match &mut self.state {
            None => {
                let emp = spec.answer_for(inst, stats.theta_hat()).answer;
                let mut min = f64::INFINITY;
                for p in spec.pieces(&emp) {
                    self.minimizations += 1;
                    min = min.min(inf_llr_value(spec, inst, stats, &emp, p));
                }
                (min >= beta).then_some(emp)
            }
            Some(state) => {
                let up = update_state(self.rule, state, spec, inst, stats, beta);
                self.minimizations += up.evaluations;
                self.events.extend(up.eliminated.into_iter().map(|piece| Elimination { t, piece }));
                state.is_stopped()
            }
        };
        if let Some(a) = &answer {
            self.stopped = Some((t, a.clone()));
        }
        answer
    }
}

/// Reset times `t̄₀^(2^j)` for `j = 0, 1, …` up to `u64` range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResetSchedule {
    base: u64,
    times: Vec<u64>,
}

impl ResetSchedule {
    pub fn new(base: u64) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidConfig(format!("reset base must be at least 2, got {base}")));
        }
        let mut times = vec![base];
        while let Some(next) = times.last().unwrap().checked_mul(*times.last().unwrap()) {
            times.push(next);
        }
        Ok(Self { base, times })
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn times(&self) -> &[u64] {
        &self.times
    }

    /// `j(t) = ⌊log₂ log_{t̄₀} t⌋`, `None` before the first reset.
    pub fn epoch(&self, t: u64) -> Option<usize> {
        self.times.iter().rposition(|&r| r <= t)
    }
}

/// Sampling-side active sets: a helper set intersected over time and
/// reinitialized at resets, exposed as its intersection with the pre-reset helper.
#[derive(Debug, Clone)]
pub struct SamplingSets {
    rule: StoppingRule,
    schedule: ResetSchedule,
    helper: ActivePieceState,
    previous: ActivePieceState,
    exposed: ActivePieceState,
    epoch: Option<usize>,
    resets: Vec<u64>,
    events: Vec<Elimination>,
}

impl SamplingSets {
    pub fn new(spec: &ProblemSpec, rule: StoppingRule, schedule: ResetSchedule) -> Self {
        let init = ActivePieceState::init(spec);
        Self {
            rule,
            schedule,
            helper: init.clone(),
            previous: init.clone(),
            exposed: init,
            epoch: None,
            resets: Vec::new(),
            events: Vec::new(),
        }
    }

    /// Advances to step `stats.t()` using the `α` threshold.
    pub fn step(&mut self, spec: &ProblemSpec, inst: &BanditInstance, stats: &Statistics, thr: &Threshold) -> Result<Update> {
        let t = stats.t();
        let alpha = thr.alpha(t)?;
        let epoch = self.schedule.epoch(t);
        if epoch.is_some() && epoch != self.epoch {
            self.previous = std::mem::replace(&mut self.helper, ActivePieceState::init(spec));
            self.resets.push(t);
            self.epoch = epoch;
        }
        let up = update_state(self.rule, &mut self.helper, spec, inst, stats, alpha);
        self.events.extend(up.eliminated.iter().map(|&piece| Elimination { t, piece }));
        self.exposed = self.helper.clone();
        self.exposed.intersect(&self.previous);
        Ok(up)
    }

    /// `P^smp_t`.
    pub fn exposed(&self) -> &ActivePieceState {
        &self.exposed
    }

    pub fn helper(&self) -> &ActivePieceState {
        &self.helper
    }

    /// Steps at which a reset fired.
    pub fn resets(&self) -> &[u64] {
        &self.resets
    }

    /// Helper-set eliminations, including re-eliminations after resets.
    pub fn events(&self) -> &[Elimination] {
        &self.events
    }
}
