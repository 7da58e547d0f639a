//! Instance generators, the run loop, batch execution and CSV/JSON output.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{sample_reward, BanditInstance, RngStream, Statistics, Structure};
use crate::problems::{ActivePieceState, Answer, PieceId, ProblemKind, ProblemSpec};
use crate::samplers::{make_sampler, Sampler, SamplerKind, SamplerOptions, SamplingContext};
use crate::stopping::{update_state, Elimination, ResetSchedule, SamplingSets, StoppingMonitor, StoppingRule, Threshold, ThresholdMode};

/// Runs stop with a flag when they reach this many samples.
pub const STEP_CAP: u64 = 10_000_000;

const GENERATOR_ATTEMPTS: usize = 1_000_000;

/// Which task a generator targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// BAI and Top-m share one recipe.
    Ranking,
    Sign,
}

impl Task {
    pub fn for_problem(kind: ProblemKind) -> Self {
        match kind {
            ProblemKind::Osi => Task::Sign,
            _ => Task::Ranking,
        }
    }
}

fn unit_vector(rng: &mut RngStream, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn canonical(d: usize, i: usize) -> Vec<f64> {
    (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn instance_rng(seed: u64) -> RngStream {
    RngStream::new(seed ^ 0x9E37_79B9_7F4A_7C15)
}

/// Block construction: `θ = 1`, arm 1 canonical, the rest are copies of a
/// normalized 3-vector with coordinate sum in `[0, 0.8]` placed in each block.
/// `d = 1 + 3·blocks`; the reference instance is `k = 50, d = 10`.
pub fn gen_linear_f2_small(seed: u64, k: usize, d: usize) -> Result<BanditInstance> {
    if d < 4 || !(d - 1).is_multiple_of(3) || k < 2 {
        return Err(Error::InvalidConfig(format!("block recipe needs d = 1 + 3b and K >= 2, got K={k}, d={d}")));
    }
    let blocks = (d - 1) / 3;
    let mut rng = instance_rng(seed);
    let mut features = vec![canonical(d, 0)];
    let mut attempts = 0;
    while features.len() < k {
        attempts += 1;
        if attempts > GENERATOR_ATTEMPTS {
            return Err(Error::InvalidConfig("block recipe rejection sampling exhausted".into()));
        }
        let v = unit_vector(&mut rng, 3);
        let s: f64 = v.iter().sum();
        if !(0.0..=0.8).contains(&s) {
            continue;
        }
        for b in 0..blocks {
            if features.len() == k {
                break;
            }
            let mut f = vec![0.0; d];
            f[1 + 3 * b..4 + 3 * b].copy_from_slice(&v);
            features.push(f);
        }
    }
    BanditInstance::new(features, vec![1.0; d], Structure::Linear)
}

/// Canonical-plus-random recipe. The first `n_canonical` arms are basis
/// vectors; the remaining arms are random unit vectors accepted by a mean window.
/// Ranking: `θ = (1, 0.9 × n_high, 0.8 …)` on the canonical block, `U[-0.5, 0.5]`
/// elsewhere, accept `vᵀθ ≤ 0.5`. Sign: canonical block uniform in `±[0.1, 0.2]`,
/// accept `|vᵀθ| ≥ 0.5`. The reference instance is `k = 50, d = 20, n_canonical = 10, n_high = 4`.
pub fn gen_linear_f2_large(seed: u64, task: Task, k: usize, d: usize, n_canonical: usize, n_high: usize) -> Result<BanditInstance> {
    if n_canonical == 0 || n_canonical > d || n_canonical > k || n_high + 1 > n_canonical {
        return Err(Error::InvalidConfig(format!(
            "canonical recipe needs 1 + n_high <= n_canonical <= min(K, d), got K={k}, d={d}, n_canonical={n_canonical}, n_high={n_high}"
        )));
    }
    let mut rng = instance_rng(seed);
    let mut theta = vec![0.0; d];
    for (j, x) in theta.iter_mut().enumerate() {
        *x = if j >= n_canonical {
            rng.uniform(-0.5, 0.5)
        } else {
            match task {
                Task::Ranking if j == 0 => 1.0,
                Task::Ranking if j <= n_high => 0.9,
                Task::Ranking => 0.8,
                Task::Sign => {
                    let mag = rng.uniform(0.1, 0.2);
                    if rng.uniform(0.0, 1.0) < 0.5 {
                        -mag
                    } else {
                        mag
                    }
                }
            }
        };
    }
    let mut features: Vec<Vec<f64>> = (0..n_canonical).map(|i| canonical(d, i)).collect();
    let mut attempts = 0;
    while features.len() < k {
        attempts += 1;
        if attempts > GENERATOR_ATTEMPTS {
            return Err(Error::InvalidConfig("canonical recipe rejection sampling exhausted".into()));
        }
        let v = unit_vector(&mut rng, d);
        let mu = dot(&v, &theta);
        let accept = match task {
            Task::Ranking => mu <= 0.5,
            Task::Sign => mu.abs() >= 0.5,
        };
        if accept {
            features.push(v);
        }
    }
    BanditInstance::new(features, theta, Structure::Linear)
}

/// Unstructured recipe. Ranking: means `1, .9, .8, .7, .6` then `U[0, 0.5]`.
/// Sign: `.1, −.2, .3, −.4` then uniform on `[−1, −0.5] ∪ [0.5, 1]`. Reference `k = 40`.
pub fn gen_unstructured(seed: u64, task: Task, k: usize) -> Result<BanditInstance> {
    let head: &[f64] = match task {
        Task::Ranking => &[1.0, 0.9, 0.8, 0.7, 0.6],
        Task::Sign => &[0.1, -0.2, 0.3, -0.4],
    };
    if k < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 arms, got {k}")));
    }
    let mut rng = instance_rng(seed);
    let mut means: Vec<f64> = head.iter().copied().take(k).collect();
    while means.len() < k {
        means.push(match task {
            Task::Ranking => rng.uniform(0.0, 0.5),
            Task::Sign => {
                let mag = rng.uniform(0.5, 1.0);
                if rng.uniform(0.0, 1.0) < 0.5 {
                    -mag
                } else {
                    mag
                }
            }
        });
    }
    BanditInstance::unstructured(means)
}

/// Two-dimensional example: `φ₁ = e₁`, `φ₂ = e₂`, remaining arms unit vectors
/// evenly spread strictly inside the negative quadrant, `θ = (1, 1 − ε)`.
pub fn gen_example_g(k: usize, epsilon: f64) -> Result<BanditInstance> {
    if k < 3 || !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidConfig(format!("example needs K >= 3 and 0 < epsilon < 0.5, got K={k}, epsilon={epsilon}")));
    }
    let mut features = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    for i in 1..=k - 2 {
        let angle = std::f64::consts::PI + std::f64::consts::FRAC_PI_2 * i as f64 / (k - 1) as f64;
        features.push(vec![angle.cos(), angle.sin()]);
    }
    BanditInstance::new(features, vec![1.0, 1.0 - epsilon], Structure::Linear)
}

/// Where the bandit instance of an experiment comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum InstanceSource {
    F2Small { k: usize, d: usize },
    F2Large { k: usize, d: usize, n_canonical: usize, n_high: usize },
    Uns40 { k: usize },
    ExampleG { k: usize, epsilon: f64 },
    File { path: PathBuf },
}

impl InstanceSource {
    pub fn f2_small() -> Self {
        InstanceSource::F2Small { k: 50, d: 10 }
    }

    pub fn f2_large() -> Self {
        InstanceSource::F2Large { k: 50, d: 20, n_canonical: 10, n_high: 4 }
    }

    pub fn uns40() -> Self {
        InstanceSource::Uns40 { k: 40 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InstanceSource::F2Small { .. } => "f2_small",
            InstanceSource::F2Large { .. } => "f2_large",
            InstanceSource::Uns40 { .. } => "uns40",
            InstanceSource::ExampleG { .. } => "example_g",
            InstanceSource::File { .. } => "file",
        }
    }

    pub fn build(&self, seed: u64, task: Task) -> Result<BanditInstance> {
        match self {
            InstanceSource::F2Small { k, d } => gen_linear_f2_small(seed, *k, *d),
            InstanceSource::F2Large { k, d, n_canonical, n_high } => gen_linear_f2_large(seed, task, *k, *d, *n_canonical, *n_high),
            InstanceSource::Uns40 { k } => gen_unstructured(seed, task, *k),
            InstanceSource::ExampleG { k, epsilon } => gen_example_g(*k, *epsilon),
            InstanceSource::File { path } => BanditInstance::from_json(&fs::read_to_string(path)?),
        }
    }
}

/// One experiment: problem, instance, sampler, stopping rule and seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub instance: InstanceSource,
    pub algo: SamplerKind,
    pub stopping: StoppingRule,
    pub elim_sampling: bool,
    pub delta: f64,
    pub reps: usize,
    pub seed: u64,
    pub threshold_mode: ThresholdMode,
    pub tbar0: u64,
    pub c1: f64,
    pub c2: f64,
    pub sampler: SamplerOptions,
    pub step_cap: u64,
    /// Active-set sizes are recorded at powers of two and at the stop.
    pub record_sizes: bool,
}

impl ExperimentConfig {
    pub fn new(problem: ProblemKind, instance: InstanceSource, algo: SamplerKind, stopping: StoppingRule) -> Self {
        Self {
            problem,
            instance,
            algo,
            stopping,
            elim_sampling: false,
            delta: 0.1,
            reps: 1,
            seed: 0,
            threshold_mode: ThresholdMode::Heuristic,
            tbar0: 2,
            c1: Threshold::DEFAULT_C1,
            c2: Threshold::DEFAULT_C2,
            sampler: SamplerOptions::default(),
            step_cap: STEP_CAP,
            record_sizes: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidConfig("reps must be at least 1".into()));
        }
        self.threshold()?;
        ResetSchedule::new(self.tbar0)?;
        Ok(())
    }

    pub fn threshold(&self) -> Result<Threshold> {
        Threshold::new(self.threshold_mode, self.delta, self.c1, self.c2)
    }

    /// Instance drawn from the base seed; identical for every run of a batch.
    pub fn build_instance(&self) -> Result<BanditInstance> {
        let inst = self.instance.build(self.seed, Task::for_problem(self.problem))?;
        ProblemSpec::new(self.problem, inst.k())?;
        Ok(inst)
    }

    pub fn spec_for(&self, inst: &BanditInstance) -> Result<ProblemSpec> {
        ProblemSpec::new(self.problem, inst.k())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    /// First 16 hex digits of the SHA-256 of the JSON config.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serialization cannot fail");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Noise seed of run `i` in a batch.
    pub fn run_seed(&self, i: usize) -> u64 {
        self.seed.wrapping_add(i as u64)
    }
}

/// Drives one trajectory: statistics, noise, sampler and optional sampling sets.
pub struct Runner {
    pub spec: ProblemSpec,
    pub inst: BanditInstance,
    pub thr: Threshold,
    stats: Statistics,
    rng: RngStream,
    sampler: Box<dyn Sampler>,
    sampling_sets: Option<SamplingSets>,
    private_state: Option<ActivePieceState>,
    elim_sampling: bool,
    sampling_pieces: u64,
}

impl Runner {
    pub fn new(config: &ExperimentConfig, inst: BanditInstance, seed: u64) -> Result<Self> {
        config.validate()?;
        let spec = config.spec_for(&inst)?;
        let thr = config.threshold()?;
        let sampler = make_sampler(config.algo, &spec, &inst, &config.sampler)?;
        let rule = if config.stopping == StoppingRule::Full { StoppingRule::Full } else { StoppingRule::Selective };
        let sampling_sets = (config.elim_sampling && thr.mode == ThresholdMode::Theory)
            .then(|| ResetSchedule::new(config.tbar0).map(|s| SamplingSets::new(&spec, rule, s)))
            .transpose()?;
        let stats = Statistics::new(&inst);
        Ok(Self {
            spec,
            inst,
            thr,
            stats,
            rng: RngStream::new(seed),
            sampler,
            sampling_sets,
            private_state: None,
            elim_sampling: config.elim_sampling,
            sampling_pieces: 0,
        })
    }

    pub fn stats(&self) -> &Statistics {
        &self.stats
    }

    pub fn sampling_sets(&self) -> Option<&SamplingSets> {
        self.sampling_sets.as_ref()
    }

    /// Total pieces handed to the sampler so far.
    pub fn sampling_pieces(&self) -> u64 {
        self.sampling_pieces
    }

    pub fn last_weights(&self) -> &[f64] {
        self.sampler.last_weights()
    }

    fn pull(&mut self, k: usize) -> Result<()> {
        let x = sample_reward(&self.inst, k, &mut self.rng)?;
        self.stats.update(&self.inst, k, x)
    }

    /// One pull of every arm.
    pub fn warm_up(&mut self) -> Result<()> {
        for k in 0..self.inst.k() {
            self.pull(k)?;
        }
        Ok(())
    }

    /// Samples the next arm and observes it. `shared` is the stopping-side
    /// active set used for sampling in heuristic mode.
    pub fn advance(&mut self, shared: Option<&ActivePieceState>) -> Result<usize> {
        let answer = self.spec.answer_for(&self.inst, self.stats.theta_hat()).answer;
        let mut pieces = if !self.elim_sampling {
            self.spec.pieces(&answer)
        } else if let Some(sets) = &mut self.sampling_sets {
            sets.step(&self.spec, &self.inst, &self.stats, &self.thr)?;
            sets.exposed().active_pieces(&self.spec, &answer)
        } else if let Some(state) = shared {
            state.active_pieces(&self.spec, &answer)
        } else {
            // LLR stopping keeps no active set; keep a selective one for sampling.
            let state = self.private_state.get_or_insert_with(|| ActivePieceState::init(&self.spec));
            let beta = self.thr.beta(self.stats.t());
            update_state(StoppingRule::Selective, state, &self.spec, &self.inst, &self.stats, beta);
            state.active_pieces(&self.spec, &answer)
        };
        if pieces.is_empty() {
            pieces = self.spec.pieces(&answer);
        }
        self.sampling_pieces += pieces.len() as u64;
        let ctx = SamplingContext {
            spec: &self.spec,
            inst: &self.inst,
            stats: &self.stats,
            thr: &self.thr,
            answer: &answer,
            pieces: &pieces,
        };
        let k = self.sampler.next_arm(&ctx)?;
        self.pull(k)?;
        Ok(k)
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: usize,
    pub config_hash: String,
    pub algo: SamplerKind,
    pub stopping: StoppingRule,
    pub elim_sampling: bool,
    pub problem: String,
    pub structure: Structure,
    pub k: usize,
    pub d: usize,
    pub delta: f64,
    pub seed: u64,
    pub samples: u64,
    pub answer: Option<Answer>,
    pub correct: bool,
    pub wall_ns: u64,
    pub per_iter_ns: f64,
    pub minimizations: u64,
    pub sampling_pieces: u64,
    /// `(t, active pieces)` at powers of two and at the stop.
    pub active_sizes: Vec<(u64, usize)>,
    pub eliminations: Vec<Elimination>,
    pub capped: bool,
}

impl RunRecord {
    /// Equality ignoring wall-clock fields.
    pub fn same_outcome(&self, other: &RunRecord) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.wall_ns = 0;
        a.per_iter_ns = 0.0;
        b.wall_ns = 0;
        b.per_iter_ns = 0.0;
        a == b
    }
}

/// Runs one seeded trajectory of `config` to its stop or the step cap.
pub fn run_single(config: &ExperimentConfig, seed: u64) -> Result<RunRecord> {
    let inst = config.build_instance()?;
    run_on(config, &inst, 0, seed)
}

/// As [`run_single`] on an explicit instance.
pub fn run_on(config: &ExperimentConfig, inst: &BanditInstance, run_id: usize, seed: u64) -> Result<RunRecord> {
    let mut runner = Runner::new(config, inst.clone(), seed)?;
    let spec = runner.spec;
    let truth = spec.answer_of(inst.means()).answer;
    let mut monitor = StoppingMonitor::new(config.stopping, &spec);
    let mut sizes = Vec::new();
    let mut wall_ns: u64 = 0;
    let mut iters: u64 = 0;
    let mut capped = false;
    runner.warm_up()?;
    let answer = loop {
        let start = Instant::now();
        let t = runner.stats().t();
        let stop = monitor.step(&spec, &runner.inst, runner.stats(), &runner.thr);
        if config.record_sizes && (t.is_power_of_two() || stop.is_some()) {
            let size = monitor.state().map_or(spec.piece_count(), |s| s.size());
            sizes.push((t, size));
        }
        if stop.is_some() {
            wall_ns += start.elapsed().as_nanos() as u64;
            iters += 1;
            break stop;
        }
        if t >= config.step_cap {
            capped = true;
            break None;
        }
        runner.advance(monitor.state())?;
        wall_ns += start.elapsed().as_nanos() as u64;
        iters += 1;
    };
    Ok(RunRecord {
        run_id,
        config_hash: config.hash(),
        algo: config.algo,
        stopping: config.stopping,
        elim_sampling: config.elim_sampling,
        problem: spec.name().to_string(),
        structure: inst.structure(),
        k: inst.k(),
        d: inst.d(),
        delta: config.delta,
        seed,
        samples: runner.stats().t(),
        correct: answer.as_ref() == Some(&truth),
        answer,
        wall_ns,
        per_iter_ns: wall_ns as f64 / iters.max(1) as f64,
        minimizations: monitor.minimizations(),
        sampling_pieces: runner.sampling_pieces(),
        active_sizes: sizes,
        eliminations: monitor.events().to_vec(),
        capped,
    })
}

/// Several stopping rules observed on one shared trajectory.
#[derive(Debug, Clone)]
pub struct SharedRun {
    pub monitors: Vec<StoppingMonitor>,
    pub samples: u64,
    pub capped: bool,
}

impl SharedRun {
    pub fn stop_time(&self, i: usize) -> Option<u64> {
        self.monitors[i].stopped().map(|(t, _)| *t)
    }
}

/// Runs until every monitor has stopped. Sampling never reads the monitors,
/// so elimination at sampling is only allowed through theory-mode sets.
pub fn run_shared(config: &ExperimentConfig, inst: &BanditInstance, seed: u64, rules: &[StoppingRule]) -> Result<SharedRun> {
    if config.elim_sampling && config.threshold_mode == ThresholdMode::Heuristic {
        return Err(Error::InvalidConfig("shared trajectories cannot feed one monitor's active set to the sampler".into()));
    }
    let mut runner = Runner::new(config, inst.clone(), seed)?;
    let spec = runner.spec;
    let mut monitors: Vec<StoppingMonitor> = rules.iter().map(|&r| StoppingMonitor::new(r, &spec)).collect();
    runner.warm_up()?;
    loop {
        let mut all = true;
        for m in &mut monitors {
            all &= m.step(&spec, &runner.inst, runner.stats(), &runner.thr).is_some();
        }
        let t = runner.stats().t();
        if all || t >= config.step_cap {
            return Ok(SharedRun { monitors, samples: t, capped: !all });
        }
        runner.advance(None)?;
    }
}

/// Aggregates over a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub runs: usize,
    pub mean_samples: f64,
    pub std_samples: f64,
    pub mean_per_iter_ns: f64,
    pub error_rate: f64,
    pub mean_minimizations: f64,
    pub capped: usize,
}

pub fn summarize(records: &[RunRecord]) -> Summary {
    let n = records.len();
    if n == 0 {
        return Summary { runs: 0, mean_samples: 0.0, std_samples: 0.0, mean_per_iter_ns: 0.0, error_rate: 0.0, mean_minimizations: 0.0, capped: 0 };
    }
    let nf = n as f64;
    let mean = |f: &dyn Fn(&RunRecord) -> f64| records.iter().map(f).sum::<f64>() / nf;
    let mean_samples = mean(&|r| r.samples as f64);
    let var = if n > 1 {
        records.iter().map(|r| (r.samples as f64 - mean_samples).powi(2)).sum::<f64>() / (nf - 1.0)
    } else {
        0.0
    };
    Summary {
        runs: n,
        mean_samples,
        std_samples: var.sqrt(),
        mean_per_iter_ns: mean(&|r| r.per_iter_ns),
        error_rate: mean(&|r| if r.correct { 0.0 } else { 1.0 }),
        mean_minimizations: mean(&|r| r.minimizations as f64),
        capped: records.iter().filter(|r| r.capped).count(),
    }
}

/// Runs `seeds.len()` trajectories on the batch instance, in parallel.
pub fn run_batch_with_seeds(config: &ExperimentConfig, seeds: &[u64]) -> Result<Vec<RunRecord>> {
    let inst = config.build_instance()?;
    seeds.par_iter().enumerate().map(|(i, &s)| run_on(config, &inst, i, s)).collect()
}

/// Runs `config.reps` trajectories with consecutive seeds.
pub fn run_batch(config: &ExperimentConfig) -> Result<(Vec<RunRecord>, Summary)> {
    config.validate()?;
    let seeds: Vec<u64> = (0..config.reps).map(|i| config.run_seed(i)).collect();
    let records = run_batch_with_seeds(config, &seeds)?;
    let summary = summarize(&records);
    Ok((records, summary))
}

pub const RUNS_HEADER: &str = "run_id,algo,stopping,elim_sampling,problem,structure,K,d,delta,seed,samples,correct,wall_ns,per_iter_ns,minimizations";
pub const TRACE_HEADER: &str = "run_id,t,problem,piece_kind,piece_a,piece_b";

/// One line of the per-run CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub run_id: usize,
    pub algo: SamplerKind,
    pub stopping: StoppingRule,
    pub elim_sampling: String,
    pub problem: String,
    pub structure: Structure,
    #[serde(rename = "K")]
    pub k: usize,
    pub d: usize,
    pub delta: f64,
    pub seed: u64,
    pub samples: u64,
    pub correct: bool,
    pub wall_ns: u64,
    pub per_iter_ns: f64,
    pub minimizations: u64,
}

impl From<&RunRecord> for RunRow {
    fn from(r: &RunRecord) -> Self {
        Self {
            run_id: r.run_id,
            algo: r.algo,
            stopping: r.stopping,
            elim_sampling: if r.elim_sampling { "on" } else { "off" }.into(),
            problem: r.problem.clone(),
            structure: r.structure,
            k: r.k,
            d: r.d,
            delta: r.delta,
            seed: r.seed,
            samples: r.samples,
            correct: r.correct,
            wall_ns: r.wall_ns,
            per_iter_ns: r.per_iter_ns,
            minimizations: r.minimizations,
        }
    }
}

/// One line of the elimination trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub run_id: usize,
    pub t: u64,
    pub problem: String,
    pub piece_kind: String,
    pub piece_a: usize,
    pub piece_b: Option<usize>,
}

pub fn trace_rows(r: &RunRecord) -> Vec<TraceRow> {
    r.eliminations
        .iter()
        .map(|e| {
            let (a, b) = match e.piece {
                PieceId::Arm(j) | PieceId::Sign(j) => (j, None),
                PieceId::Pair { inside, outside } => (inside, Some(outside)),
            };
            TraceRow { run_id: r.run_id, t: e.t, problem: r.problem.clone(), piece_kind: e.piece.kind().into(), piece_a: a, piece_b: b }
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, header: &str, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(header.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Output file locations.
#[derive(Debug, Clone)]
pub struct OutputPaths {
    pub runs: PathBuf,
    pub trace: PathBuf,
    pub summary: PathBuf,
}

impl OutputPaths {
    pub fn in_dir(dir: &Path) -> Self {
        Self { runs: dir.join("runs.csv"), trace: dir.join("trace.csv"), summary: dir.join("summary.json") }
    }
}

/// Writes the per-run CSV, the elimination trace and the summary JSON.
pub fn emit(records: &[RunRecord], paths: &OutputPaths) -> Result<()> {
    write_csv(&paths.runs, RUNS_HEADER, records.iter().map(RunRow::from))?;
    write_csv(&paths.trace, TRACE_HEADER, records.iter().flat_map(trace_rows))?;
    fs::write(&paths.summary, serde_json::to_string_pretty(&summarize(records))?)?;
    Ok(())
}

pub fn read_runs(path: &Path) -> Result<Vec<RunRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Means `φ_kᵀθ` of a dense parameter, for callers holding raw vectors.
pub fn means_of(inst: &BanditInstance, theta: &[f64]) -> Vec<f64> {
    inst.means_under(&DVector::from_column_slice(theta))
}
