//! Pure-exploration bandits with piece-wise elimination of the alternative set.
//!
//! Modules, bottom up: [`model`] (instances, statistics, closed-form
//! projections), [`problems`] (answers, pieces, active-piece bookkeeping),
//! [`stopping`] (thresholds, monitors, sampling-side sets), [`allocation`]
//! (the max-min game and tracking), [`samplers`] and [`harness`].

pub mod allocation;
pub mod error;
pub mod harness;
pub mod model;
pub mod problems;
pub mod samplers;
pub mod stopping;

pub use allocation::{characteristic_value, optimal_weights, track, GameSolution, SolverOptions, Tracking, Weights};
pub use error::{Error, Result};
pub use harness::{
    emit, run_batch, run_on, run_shared, run_single, summarize, ExperimentConfig, InstanceSource, OutputPaths, RunRecord, Runner, Summary, Task,
};
pub use model::{sample_reward, BanditInstance, HalfSpace, InverseDesign, Projection, RngStream, Statistics, Structure};
pub use problems::{
    inf_llr_piece, inf_llr_value, naive_inf_llr, naive_stop_check, ActivePieceState, Answer, AnswerOf, NaiveEnumeration, PieceId, ProblemKind,
    ProblemSpec, Update,
};
pub use samplers::{make_sampler, Sampler, SamplerKind, SamplerOptions, SamplingContext};
pub use stopping::{Elimination, ResetSchedule, SamplingSets, StoppingMonitor, StoppingRule, Threshold, ThresholdMode};
