//! Shared fixtures for the benchmarks.

use pe_core::harness::{gen_linear_f2_small, gen_unstructured};
use pe_core::{sample_reward, BanditInstance, ProblemSpec, Result, RngStream, Statistics, Task};

/// A problem, its instance and statistics after `pulls` round-robin samples.
pub struct Fixture {
    pub spec: ProblemSpec,
    pub inst: BanditInstance,
    pub stats: Statistics,
}

impl Fixture {
    fn build(spec: ProblemSpec, inst: BanditInstance, pulls: u64, seed: u64) -> Result<Self> {
        let mut rng = RngStream::new(seed);
        let mut stats = Statistics::new(&inst);
        for i in 0..pulls {
            let k = (i % inst.k() as u64) as usize;
            stats.update(&inst, k, sample_reward(&inst, k, &mut rng)?)?;
        }
        Ok(Self { spec, inst, stats })
    }

    /// Linear BAI on the small block instance.
    pub fn linear_bai(pulls: u64) -> Result<Self> {
        Self::build(ProblemSpec::bai(14)?, gen_linear_f2_small(1, 14, 4)?, pulls, 2)
    }

    /// Unstructured top-m with many comparison pairs.
    pub fn unstructured_topm(k: usize, m: usize, pulls: u64) -> Result<Self> {
        Self::build(ProblemSpec::top_m(k, m)?, gen_unstructured(3, Task::Ranking, k)?, pulls, 4)
    }
}
