//! Oracle suites behind `pe verify`.

use anyhow::{bail, Result};
use pe_core::{
    inf_llr_value, naive_inf_llr, naive_stop_check, BanditInstance, ExperimentConfig, InstanceSource, NaiveEnumeration, ProblemSpec,
    ResetSchedule, RngStream, Runner, SamplerKind, Statistics, StoppingMonitor, StoppingRule, Structure,
};

const CLOSED_FORM_TOL: f64 = 1e-6;

fn random_instance(rng: &mut RngStream, k: usize, structure: Structure) -> Result<BanditInstance> {
    Ok(match structure {
        Structure::Unstructured => BanditInstance::unstructured((0..k).map(|_| rng.uniform(-1.0, 1.0)).collect())?,
        Structure::Linear => {
            let d = 3;
            // Canonical arms keep the design well conditioned for the first-order oracle.
            let mut features: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| f64::from(u8::from(i == j))).collect()).collect();
            while features.len() < k {
                features.push((0..d).map(|_| rng.uniform(-1.0, 1.0)).collect());
            }
            BanditInstance::new(features, (0..d).map(|_| rng.uniform(-1.0, 1.0)).collect(), Structure::Linear)?
        }
    })
}

fn closed_forms(cases: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for spec in [ProblemSpec::bai(5)?, ProblemSpec::top_m(5, 2)?, ProblemSpec::osi(5)?] {
        for structure in [Structure::Unstructured, Structure::Linear] {
            let mut rng = RngStream::new(1);
            for _ in 0..cases {
                let inst = random_instance(&mut rng, 5, structure)?;
                let mut stats = Statistics::new(&inst);
                for k in 0..inst.k() {
                    for _ in 0..1 + rng.uniform(0.0, 20.0) as usize {
                        stats.update(&inst, k, rng.uniform(-2.0, 2.0))?;
                    }
                }
                let answer = spec.answer_for(&inst, stats.theta_hat()).answer;
                for p in spec.pieces(&answer) {
                    let closed = inf_llr_value(&spec, &inst, &stats, &answer, p);
                    worst = worst.max((closed - naive_inf_llr(&spec, &inst, &stats, &answer, p)?).abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Returns (matching runs, runs where the compact rule stopped later) per rule.
fn enumeration(spec: ProblemSpec, runs: u64) -> Result<[(u64, u64); 2]> {
    let mut out = [(0, 0); 2];
    for seed in 0..runs {
        let mut rng = RngStream::new(100 + seed);
        let means: Vec<f64> = (0..spec.k()).map(|i| 1.0 - 0.45 * i as f64 + rng.uniform(-0.1, 0.1)).collect();
        let inst = BanditInstance::unstructured(means)?;
        let cfg = ExperimentConfig::new(spec.kind(), InstanceSource::uns40(), SamplerKind::Oracle, StoppingRule::Llr);
        let mut runner = Runner::new(&cfg, inst.clone(), seed)?;
        let mut monitors = [StoppingMonitor::new(StoppingRule::Selective, &spec), StoppingMonitor::new(StoppingRule::Full, &spec)];
        let mut naive = [NaiveEnumeration::new(&spec)?, NaiveEnumeration::new(&spec)?];
        let mut naive_stop = [None, None];
        runner.warm_up()?;
        while (0..2).any(|r| monitors[r].stopped().is_none() || naive_stop[r].is_none()) {
            let t = runner.stats().t();
            if t > 1_000_000 {
                bail!("enumeration trajectory {seed} did not stop");
            }
            let beta = runner.thr.beta(t);
            for r in 0..2 {
                monitors[r].step_with_beta(&spec, &inst, runner.stats(), beta);
                if naive_stop[r].is_none() {
                    naive_stop[r] = naive_stop_check(&mut naive[r], r == 1, &inst, runner.stats(), beta).map(|a| (t, a));
                }
            }
            runner.advance(None)?;
        }
        for r in 0..2 {
            let eff = monitors[r].stopped().cloned();
            out[r].0 += u64::from(eff == naive_stop[r]);
            out[r].1 += u64::from(eff.unwrap().0 > naive_stop[r].as_ref().unwrap().0);
        }
    }
    Ok(out)
}

pub fn run(cases: usize, runs: u64) -> Result<()> {
    let mut ok = true;
    let worst = closed_forms(cases)?;
    let pass = worst <= CLOSED_FORM_TOL;
    ok &= pass;
    println!("{} closed forms vs projected-gradient oracle: max abs error {worst:.2e}", verdict(pass));

    for spec in [ProblemSpec::bai(5)?, ProblemSpec::top_m(5, 2)?, ProblemSpec::osi(4)?] {
        let [sel, full] = enumeration(spec, runs)?;
        // Compact encodings may stop earlier than the per-answer enumeration, never later.
        let pass = sel.1 == 0 && full.1 == 0;
        ok &= pass;
        println!(
            "{} {} compact sets vs enumeration: selective {}/{runs} identical, full {}/{runs} identical, later stops {}",
            verdict(pass),
            spec.name(),
            sel.0,
            full.0,
            sel.1 + full.1
        );
    }

    let times = ResetSchedule::new(2)?.times()[..4].to_vec();
    let pass = times == [2, 4, 16, 256];
    ok &= pass;
    println!("{} reset schedule from 2: {times:?}", verdict(pass));
    if !ok {
        bail!("verification failed");
    }
    Ok(())
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}
