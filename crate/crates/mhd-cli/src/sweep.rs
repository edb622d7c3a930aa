//! Seeded ensembles of random small data, fanned out over `--jobs` threads.
//! Every run writes its own trace; the summary is ordered by run index, so
//! the output does not depend on scheduling.

use mhd_spectral::config::{ExperimentConfig, ExperimentKind, SweepData};
use mhd_spectral::experiments::{random_smooth, run_linear_decay, run_nonlinear_stability, EnergyTrace, Parity};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::output::OutDir;
use crate::run::write_trace;
use crate::{write_manifest, Failure};

struct RunResult {
    index: usize,
    seed: u64,
    amplitude: f64,
    verdict: Option<bool>,
    score: f64,
    rate: Option<f64>,
    breakdown: bool,
    trace: EnergyTrace,
}

fn one_run(cfg: &ExperimentConfig, d: &SweepData, index: usize) -> Result<RunResult, Failure> {
    let k = cfg.basis_size();
    let amp = d.amplitudes[index / d.runs];
    let seed = cfg.seed + (index % d.runs) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = random_smooth(&mut rng, k, d.band, Parity::Even);
    let m = random_smooth(&mut rng, k, d.band, Parity::Any);
    let n = p.norm().hypot(m.norm());
    let (p, m) = if n > 0.0 { (p.scaled(amp / n), m.scaled(amp / n)) } else { (p, m) };
    Ok(match cfg.experiment {
        ExperimentKind::NonlinearStability => {
            let r = run_nonlinear_stability(&p, &m, k, cfg.t_end, cfg.dt, d.margin)?;
            RunResult {
                index,
                seed,
                amplitude: amp,
                verdict: r.verdict,
                score: r.max_ratio,
                rate: r.fitted_rate,
                breakdown: r.breakdown.is_some(),
                trace: r.trace,
            }
        }
        _ => {
            let r = run_linear_decay(&p, &m, cfg.t_end, cfg.dt, 1e-9)?;
            RunResult {
                index,
                seed,
                amplitude: amp,
                verdict: Some(r.verdict),
                score: r.excess_plus.max(r.excess_minus),
                rate: r.rate_minus,
                breakdown: false,
                trace: r.trace,
            }
        }
    })
}

pub fn cmd_sweep(cfg: &ExperimentConfig, jobs: Option<usize>, out: &OutDir) -> Result<(), Failure> {
    if !matches!(cfg.experiment, ExperimentKind::NonlinearStability | ExperimentKind::LinearDecay) {
        return Err(Failure::Config(format!(
            "sweep runs nonlinear-stability or linear-decay ensembles, not {:?}",
            cfg.experiment
        )));
    }
    let d: SweepData = cfg.data_as()?;
    if d.runs == 0 || d.amplitudes.is_empty() || d.band == 0 {
        return Err(Failure::Config("sweep needs runs ≥ 1, band ≥ 1 and at least one amplitude".into()));
    }
    if d.amplitudes.iter().any(|a| !(*a >= 0.0 && a.is_finite())) || !(d.margin > 0.0) {
        return Err(Failure::Config("sweep amplitudes must be non-negative and the margin positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Config(format!("--jobs: {e}")))?;
    let total = d.amplitudes.len() * d.runs;
    let results: Vec<RunResult> =
        pool.install(|| (0..total).into_par_iter().map(|i| one_run(cfg, &d, i)).collect::<Result<_, _>>())?;
    for r in &results {
        write_trace(out, &format!("run_{:04}.csv", r.index), &r.trace)?;
    }
    let score = if cfg.experiment == ExperimentKind::NonlinearStability { "max_ratio" } else { "excess" };
    out.write_csv(
        "sweep.csv",
        &["index", "seed", "amplitude", "verdict", score, "fitted_rate", "breakdown"],
        results.iter().map(|r| {
            vec![
                r.index as f64,
                r.seed as f64,
                r.amplitude,
                r.verdict.map_or(f64::NAN, |v| if v { 1.0 } else { 0.0 }),
                r.score,
                r.rate.unwrap_or(f64::NAN),
                if r.breakdown { 1.0 } else { 0.0 },
            ]
        }),
    )?;
    write_manifest(out, cfg, json!({ "amplitudes": d.amplitudes, "runs": d.runs, "band": d.band, "margin": d.margin }))?;
    let failed = results.iter().filter(|r| r.verdict == Some(false)).count();
    println!("{} runs, {} failed verdicts", results.len(), failed);
    if results.iter().any(|r| r.breakdown) {
        return Err(Failure::Breakdown("at least one ensemble run broke down".into()));
    }
    if failed > 0 {
        return Err(Failure::Verdict(format!("{failed} of {} runs failed", results.len())));
    }
    Ok(())
}
