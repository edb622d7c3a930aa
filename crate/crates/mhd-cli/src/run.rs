//! Single experiment runs: trace CSV, manifest JSON and (where the experiment
//! has one) verdict JSON.

use std::collections::BTreeMap;

use mhd_spectral::analysis::lplus_energy_derivative;
use mhd_spectral::basis::BasisCoefficients;
use mhd_spectral::config::{
    ExperimentConfig, ExperimentKind, InstabilityData, PerturbationData, SimulateMhdData, Verdict,
};
use mhd_spectral::experiments::{
    envelope_e, estimate_horizon_constants, linear_trace, run_galerkin, run_linear_decay,
    run_linear_instability, run_nonlinear_instability, run_nonlinear_stability, two_mode_data,
    two_mode_default_coefficient, EnergyTrace, EnvelopeParams, SAMPLE_INTERVAL,
};
use mhd_spectral::fourier::FourierField;
use mhd_spectral::model::{excited_state, integrate, IntegrateOptions, MhdState, ModelParams};
use mhd_spectral::ode::step_count;
use mhd_spectral::perturbation::Galerkin;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::output::OutDir;
use crate::{write_manifest, Failure};

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

pub fn run_experiment(cfg: &ExperimentConfig, out: &OutDir) -> Result<(), Failure> {
    match cfg.experiment {
        ExperimentKind::SimulateMhd => simulate_mhd(cfg, out),
        ExperimentKind::SimulatePerturbation => simulate_perturbation(cfg, out),
        ExperimentKind::LinearInstability => linear_instability(cfg, out),
        ExperimentKind::LinearDecay => linear_decay(cfg, out),
        ExperimentKind::NonlinearStability => nonlinear_stability(cfg, out),
        ExperimentKind::NonlinearInstability => nonlinear_instability(cfg, out),
    }
}

pub fn write_trace(out: &OutDir, name: &str, trace: &EnergyTrace) -> Result<(), Failure> {
    out.write_csv(name, &trace.header(), (0..trace.len()).map(|i| trace.row(i)))
}

fn write_verdict(out: &OutDir, v: &Verdict) -> Result<(), Failure> {
    out.write_json("verdict.json", &to_json(v))
}

/// Basis coefficients from the config, padded to `k`; `default` when absent.
pub fn coefficients(
    given: Option<&BasisCoefficients>,
    k: usize,
    default: impl FnOnce() -> BasisCoefficients,
) -> Result<BasisCoefficients, Failure> {
    let c = match given {
        Some(c) => c.clone(),
        None => default(),
    };
    if c.kappa != 2 {
        return Err(Failure::Config(format!("basis coefficients must have kappa = 2, got {}", c.kappa)));
    }
    if c.len() > k {
        return Err(Failure::Config(format!("{} coefficients exceed the basis size {k}", c.len())));
    }
    if c.c.iter().any(|x| !x.is_finite()) {
        return Err(Failure::Config("non-finite basis coefficient".into()));
    }
    Ok(c.resized(k))
}

fn unit(k: usize, l: usize, amp: f64) -> BasisCoefficients {
    BasisCoefficients::unit(2, k, l).scaled(amp)
}

fn add_noise(f: &mut FourierField, rng: &mut ChaCha8Rng, amp: f64) {
    let n = f.n_max().min(8);
    for (i, a) in f.sines_mut().iter_mut().take(n).enumerate() {
        *a += amp * rng.gen_range(-1.0..1.0) / ((i + 1) * (i + 1)) as f64;
    }
}

fn simulate_mhd(cfg: &ExperimentConfig, out: &OutDir) -> Result<(), Failure> {
    let d: SimulateMhdData = cfg.data_as()?;
    let n = cfg.n_max;
    if d.preset.is_some() && (d.omega_plus.is_some() || d.omega_minus.is_some()) {
        return Err(Failure::Config("give either a preset or explicit omega_plus/omega_minus".into()));
    }
    let (preset_model, mut wp, mut wm) = match d.preset.as_deref() {
        Some("degregorio-groundstate") => {
            let w = excited_state(1, n)?.0.into_field();
            (ModelParams::DE_GREGORIO, w.clone(), w)
        }
        Some("excited-state") => {
            let w = excited_state(2, n)?.0.into_field();
            (ModelParams::DE_GREGORIO, w.clone(), w)
        }
        Some("clm-sine") => {
            let w = FourierField::sin_mode(n, 1, 1.0);
            (ModelParams::CLM, w.clone(), w)
        }
        Some(other) => return Err(Failure::Config(format!("unknown preset {other:?}"))),
        None => {
            let wp = d
                .omega_plus
                .clone()
                .ok_or_else(|| Failure::Config("simulate-mhd needs a preset or omega_plus".into()))?;
            let wm = d.omega_minus.clone().unwrap_or_else(|| wp.clone());
            (ModelParams::DE_GREGORIO, wp.resized(n), wm.resized(n))
        }
    };
    if !(d.noise.is_finite() && wp.is_finite() && wm.is_finite()) {
        return Err(Failure::Config("non-finite initial data".into()));
    }
    if d.noise != 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        add_noise(&mut wp, &mut rng, d.noise);
        add_noise(&mut wm, &mut rng, d.noise);
    }
    let params = match &d.model {
        Some(m) => m.params()?,
        None => preset_model,
    };
    let state = MhdState::new(wp, wm)?;
    let opts = IntegrateOptions {
        t_end: cfg.t_end,
        dt: cfg.dt,
        sample_interval: SAMPLE_INTERVAL,
        halving_threshold: d.halving_threshold,
    };
    let run = integrate(&state, &params, &opts, |_| {});
    out.write_csv(
        "trace.csv",
        &["time", "l2_plus", "l2_minus", "linf_h_plus", "linf_h_minus"],
        run.trace.iter().map(|r| vec![r.time, r.l2_plus, r.l2_minus, r.linf_h_plus, r.linf_h_minus]),
    )?;
    write_manifest(
        out,
        cfg,
        json!({
            "model": to_json(&params),
            "preset": d.preset,
            "noise": d.noise,
            "halving_threshold": d.halving_threshold,
            "breakdown": run.breakdown.as_ref().map(|b| json!({ "time": b.0, "reason": b.1 })),
        }),
    )?;
    match run.breakdown {
        Some((t, reason)) => Err(Failure::Breakdown(format!("t = {t}: {reason}"))),
        None => Ok(()),
    }
}

fn simulate_perturbation(cfg: &ExperimentConfig, out: &OutDir) -> Result<(), Failure> {
    let d: PerturbationData = cfg.data_as()?;
    let k = cfg.basis_size();
    let cp = coefficients(d.eta_plus.as_ref(), k, || unit(k, 2, 1e-3))?;
    let cm = coefficients(d.eta_minus.as_ref(), k, || unit(k, 1, 1e-3))?;
    if !d.q.is_finite() {
        return Err(Failure::Config("non-finite q".into()));
    }
    let sys = Galerkin::new(k, d.q, d.linear_only)?;
    let run = run_galerkin(&sys, &cp.c, &cm.c, cfg.t_end, cfg.dt, |_, _, _| false);
    write_trace(out, "trace.csv", &run.trace)?;
    write_manifest(
        out,
        cfg,
        json!({
            "q": d.q,
            "linear_only": d.linear_only,
            "basis_size": k,
            "breakdown": run.breakdown.as_ref().map(|b| json!({ "time": b.0, "reason": b.1 })),
        }),
    )?;
    match run.breakdown {
        Some((t, reason)) => Err(Failure::Breakdown(format!("t = {t}: {reason}"))),
        None => Ok(()),
    }
}

fn linear_instability(cfg: &ExperimentConfig, out: &OutDir) -> Result<(), Failure> {
    let d: PerturbationData = cfg.data_as()?;
    let k = cfg.basis_size();
    let cp = coefficients(d.eta_plus.as_ref(), k, || unit(k, 1, 1.0))?;
    let cm = coefficients(d.eta_minus.as_ref(), k, || unit(k, 1, 1.0))?;
    let slack = d.slack.unwrap_or(1e-6);
    let lambdas = cfg.lambda_source.lambdas()?;
    let ip0 = cp.norm().powi(2);
    let lp0 = lplus_energy_derivative(&cp);
    let params = json!({
        "lambda_lower": lambdas.0,
        "lambda_upper": lambdas.1,
        "lambda_source": to_json(&cfg.lambda_source),
        "slack": slack,
        "basis_size": k,
    });
    write_manifest(out, cfg, params.clone())?;
    let mut margins = BTreeMap::from([("ip0".to_string(), ip0), ("lp0".to_string(), lp0)]);
    if ip0 > 0.0 && lp0 < 0.0 {
        // outside the hypothesis: run and report, but claim nothing
        let trace = linear_trace(&cp.c, &cm.c, cfg.t_end, cfg.dt)?;
        write_trace(out, "trace.csv", &trace)?;
        return write_verdict(out, &Verdict { verdict: None, margins, fitted_rates: BTreeMap::new(), params });
    }
    let r = run_linear_instability(&cp, &cm, cfg.t_end, cfg.dt, lambdas, slack)?;
    write_trace(out, "trace.csv", &r.trace)?;
    margins.insert("lower_margin".into(), r.lower_margin);
    margins.insert("upper_margin".into(), r.upper_margin);
    let v = Verdict {
        verdict: Some(r.verdict),
        margins,
        fitted_rates: BTreeMap::from([("h2_plus".to_string(), r.fitted_rate)]),
        params,
    };
    write_verdict(out, &v)?;
    if r.verdict {
        Ok(())
    } else {
        Err(Failure::Verdict(format!("‖η⁺‖² fell below E₁ (margin {:.3e})", r.lower_margin)))
    }
}

fn linear_decay(cfg: &ExperimentConfig, out: &OutDir) -> Result<(), Failure> {
    let d: PerturbationData = cfg.data_as()?;
    let k = cfg.basis_size();
    let cp = coefficients(d.eta_plus.as_ref(), k, || unit(k, 2, 1.0))?;
    let cm = coefficients(d.eta_minus.as_ref(), k, || unit(k, 1, 1.0))?;
    let slack = d.slack.unwrap_or(1e-9);
    let r = run_linear_decay(&cp, &cm, cfg.t_end, cfg.dt, slack)?;
    let params = json!({ "slack": slack, "basis_size": k });
    write_manifest(out, cfg, params.clone())?;
    write_trace(out, "trace.csv", &r.trace)?;
    let mut rates = BTreeMap::new();
    if let Some(x) = r.rate_plus {
        rates.insert("h2_plus".to_string(), x);
    }
    if let Some(x) = r.rate_minus {
        rates.insert("h2_minus".to_string(), x);
    }
    let v = Verdict {
        verdict: Some(r.verdict),
        margins: BTreeMap::from([
            ("excess_plus".to_string(), r.excess_plus),
            ("excess_minus".to_string(), r.excess_minus),
        ]),
        fitted_rates: rates,
        params,
    };
    write_verdict(out, &v)?;
    if r.verdict {
        Ok(())
    } else {
        Err(Failure::Verdict(format!(
            "decay bound exceeded (excess η⁺ {:.3e}, η⁻ {:.3e})",
            r.excess_plus, r.excess_minus
        )))
    }
}

fn nonlinear_stability(cfg: &ExperimentConfig, out: &OutDir) -> Result<(), Failure> {
    let d: PerturbationData = cfg.data_as()?;
    let k = cfg.basis_size();
    let cp = coefficients(d.eta_plus.as_ref(), k, || unit(k, 2, 1e-3))?;
    let cm = coefficients(d.eta_minus.as_ref(), k, || unit(k, 1, 1e-3))?;
    let margin = d.margin.unwrap_or(2.0);
    let r = run_nonlinear_stability(&cp, &cm, k, cfg.t_end, cfg.dt, margin)?;
    let params = json!({ "margin": margin, "basis_size": k });
    write_manifest(out, cfg, params.clone())?;
    write_trace(out, "trace.csv", &r.trace)?;
    let mut margins = BTreeMap::from([("max_ratio".to_string(), r.max_ratio)]);
    if let Some(t) = r.first_violation {
        margins.insert("first_violation".into(), t);
    }
    let v = Verdict {
        verdict: r.verdict,
        margins,
        fitted_rates: r.fitted_rate.map(|x| ("i0".to_string(), x)).into_iter().collect(),
        params,
    };
    write_verdict(out, &v)?;
    if let Some((t, reason)) = r.breakdown {
        return Err(Failure::Breakdown(format!("t = {t}: {reason}")));
    }
    match r.verdict {
        Some(false) => Err(Failure::Verdict(format!(
            "I₀(t)/(e^(−t/2) I₀(0)) reached {:.4} > {margin}",
            r.max_ratio
        ))),
        _ => Ok(()),
    }
}

fn nonlinear_instability(cfg: &ExperimentConfig, out: &OutDir) -> Result<(), Failure> {
    let d: InstabilityData = cfg.data_as()?;
    let k = cfg.basis_size();
    if !(2..=k).contains(&d.mode) {
        return Err(Failure::Config(format!("mode must lie in 2..={k}, got {}", d.mode)));
    }
    if d.eps_list.is_empty() || d.eps_list.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Failure::Config("eps_list must hold positive amplitudes".into()));
    }
    let lam = cfg.lambda_source.lambdas()?.0;
    let c = d.coefficient.unwrap_or_else(|| two_mode_default_coefficient(d.mode, lam));
    let seeds = [cfg.seed + 1, cfg.seed + 2, cfg.seed + 3];
    let horizon = estimate_horizon_constants(k, d.m, &[1e-5, 1e-3, 1e-2], &seeds, 2.0, cfg.dt)?;
    let shape = two_mode_data(k, d.mode, c);
    let r = run_nonlinear_instability(&shape, &d.eps_list, d.k_lip, d.m, k, cfg.dt, lam, horizon)?;
    let params = json!({
        "mode": d.mode,
        "coefficient": c,
        "k_lip": d.k_lip,
        "m": d.m,
        "lambda": lam,
        "c1": horizon.c1,
        "c2": horizon.c2,
        "basis_size": k,
    });
    write_manifest(out, cfg, params.clone())?;
    out.write_csv(
        "runs.csv",
        &["eps", "i_m0", "u0_norm", "t_k", "t0", "t_exceed", "sup_ratio", "consistent"],
        r.runs.iter().map(|x| {
            vec![
                x.eps,
                x.i_m0,
                x.u0_norm,
                x.t_k,
                x.t0,
                x.t_exceed.unwrap_or(f64::NAN),
                x.sup_ratio,
                if x.consistent { 1.0 } else { 0.0 },
            ]
        }),
    )?;
    let mut margins = BTreeMap::from([("lp_over_norm".to_string(), r.lp_over_norm)]);
    for x in &r.runs {
        margins.insert(format!("sup_ratio_{:e}", x.eps), x.sup_ratio);
    }
    write_verdict(out, &Verdict { verdict: Some(r.verdict), margins, fitted_rates: BTreeMap::new(), params })?;
    if let Some(x) = r.runs.iter().find_map(|x| x.breakdown.as_ref()) {
        return Err(Failure::Breakdown(format!("t = {}: {}", x.0, x.1)));
    }
    if r.verdict {
        Ok(())
    } else {
        Err(Failure::Verdict("the Lipschitz ratio did not exceed K consistently for every ε".into()))
    }
}

/// `E₁`, `E₂` for the configured η₀⁺ on the sampling grid of `[0, t_end]`.
pub fn envelope(cfg: &ExperimentConfig, out: &OutDir) -> Result<(), Failure> {
    let d: PerturbationData = cfg.data_as()?;
    let k = cfg.basis_size();
    let cp = coefficients(d.eta_plus.as_ref(), k, || unit(k, 1, 1.0))?;
    let (l1, l2) = cfg.lambda_source.lambdas()?;
    let ip0 = cp.norm().powi(2);
    let lp0 = lplus_energy_derivative(&cp);
    let e1 = EnvelopeParams { lambda: l1, ip0, lp0 };
    let e2 = EnvelopeParams { lambda: l2, ip0, lp0 };
    e1.validate()?;
    e2.validate()?;
    let steps = step_count(cfg.t_end, SAMPLE_INTERVAL);
    let h = if steps == 0 { 0.0 } else { cfg.t_end / steps as f64 };
    let mut rows = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let t = i as f64 * h;
        rows.push(vec![t, envelope_e(t, &e1)?, envelope_e(t, &e2)?]);
    }
    write_manifest(out, cfg, json!({ "lambda_lower": l1, "lambda_upper": l2, "ip0": ip0, "lp0": lp0 }))?;
    out.write_csv("envelope.csv", &["time", "e_lower", "e_upper"], rows)
}
