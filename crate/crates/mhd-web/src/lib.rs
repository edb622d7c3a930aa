//! Browser demo: three operations exported through wasm-bindgen, each
//! returning a JSON string for the page to plot.
//!
//! * [`spectrum_table`] — a_k, λ_k¹, λ_k² against k with the uniform bounds.
//! * [`linear_growth`] — ‖η⁺(t)‖ from `e_{2,1} + c·e_{2,2}` between the envelopes.
//! * [`decay_trace`] — ‖η⁻(t)‖ from `e_{2,l}` against `e^{−t/2}`.
//!
//! The `*_json` functions carry the logic and are what the native tests call.

use mhd_spectral::analysis::{lambda_bounds, lplus_energy_derivative, QuadFormMatrix, TAIL_LIMIT};
use mhd_spectral::basis::BasisCoefficients;
use mhd_spectral::experiments::{run_linear_decay, run_linear_instability, DECAY_MINUS};
use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

/// Basis size used by the browser runs; large enough for t ≤ 10.
pub const DEMO_BASIS: usize = 62;
const MAX_T: f64 = 20.0;
const DT: f64 = 2e-3;

fn check_time(t_end: f64) -> Result<(), String> {
    if t_end > 0.0 && t_end <= MAX_T {
        Ok(())
    } else {
        Err(format!("t_end must lie in (0, {MAX_T}], got {t_end}"))
    }
}

pub fn spectrum_table_json(k_max: usize) -> Result<String, String> {
    if !(4..=10_000).contains(&k_max) {
        return Err(format!("k_max must lie in 4..=10000, got {k_max}"));
    }
    let b = lambda_bounds(k_max).map_err(|e| e.to_string())?;
    let (mut a, mut l1, mut l2) = (Vec::new(), Vec::new(), Vec::new());
    for k in 1..=k_max {
        let m = QuadFormMatrix::new(k);
        let (x, y) = m.eigenvalues();
        a.push(m.a_k);
        l1.push(x);
        l2.push(y);
    }
    Ok(json!({
        "k": (1..=k_max).collect::<Vec<_>>(),
        "a_k": a,
        "lambda_1": l1,
        "lambda_2": l2,
        "lambda_inf": b.lambda_inf,
        "lambda_sup": b.lambda_sup,
        "argmin_k": b.argmin_k,
        "argmax_k": b.argmax_k,
        "tail_limit": TAIL_LIMIT,
        "inside": b.inside_paper_interval(),
    })
    .to_string())
}

/// Linear growth from `e_{2,1} + c·e_{2,2}`; `c` must keep `⟨L⁺η₀, η₀⟩ ≥ 0`.
pub fn linear_growth_json(c: f64, t_end: f64) -> Result<String, String> {
    check_time(t_end)?;
    if !c.is_finite() {
        return Err("c must be finite".into());
    }
    let mut cp = BasisCoefficients::unit(2, DEMO_BASIS, 1);
    cp.c[1] = c;
    let lp0 = lplus_energy_derivative(&cp);
    if lp0 < 0.0 {
        return Err(format!("⟨L⁺η₀, η₀⟩ = {lp0:.4} < 0: the envelopes do not apply to these data"));
    }
    let b = lambda_bounds(10_000).map_err(|e| e.to_string())?;
    let zero = BasisCoefficients::zeros(2, DEMO_BASIS);
    let r = run_linear_instability(&cp, &zero, t_end, DT, (b.lambda_inf, b.lambda_sup), 1e-6)
        .map_err(|e| e.to_string())?;
    Ok(json!({
        "time": r.trace.times,
        "norm": r.trace.h2_plus,
        "lower": r.trace.envelope_lower,
        "upper": r.trace.envelope_upper,
        "lp0": lp0,
        "fitted_rate": r.fitted_rate,
        "rate_floor": b.lambda_inf.sqrt(),
        "lower_margin": r.lower_margin,
        "upper_margin": r.upper_margin,
        "verdict": r.verdict,
    })
    .to_string())
}

/// Linear decay of `η⁻ = e_{2,l}` against `e^{−t/2}`.
pub fn decay_trace_json(l: usize, t_end: f64) -> Result<String, String> {
    check_time(t_end)?;
    if !(1..=DEMO_BASIS / 2).contains(&l) {
        return Err(format!("mode must lie in 1..={}, got {l}", DEMO_BASIS / 2));
    }
    let zero = BasisCoefficients::zeros(2, DEMO_BASIS);
    let cm = BasisCoefficients::unit(2, DEMO_BASIS, l);
    let r = run_linear_decay(&zero, &cm, t_end, DT, 1e-9).map_err(|e| e.to_string())?;
    let bound: Vec<f64> = r.trace.times.iter().map(|t| (-DECAY_MINUS * t).exp()).collect();
    Ok(json!({
        "time": r.trace.times,
        "norm": r.trace.h2_minus,
        "bound": bound,
        "fitted_rate": r.rate_minus,
        "excess": r.excess_minus,
        "verdict": r.verdict,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn spectrum_table(k_max: usize) -> Result<String, String> {
    spectrum_table_json(k_max)
}

#[wasm_bindgen]
pub fn linear_growth(c: f64, t_end: f64) -> Result<String, String> {
    linear_growth_json(c, t_end)
}

#[wasm_bindgen]
pub fn decay_trace(l: usize, t_end: f64) -> Result<String, String> {
    decay_trace_json(l, t_end)
}
