//! Experiment drivers: linear growth envelopes, linear decay, nonlinear
//! stability of even-mode data, Lipschitz-type nonlinear instability, and the
//! local existence horizon.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{diag_plus, lambda_bounds, lplus_energy_derivative};
use crate::basis::{
    from_basis_on, to_basis, tridiagonal_l, BasisCoefficients, Sign, TridiagonalOperator,
};
use crate::error::{Error, Result};
use crate::fourier::{FourierField, OddField};
use crate::ode::{rk4_step, step_count};
use crate::perturbation::{rhs_perturbation, Galerkin, PerturbationState};

/// Trace sampling interval.
pub const SAMPLE_INTERVAL: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeParams {
    pub lambda: f64,
    /// `⟨η₀⁺, η₀⁺⟩`
    pub ip0: f64,
    /// `⟨L⁺η₀⁺, η₀⁺⟩`
    pub lp0: f64,
}

impl EnvelopeParams {
    pub fn validate(&self) -> Result<()> {
        let s = self.lambda.sqrt();
        if !(self.lambda > 0.0) || !(self.ip0 > 0.0) || !(self.lp0 >= -s * self.ip0) {
            return Err(Error::Precondition(format!(
                "envelope needs λ > 0, ip0 > 0 and lp0 ≥ −√λ·ip0 (λ = {}, ip0 = {}, lp0 = {})",
                self.lambda, self.ip0, self.lp0
            )));
        }
        Ok(())
    }
}

/// `E(t) = (ip0 + lp0/√λ)/2 · e^{2√λt} + (ip0 − lp0/√λ)/2 · e^{−2√λt}`,
/// the solution of `y'' = 4λy`, `y(0) = ip0`, `y'(0) = 2·lp0`.
pub fn envelope_e(t: f64, p: &EnvelopeParams) -> Result<f64> {
    p.validate()?;
    let s = p.lambda.sqrt();
    let r = p.lp0 / s;
    Ok(0.5 * (p.ip0 + r) * (2.0 * s * t).exp() + 0.5 * (p.ip0 - r) * (-2.0 * s * t).exp())
}

/// Sampled ℋ₂ norms of a perturbation trajectory.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EnergyTrace {
    pub times: Vec<f64>,
    pub h2_plus: Vec<f64>,
    pub h2_minus: Vec<f64>,
    pub i0: Vec<f64>,
    /// Lower envelope `E₁^{1/2}` (if computed).
    pub envelope_lower: Option<Vec<f64>>,
    /// Upper envelope `E₂^{1/2}` (if computed).
    pub envelope_upper: Option<Vec<f64>>,
}

impl EnergyTrace {
    pub fn push(&mut self, t: f64, hp: f64, hm: f64) {
        self.times.push(t);
        self.h2_plus.push(hp);
        self.h2_minus.push(hm);
        self.i0.push(hp.hypot(hm));
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        match name {
            "h2_plus" => Some(&self.h2_plus),
            "h2_minus" => Some(&self.h2_minus),
            "i0" => Some(&self.i0),
            "envelope_lower" => self.envelope_lower.as_deref(),
            "envelope_upper" => self.envelope_upper.as_deref(),
            _ => None,
        }
    }

    pub fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["time", "h2_plus", "h2_minus", "i0"];
        if self.envelope_lower.is_some() {
            h.push("envelope_lower");
        }
        if self.envelope_upper.is_some() {
            h.push("envelope_upper");
        }
        h
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        let mut r = vec![self.times[i], self.h2_plus[i], self.h2_minus[i], self.i0[i]];
        if let Some(e) = &self.envelope_lower {
            r.push(e[i]);
        }
        if let Some(e) = &self.envelope_upper {
            r.push(e[i]);
        }
        r
    }
}

fn norm(c: &[f64]) -> f64 {
    c.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Integrates `ċ = Mc` and calls `obs(t, c)` at every sampling instant.
pub fn integrate_banded<F>(op: &TridiagonalOperator, c0: &[f64], t_end: f64, dt: f64, mut obs: F) -> Vec<f64>
where
    F: FnMut(f64, &[f64]),
{
    let steps = step_count(t_end, dt);
    let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };
    let every = ((SAMPLE_INTERVAL / h.max(f64::MIN_POSITIVE)).round() as usize).max(1);
    let mut c = c0.to_vec();
    obs(0.0, &c);
    for i in 1..=steps {
        c = rk4_step(&c, h, |y| op.apply(y));
        if i % every == 0 || i == steps {
            obs(i as f64 * h, &c);
        }
    }
    c
}

/// Linearised banded run from `(c⁺₀, c⁻₀)`, padded to the longer of the two.
pub fn linear_trace(cp0: &[f64], cm0: &[f64], t_end: f64, dt: f64) -> Result<EnergyTrace> {
    let k = cp0.len().max(cm0.len());
    let lp = tridiagonal_l(Sign::Plus, 2, k)?;
    let lm = tridiagonal_l(Sign::Minus, 2, k)?;
    let mut cp = cp0.to_vec();
    cp.resize(k, 0.0);
    let mut cm = cm0.to_vec();
    cm.resize(k, 0.0);
    let mut tp = Vec::new();
    integrate_banded(&lp, &cp, t_end, dt, |t, c| tp.push((t, norm(c))));
    let mut tm = Vec::new();
    integrate_banded(&lm, &cm, t_end, dt, |_, c| tm.push(norm(c)));
    let mut tr = EnergyTrace::default();
    for ((t, hp), hm) in tp.into_iter().zip(tm) {
        tr.push(t, hp, hm);
    }
    Ok(tr)
}

/// Which λ to use in the envelopes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaSource {
    /// Computed `λ_inf`/`λ_sup` over k ≤ 10⁴ (the sharpest admissible choice).
    #[default]
    Computed,
    /// The crude interval endpoints 1/50 and 3/5.
    PaperInterval,
}

impl LambdaSource {
    pub fn lambdas(&self) -> Result<(f64, f64)> {
        match self {
            LambdaSource::Computed => {
                let b = lambda_bounds(10_000)?;
                Ok((b.lambda_inf, b.lambda_sup))
            }
            LambdaSource::PaperInterval => Ok((crate::analysis::LAMBDA_LOWER, crate::analysis::LAMBDA_UPPER)),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearInstabilityReport {
    pub trace: EnergyTrace,
    pub lambda_lower: f64,
    pub lambda_upper: f64,
    pub ip0: f64,
    pub lp0: f64,
    /// `min_{t ≥ dt} (‖η⁺‖² − E₁)/E₁`.
    pub lower_margin: f64,
    /// `min_{t ≥ dt} (E₂ − ‖η⁺‖²)/E₂`.
    pub upper_margin: f64,
    /// Least-squares log-slope of ‖η⁺‖ over the second half of the run.
    pub fitted_rate: f64,
    pub verdict: bool,
}

/// Linearised run from `(c⁺₀, c⁻₀)` compared with `E₁` (λ_lower) and `E₂` (λ_upper).
pub fn run_linear_instability(
    cp0: &BasisCoefficients,
    cm0: &BasisCoefficients,
    t_end: f64,
    dt: f64,
    lambdas: (f64, f64),
    slack: f64,
) -> Result<LinearInstabilityReport> {
    let ip0 = cp0.norm().powi(2);
    let lp0 = lplus_energy_derivative(cp0);
    if ip0 == 0.0 {
        return Err(Error::Precondition("η₀⁺ = 0".into()));
    }
    if lp0 < 0.0 {
        return Err(Error::Precondition(format!("⟨L⁺η₀⁺, η₀⁺⟩ = {lp0} < 0")));
    }
    let mut trace = linear_trace(&cp0.c, &cm0.c, t_end, dt)?;
    let e1 = EnvelopeParams { lambda: lambdas.0, ip0, lp0 };
    let e2 = EnvelopeParams { lambda: lambdas.1, ip0, lp0 };
    let mut lower = Vec::with_capacity(trace.len());
    let mut upper = Vec::with_capacity(trace.len());
    let (mut lm, mut um) = (f64::INFINITY, f64::INFINITY);
    for (i, &t) in trace.times.iter().enumerate() {
        let (a, b) = (envelope_e(t, &e1)?, envelope_e(t, &e2)?);
        lower.push(a.sqrt());
        upper.push(b.sqrt());
        if t >= dt * 0.999 {
            let en = trace.h2_plus[i].powi(2);
            lm = lm.min((en - a) / a);
            um = um.min((b - en) / b);
        }
    }
    trace.envelope_lower = Some(lower);
    trace.envelope_upper = Some(upper);
    let (rate, _) = fit_exponential_rate(&trace.times, &trace.h2_plus, (0.5 * t_end, t_end))?;
    Ok(LinearInstabilityReport {
        verdict: lm >= -slack,
        trace,
        lambda_lower: lambdas.0,
        lambda_upper: lambdas.1,
        ip0,
        lp0,
        lower_margin: lm,
        upper_margin: um,
        fitted_rate: rate,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub trace: EnergyTrace,
    /// `max_t (‖η⁻(t)‖ − e^{−t/2}‖η₀⁻‖)/‖η₀⁻‖`.
    pub excess_minus: f64,
    /// `max_t (‖η⁺(t)‖ − e^{−3t/8}‖η₀⁺‖)/‖η₀⁺‖`.
    pub excess_plus: f64,
    pub rate_minus: Option<f64>,
    pub rate_plus: Option<f64>,
    pub verdict: bool,
}

pub const DECAY_MINUS: f64 = 0.5;
pub const DECAY_PLUS_EVEN: f64 = 0.375;

/// Linear decay of arbitrary `η⁻` and even-mode `η⁺`.
pub fn run_linear_decay(
    cp0: &BasisCoefficients,
    cm0: &BasisCoefficients,
    t_end: f64,
    dt: f64,
    slack: f64,
) -> Result<DecayReport> {
    if cp0.c.iter().enumerate().any(|(i, &x)| i % 2 == 0 && x != 0.0) {
        return Err(Error::Precondition("η₀⁺ must be supported on even basis indices".into()));
    }
    let trace = linear_trace(&cp0.c, &cm0.c, t_end, dt)?;
    let excess = |col: &[f64], r: f64| {
        let n0 = col[0];
        if n0 == 0.0 {
            return col.iter().fold(0.0f64, |m, &x| m.max(x));
        }
        trace.times.iter().zip(col).fold(f64::NEG_INFINITY, |m, (&t, &x)| m.max((x - (-r * t).exp() * n0) / n0))
    };
    let em = excess(&trace.h2_minus, DECAY_MINUS);
    let ep = excess(&trace.h2_plus, DECAY_PLUS_EVEN);
    let rate = |col: &[f64]| {
        if col[0] > 0.0 {
            fit_exponential_rate(&trace.times, col, (0.0, t_end)).ok().map(|r| r.0)
        } else {
            None
        }
    };
    Ok(DecayReport {
        rate_minus: rate(&trace.h2_minus),
        rate_plus: rate(&trace.h2_plus),
        verdict: em <= slack && ep <= slack,
        excess_minus: em,
        excess_plus: ep,
        trace,
    })
}

/// Trajectory of the Galerkin system with a per-sample observer.
pub struct GalerkinRun {
    pub trace: EnergyTrace,
    pub final_plus: Vec<f64>,
    pub final_minus: Vec<f64>,
    pub breakdown: Option<(f64, String)>,
}

/// Integrates the nonlinear (or linear) Galerkin system, stopping early when
/// `stop(t, c⁺, c⁻)` returns true.
pub fn run_galerkin<S>(
    sys: &Galerkin,
    cp0: &[f64],
    cm0: &[f64],
    t_end: f64,
    dt: f64,
    mut stop: S,
) -> GalerkinRun
where
    S: FnMut(f64, &[f64], &[f64]) -> bool,
{
    let steps = step_count(t_end, dt);
    let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };
    let every = ((SAMPLE_INTERVAL / h.max(f64::MIN_POSITIVE)).round() as usize).max(1);
    let (mut cp, mut cm) = (cp0.to_vec(), cm0.to_vec());
    cp.resize(sys.k, 0.0);
    cm.resize(sys.k, 0.0);
    let mut trace = EnergyTrace::default();
    trace.push(0.0, norm(&cp), norm(&cm));
    let mut breakdown = None;
    if !stop(0.0, &cp, &cm) {
        for i in 1..=steps {
            let (np, nm) = sys.step(&cp, &cm, h);
            let t = i as f64 * h;
            if np.iter().chain(&nm).any(|x| !x.is_finite()) || norm(&np).max(norm(&nm)) > crate::model::BLOWUP_LINF {
                breakdown = Some((t - h, "non-finite or exploding coefficients".to_string()));
                break;
            }
            cp = np;
            cm = nm;
            if i % every == 0 || i == steps {
                trace.push(t, norm(&cp), norm(&cm));
                if stop(t, &cp, &cm) {
                    break;
                }
            }
        }
    }
    GalerkinRun { trace, final_plus: cp, final_minus: cm, breakdown }
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub trace: EnergyTrace,
    /// `max_t I₀(t) / (e^{−t/2} I₀(0))`.
    pub max_ratio: f64,
    /// Time at which the ratio first exceeded the margin.
    pub first_violation: Option<f64>,
    pub margin: f64,
    pub fitted_rate: Option<f64>,
    pub breakdown: Option<(f64, String)>,
    /// `None` when the data lie outside the small-data hypothesis.
    pub verdict: Option<bool>,
}

/// Amplitude above which no stability verdict is claimed.
pub const SMALL_DATA_GATE: f64 = 1.0;

/// Full nonlinear run from even-mode `η₀⁺` and in-span `η₀⁻`.
pub fn run_nonlinear_stability(
    cp0: &BasisCoefficients,
    cm0: &BasisCoefficients,
    k: usize,
    t_end: f64,
    dt: f64,
    margin: f64,
) -> Result<StabilityReport> {
    if cp0.c.iter().enumerate().any(|(i, &x)| i % 2 == 0 && x != 0.0) {
        return Err(Error::Precondition("η₀⁺ must be supported on even basis indices".into()));
    }
    let sys = Galerkin::new(k, 0.0, false)?;
    let run = run_galerkin(&sys, &cp0.c, &cm0.c, t_end, dt, |_, _, _| false);
    let i00 = run.trace.i0[0];
    let mut max_ratio: f64 = 0.0;
    let mut first = None;
    if i00 > 0.0 {
        for (&t, &i) in run.trace.times.iter().zip(&run.trace.i0) {
            let r = i / ((-0.5 * t).exp() * i00);
            max_ratio = max_ratio.max(r);
            if r > margin && first.is_none() {
                first = Some(t);
            }
        }
    }
    let fitted_rate = if i00 > 0.0 {
        fit_exponential_rate(&run.trace.times, &run.trace.i0, (0.5 * t_end, t_end)).ok().map(|r| r.0)
    } else {
        None
    };
    let verdict = if i00 > SMALL_DATA_GATE {
        None
    } else {
        Some(run.breakdown.is_none() && max_ratio <= margin)
    };
    Ok(StabilityReport {
        trace: run.trace,
        max_ratio,
        first_violation: first,
        margin,
        fitted_rate,
        breakdown: run.breakdown,
        verdict,
    })
}

/// `‖u‖_{H^m}` of the u-representation: `(Σ_k Σ_{j≤m} (k+1)^{2j} c_k²)^{1/2}`.
pub fn sobolev_norm_u(c: &BasisCoefficients, m: u32) -> f64 {
    c.c.iter()
        .enumerate()
        .map(|(i, &x)| {
            let w: f64 = (0..=m).map(|j| ((i + 2) as f64).powi(2 * j as i32)).sum();
            w * x * x
        })
        .sum::<f64>()
        .sqrt()
}

/// `sobolev_norm_u` of an odd field, failing off the span.
pub fn sobolev_norm_u_field(f: &OddField, m: u32) -> Result<f64> {
    let c = crate::basis::to_basis_checked(f, 2, crate::basis::SPAN_TOL)?;
    Ok(sobolev_norm_u(&c, m))
}

/// `I_m = (‖u⁺‖²_{H^m} + ‖u⁻‖²_{H^m})^{1/2}`.
pub fn i_m(cp: &BasisCoefficients, cm: &BasisCoefficients, m: u32) -> f64 {
    sobolev_norm_u(cp, m).hypot(sobolev_norm_u(cm, m))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorizonParams {
    pub c1: f64,
    pub c2: f64,
    pub i_m0: f64,
}

/// `T₀ = (1/C₁) ln(1 + C₁/(2 C₂ I_m(0)))`.
pub fn existence_horizon(p: &HorizonParams) -> Result<f64> {
    if !(p.c1 > 0.0 && p.c2 > 0.0 && p.i_m0 > 0.0) {
        return Err(Error::Precondition(format!(
            "horizon needs positive C₁, C₂, I_m(0); got {}, {}, {}",
            p.c1, p.c2, p.i_m0
        )));
    }
    Ok((1.0 + p.c1 / (2.0 * p.c2 * p.i_m0)).ln() / p.c1)
}

/// Least-squares slope of `ln(value)` against time over `window`, with r².
pub fn fit_exponential_rate(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(&t, _)| t >= window.0 - 1e-12 && t <= window.1 + 1e-12)
        .map(|(&t, &v)| (t, v))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Precondition("fewer than two samples in the fit window".into()));
    }
    if let Some(&(t, v)) = pts.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::Precondition(format!("non-positive value {v} at t = {t}")));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(t, v) in &pts {
        let (dx, dy) = (t - mt, v.ln() - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok((slope, r2))
}

/// Two-mode data `e_{2,1} + c·e_{2,k}` admissible for the instability results
/// when `c²` lies in the window
/// `[(11/18 − √λ)/(√λ + (d_{k+2} − d_k)), 11/(18(d_{k+2} − d_k))]`.
pub fn two_mode_window(k: usize, lambda: f64) -> (f64, f64) {
    let gap = -diag_plus(k);
    let s = lambda.sqrt();
    ((11.0 / 18.0 - s) / (s + gap), 11.0 / (18.0 * gap))
}

/// Coefficient `c` with `c²` at the middle of [`two_mode_window`].
pub fn two_mode_default_coefficient(k: usize, lambda: f64) -> f64 {
    let (lo, hi) = two_mode_window(k, lambda);
    (0.5 * (lo + hi)).sqrt()
}

pub fn two_mode_data(k_trunc: usize, k: usize, c: f64) -> BasisCoefficients {
    let mut b = BasisCoefficients::zeros(2, k_trunc);
    b.c[0] = 1.0;
    b.c[k - 1] += c;
    b
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorizonFit {
    pub c1: f64,
    pub c2: f64,
    pub samples: usize,
}

/// Empirical `C₁`, `C₂` with `dI_m/dt ≤ C₁ I_m + C₂ I_m²` along nonlinear runs.
///
/// `C₁` is the largest `İ_m/I_m` seen on the smallest-amplitude runs (where the
/// quadratic term is negligible); `C₂` is then the smallest constant making the
/// inequality hold on every sample of every run.
pub fn estimate_horizon_constants(
    k: usize,
    m: u32,
    amplitudes: &[f64],
    seeds: &[u64],
    t_fit: f64,
    dt: f64,
) -> Result<HorizonFit> {
    let sys = Galerkin::new(k, 0.0, false)?;
    let mut linear_max: f64 = 0.0;
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let a_min = amplitudes.iter().cloned().fold(f64::INFINITY, f64::min);
    for &seed in seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape_p = random_smooth(&mut rng, k, 8, Parity::Any);
        let shape_m = random_smooth(&mut rng, k, 8, Parity::Any);
        let base = i_m(&shape_p, &shape_m, m);
        for &amp in amplitudes {
            let (cp, cm) = (shape_p.scaled(amp / base), shape_m.scaled(amp / base));
            let mut series: Vec<(f64, f64)> = Vec::new();
            run_galerkin(&sys, &cp.c, &cm.c, t_fit, dt, |t, p, q| {
                let bp = BasisCoefficients { kappa: 2, c: p.to_vec() };
                let bq = BasisCoefficients { kappa: 2, c: q.to_vec() };
                series.push((t, i_m(&bp, &bq, m)));
                false
            });
            for w in series.windows(3) {
                let di = (w[2].1 - w[0].1) / (w[2].0 - w[0].0);
                let i = w[1].1;
                if amp == a_min {
                    linear_max = linear_max.max(di / i);
                }
                samples.push((i, di));
            }
        }
    }
    let c1 = linear_max.max(f64::EPSILON);
    let c2 = samples.iter().fold(0.0f64, |m, &(i, di)| m.max((di - c1 * i) / (i * i)));
    Ok(HorizonFit { c1, c2: c2.max(f64::EPSILON), samples: samples.len() })
}

#[derive(Clone, Debug, Serialize)]
pub struct InstabilityRun {
    pub eps: f64,
    /// `I_m(0) = δ`.
    pub i_m0: f64,
    pub u0_norm: f64,
    pub t_k: f64,
    pub t0: f64,
    pub t_exceed: Option<f64>,
    /// `sup_{t ≤ T₀} ‖u⁺(t)‖ / I_m(0)`.
    pub sup_ratio: f64,
    /// `t_exceed ∈ [t_K/2, 2t_K]`.
    pub consistent: bool,
    pub breakdown: Option<(f64, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InstabilityReport {
    pub k_lip: f64,
    pub m: u32,
    pub lambda: f64,
    pub lp_over_norm: f64,
    pub horizon: HorizonFit,
    pub runs: Vec<InstabilityRun>,
    pub verdict: bool,
}

/// Lipschitz-failure experiment: data `ε·η₀` with I_m(η₀) = 1, so `δ = ε`.
#[allow(clippy::too_many_arguments)]
pub fn run_nonlinear_instability(
    shape: &BasisCoefficients,
    eps_list: &[f64],
    k_lip: f64,
    m: u32,
    k: usize,
    dt: f64,
    lambda: f64,
    horizon: HorizonFit,
) -> Result<InstabilityReport> {
    let shape = shape.resized(k);
    let u0 = shape.norm();
    if u0 == 0.0 {
        return Err(Error::Precondition("u₀⁺ = 0".into()));
    }
    let lp = lplus_energy_derivative(&shape);
    let s = lambda.sqrt();
    // 0 ≤ ⟨L₁⁺u₀⁺, u₀⁺⟩ ≤ √λ‖u₀⁺‖², with ⟨L₁⁺u, u⟩ = ⟨L⁺η, η⟩_{ℋ₂}
    if !(lp >= 0.0 && lp <= s * u0 * u0 * (1.0 + 1e-12)) {
        return Err(Error::Precondition(format!(
            "⟨L⁺η₀, η₀⟩/‖η₀‖² = {} outside [0, √λ = {s}]",
            lp / (u0 * u0)
        )));
    }
    let zero = BasisCoefficients::zeros(2, k);
    let norm_m = i_m(&shape, &zero, m);
    let unit = shape.scaled(1.0 / norm_m);
    let sys = Galerkin::new(k, 0.0, false)?;
    let mut runs = Vec::new();
    for &eps in eps_list {
        let cp = unit.scaled(eps);
        let i0 = eps;
        let un = cp.norm();
        let t_k = (4.0 * k_lip * i0 / un).ln() / s;
        let t0 = existence_horizon(&HorizonParams { c1: horizon.c1, c2: horizon.c2, i_m0: i0 })?;
        let t_stop = t0.min(4.0 * t_k);
        let mut sup: f64 = 0.0;
        let mut t_exceed = None;
        let run = run_galerkin(&sys, &cp.c, &zero.c, t_stop, dt, |t, p, _| {
            let r = norm(p) / i0;
            sup = sup.max(r);
            if r > k_lip && t_exceed.is_none() {
                t_exceed = Some(t);
            }
            t_exceed.is_some()
        });
        let consistent = t_exceed.is_some_and(|te| te >= 0.5 * t_k && te <= 2.0 * t_k);
        runs.push(InstabilityRun {
            eps,
            i_m0: i0,
            u0_norm: un,
            t_k,
            t0,
            t_exceed,
            sup_ratio: sup,
            consistent,
            breakdown: run.breakdown,
        });
    }
    let verdict = runs.iter().all(|r| r.t_exceed.is_some() && r.consistent);
    Ok(InstabilityReport { k_lip, m, lambda, lp_over_norm: lp / (u0 * u0), horizon, runs, verdict })
}

/// Basis-index support of random data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Any,
    Even,
    Odd,
}

/// Random coefficients on indices ≤ `band`, decaying like `k^{-2}`.
pub fn random_smooth<R: Rng>(rng: &mut R, k: usize, band: usize, parity: Parity) -> BasisCoefficients {
    let mut b = BasisCoefficients::zeros(2, k);
    for l in 1..=band.min(k) {
        let keep = match parity {
            Parity::Any => true,
            Parity::Even => l % 2 == 0,
            Parity::Odd => l % 2 == 1,
        };
        if keep {
            b.c[l - 1] = rng.gen_range(-1.0..1.0) / (l * l) as f64;
        }
    }
    b
}

/// Largest dyadic amplitude `2^{-j}` for which the stability verdict holds for
/// all seeds (random even-mode η⁺, random η⁻), scanning `j = j_min..=j_max`.
pub fn bootstrap_threshold(
    k: usize,
    seeds: &[u64],
    j_range: (i32, i32),
    t_end: f64,
    dt: f64,
    margin: f64,
) -> Result<Option<f64>> {
    for j in j_range.0..=j_range.1 {
        let amp = 2f64.powi(-j);
        let mut all = true;
        for &seed in seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_smooth(&mut rng, k, 8, Parity::Even);
            let q = random_smooth(&mut rng, k, 8, Parity::Any);
            let n = p.norm().hypot(q.norm());
            let r = run_nonlinear_stability(&p.scaled(amp / n), &q.scaled(amp / n), k, t_end, dt, margin)?;
            if r.verdict != Some(true) {
                all = false;
                break;
            }
        }
        if all {
            return Ok(Some(amp));
        }
    }
    Ok(None)
}

/// Linear run in physical Fourier space (spectral operators), returning the
/// ℋ₂ norms at the sampling instants — the cross-check for the banded ODE.
///
/// The operators are applied on a field padded by two modes, so nothing is
/// lost to the sine cutoff, and the result is projected ℋ₂-orthogonally onto
/// the `n_max − 2` retained basis elements. A bare sine cutoff would leave the
/// weighted span and make the ℋ₂ norm meaningless once energy reaches the top
/// modes.
pub fn linear_trace_spectral(cp0: &BasisCoefficients, cm0: &BasisCoefficients, n_max: usize, t_end: f64, dt: f64) -> Result<EnergyTrace> {
    let ep = from_basis_on(cp0, n_max);
    let em = from_basis_on(cm0, n_max);
    let mut st = PerturbationState::new(ep, em)?;
    let steps = step_count(t_end, dt);
    let h = t_end / steps.max(1) as f64;
    let every = ((SAMPLE_INTERVAL / h).round() as usize).max(1);
    let h2 = |f: &OddField| to_basis(f, 2).coeffs.norm();
    let mut tr = EnergyTrace::default();
    tr.push(0.0, h2(&st.eta_plus), h2(&st.eta_minus));
    let n = n_max;
    for i in 1..=steps {
        let mut y = st.eta_plus.sines().to_vec();
        y.extend_from_slice(st.eta_minus.sines());
        let y1 = rk4_step(&y, h, |y| {
            let pad = |v: &[f64]| {
                let mut v = v.to_vec();
                v.resize(n + 2, 0.0);
                OddField::from_sines(v)
            };
            let s = PerturbationState { eta_plus: pad(&y[..n]), eta_minus: pad(&y[n..]), time: 0.0 };
            let (a, b) = rhs_perturbation(&s, 0.0, true);
            let project = |f: FourierField| {
                let c = to_basis(&OddField::from_sines(f.sines().to_vec()), 2).coeffs.resized(n - 2);
                from_basis_on(&c, n).sines().to_vec()
            };
            let mut out = project(a);
            out.extend(project(b));
            out
        });
        st.eta_plus = OddField::from_sines(y1[..n].to_vec());
        st.eta_minus = OddField::from_sines(y1[n..].to_vec());
        if i % every == 0 || i == steps {
            tr.push(i as f64 * h, h2(&st.eta_plus), h2(&st.eta_minus));
        }
    }
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_examples() {
        let p = EnvelopeParams { lambda: 0.14, ip0: 1.0, lp0: 11.0 / 18.0 };
        assert!((envelope_e(0.0, &p).unwrap() - 1.0).abs() < 1e-15);
        let z = EnvelopeParams { lambda: 0.14, ip0: 2.0, lp0: 0.0 };
        let t = 0.7;
        assert!((envelope_e(t, &z).unwrap() - 2.0 * (2.0 * 0.14f64.sqrt() * t).cosh()).abs() < 1e-13);
        assert!(envelope_e(1.0, &EnvelopeParams { lambda: 0.14, ip0: 0.0, lp0: 0.0 }).is_err());
        assert!(envelope_e(1.0, &EnvelopeParams { lambda: 0.14, ip0: 1.0, lp0: -1.0 }).is_err());
    }

    #[test]
    fn horizon_examples() {
        let t = existence_horizon(&HorizonParams { c1: 1.0, c2: 1.0, i_m0: 1.0 }).unwrap();
        assert!((t - 1.5f64.ln()).abs() < 1e-15);
        let a = existence_horizon(&HorizonParams { c1: 1.0, c2: 1.0, i_m0: 0.5 }).unwrap();
        assert!(a > t);
        assert!(existence_horizon(&HorizonParams { c1: 0.0, c2: 1.0, i_m0: 1.0 }).is_err());
        let tiny = existence_horizon(&HorizonParams { c1: 1.0, c2: 1.0, i_m0: 1e-12 }).unwrap();
        assert!(tiny > 25.0);
    }

    #[test]
    fn rate_fit_examples() {
        let ts: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = ts.iter().map(|t| (-0.5 * t).exp()).collect();
        let (r, r2) = fit_exponential_rate(&ts, &ys, (0.0, 10.0)).unwrap();
        assert!((r + 0.5).abs() < 1e-9 && (r2 - 1.0).abs() < 1e-9);
        let c = vec![3.0; ts.len()];
        assert!(fit_exponential_rate(&ts, &c, (0.0, 10.0)).unwrap().0.abs() < 1e-15);
        let mut bad = ys.clone();
        bad[5] = 0.0;
        assert!(fit_exponential_rate(&ts, &bad, (0.0, 10.0)).is_err());
    }

    #[test]
    fn sobolev_examples() {
        let e1 = BasisCoefficients::unit(2, 4, 1);
        assert!((sobolev_norm_u(&e1, 1) - 5f64.sqrt()).abs() < 1e-15);
        let c = BasisCoefficients { kappa: 2, c: vec![0.3, -0.2, 0.1] };
        assert!((sobolev_norm_u(&c, 0) - c.norm()).abs() < 1e-15);
        assert!((sobolev_norm_u(&c.scaled(3.0), 2) - 3.0 * sobolev_norm_u(&c, 2)).abs() < 1e-14);
    }

    #[test]
    fn linear_instability_precondition() {
        let z = BasisCoefficients::zeros(2, 8);
        assert!(run_linear_instability(&z, &z, 1.0, 1e-2, (0.12, 0.47), 1e-6).is_err());
        let e2 = BasisCoefficients::unit(2, 8, 2);
        assert!(run_linear_instability(&e2, &z, 1.0, 1e-2, (0.12, 0.47), 1e-6).is_err());
    }

    #[test]
    fn zero_decay_trace() {
        let z = BasisCoefficients::zeros(2, 8);
        let r = run_linear_decay(&z, &z, 1.0, 1e-2, 1e-9).unwrap();
        assert!(r.trace.i0.iter().all(|&x| x == 0.0));
        assert!(r.verdict);
    }

    #[test]
    fn zero_data_is_stable() {
        let z = BasisCoefficients::zeros(2, 8);
        let r = run_nonlinear_stability(&z, &z, 8, 0.5, 1e-2, 2.0).unwrap();
        assert_eq!(r.verdict, Some(true));
    }
}
