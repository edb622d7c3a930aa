//! The two-component MHD vorticity model
//! `∂_t ω± = −a u∓ ∂_θ ω± + p ω± Hω∓ + q ω∓ Hω±`, `∂_θ u± = Hω±`,
//! its one-equation reductions, and RK4 time stepping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{velocity_from_vorticity, FourierField, Grid, OddField};
use crate::ode::{rk4_step, step_count};

/// Sup norm beyond which a trajectory is declared to have broken down.
pub const BLOWUP_LINF: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub a: f64,
    pub p: f64,
    pub q: f64,
}

impl ModelParams {
    pub const fn new(a: f64, p: f64, q: f64) -> Self {
        ModelParams { a, p, q }
    }

    /// (1, 3/2, −1/2)
    pub const MHD_DVZ: ModelParams = ModelParams::new(1.0, 1.5, -0.5);
    /// (2, 1, 1)
    pub const ARXIV: ModelParams = ModelParams::new(2.0, 1.0, 1.0);
    /// De Gregorio on diagonal data: a = 1, p + q = 1.
    pub const DE_GREGORIO: ModelParams = ModelParams::new(1.0, 1.0, 0.0);
    /// Constantin–Lax–Majda: no transport.
    pub const CLM: ModelParams = ModelParams::new(0.0, 1.0, 0.0);
    /// Córdoba–Córdoba–Fontelos: transport with the opposite sign.
    pub const CCF: ModelParams = ModelParams::new(-1.0, 1.0, 0.0);

    /// Okamoto–Sakajo–Wunsch family on diagonal data.
    pub const fn osw(a: f64) -> Self {
        ModelParams::new(a, 1.0, 0.0)
    }

    pub fn preset(name: &str) -> Option<Self> {
        Some(match name {
            "mhd-dvz" => Self::MHD_DVZ,
            "arxiv" => Self::ARXIV,
            "degregorio" | "de-gregorio" => Self::DE_GREGORIO,
            "clm" => Self::CLM,
            "ccf" => Self::CCF,
            _ => return None,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.p.is_finite() && self.q.is_finite()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MhdState {
    pub omega_plus: FourierField,
    pub omega_minus: FourierField,
    pub time: f64,
}

impl MhdState {
    pub fn new(omega_plus: FourierField, omega_minus: FourierField) -> Result<Self> {
        if omega_plus.n_max() != omega_minus.n_max() {
            return Err(Error::InvalidField(format!(
                "ω⁺ and ω⁻ truncations differ ({} vs {})",
                omega_plus.n_max(),
                omega_minus.n_max()
            )));
        }
        Ok(MhdState { omega_plus, omega_minus, time: 0.0 })
    }

    /// Both components equal to `ω`.
    pub fn diagonal(omega: FourierField) -> Self {
        MhdState { omega_minus: omega.clone(), omega_plus: omega, time: 0.0 }
    }

    pub fn n_max(&self) -> usize {
        self.omega_plus.n_max()
    }

    fn pack(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(4 * self.n_max() + 2);
        for f in [&self.omega_plus, &self.omega_minus] {
            y.extend_from_slice(f.sines());
            y.extend_from_slice(f.cosines());
        }
        y
    }

    fn unpack(n: usize, y: &[f64], time: f64) -> Self {
        let w = 2 * n + 1;
        let field = |o: usize| FourierField::new(y[o..o + n].to_vec(), y[o + n..o + w].to_vec());
        let bad = || FourierField::zeros(n).scaled(f64::NAN);
        MhdState {
            omega_plus: field(0).unwrap_or_else(|_| bad()),
            omega_minus: field(w).unwrap_or_else(|_| bad()),
            time,
        }
    }
}

/// `(Ω_κ, U_κ) = (−sin κθ, sin(κθ)/κ)`.
pub fn excited_state(kappa: usize, n_max: usize) -> Result<(OddField, OddField)> {
    if kappa < 1 {
        return Err(Error::InvalidIndex("κ must be at least 1".into()));
    }
    if kappa > n_max {
        return Err(Error::InvalidIndex(format!("κ = {kappa} exceeds n_max = {n_max}")));
    }
    let mut w = vec![0.0; n_max];
    let mut u = vec![0.0; n_max];
    w[kappa - 1] = -1.0;
    u[kappa - 1] = 1.0 / kappa as f64;
    Ok((OddField::from_sines(w), OddField::from_sines(u)))
}

/// Right-hand side of the two-component model.
pub fn rhs_mhd(s: &MhdState, params: &ModelParams) -> (FourierField, FourierField) {
    let n = s.n_max();
    let grid = Grid::new(Grid::dealiased_size(n, n));
    let wp = &s.omega_plus;
    let wm = &s.omega_minus;
    let up = grid.samples(&velocity_from_vorticity(wp));
    let um = grid.samples(&velocity_from_vorticity(wm));
    let dwp = grid.samples(&wp.derivative());
    let dwm = grid.samples(&wm.derivative());
    let hwp = grid.samples(&wp.hilbert());
    let hwm = grid.samples(&wm.hilbert());
    let wps = grid.samples(wp);
    let wms = grid.samples(wm);
    let ModelParams { a, p, q } = *params;
    let m = grid.len();
    let mut rp = vec![0.0; m];
    let mut rm = vec![0.0; m];
    for j in 0..m {
        rp[j] = -a * um[j] * dwp[j] + p * wps[j] * hwm[j] + q * wms[j] * hwp[j];
        rm[j] = -a * up[j] * dwm[j] + p * wms[j] * hwp[j] + q * wps[j] * hwm[j];
    }
    (grid.coefficients(&rp, n), grid.coefficients(&rm, n))
}

/// `−a u ∂_θ ω + ω Hω` (CLM at a = 0, De Gregorio at a = 1, CCF at a = −1).
pub fn rhs_osw(omega: &FourierField, a: f64) -> FourierField {
    let n = omega.n_max();
    let grid = Grid::new(Grid::dealiased_size(n, n));
    let u = grid.samples(&velocity_from_vorticity(omega));
    let dw = grid.samples(&omega.derivative());
    let hw = grid.samples(&omega.hilbert());
    let w = grid.samples(omega);
    let r: Vec<f64> = (0..grid.len()).map(|j| -a * u[j] * dw[j] + w[j] * hw[j]).collect();
    grid.coefficients(&r, n)
}

/// One classical RK4 step. Non-finite results are reported, never clamped.
pub fn step_rk4(s: &MhdState, params: &ModelParams, dt: f64) -> Result<MhdState> {
    if !(dt >= 0.0) {
        return Err(Error::Precondition(format!("dt must be non-negative, got {dt}")));
    }
    let n = s.n_max();
    let y = s.pack();
    let y1 = rk4_step(&y, dt, |y| {
        let st = MhdState::unpack(n, y, 0.0);
        let (dp, dm) = rhs_mhd(&st, params);
        MhdState { omega_plus: dp, omega_minus: dm, time: 0.0 }.pack()
    });
    if y1.iter().any(|x| !x.is_finite()) {
        return Err(Error::Breakdown { time: s.time, reason: "non-finite coefficients".into() });
    }
    Ok(MhdState::unpack(n, &y1, s.time + dt))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MhdTraceRow {
    pub time: f64,
    pub l2_plus: f64,
    pub l2_minus: f64,
    pub linf_h_plus: f64,
    pub linf_h_minus: f64,
}

impl MhdTraceRow {
    pub fn of(s: &MhdState) -> Self {
        MhdTraceRow {
            time: s.time,
            l2_plus: s.omega_plus.l2_norm(),
            l2_minus: s.omega_minus.l2_norm(),
            linf_h_plus: s.omega_plus.hilbert().linf_norm(),
            linf_h_minus: s.omega_minus.hilbert().linf_norm(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrateOptions {
    pub t_end: f64,
    pub dt: f64,
    pub sample_interval: f64,
    /// Take two half steps whenever `‖Hω⁺‖∞ + ‖Hω⁻‖∞` exceeds this.
    pub halving_threshold: Option<f64>,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions { t_end: 1.0, dt: 1e-3, sample_interval: 0.01, halving_threshold: None }
    }
}

#[derive(Clone, Debug)]
pub struct Integration {
    pub state: MhdState,
    pub trace: Vec<MhdTraceRow>,
    /// `(last valid time, reason)` if the run broke down.
    pub breakdown: Option<(f64, String)>,
}

/// Repeated [`step_rk4`], sampling the trace every `sample_interval`.
pub fn integrate<O>(s: &MhdState, params: &ModelParams, opts: &IntegrateOptions, mut observer: O) -> Integration
where
    O: FnMut(&MhdState),
{
    let steps = step_count(opts.t_end, opts.dt);
    let dt = if steps == 0 { 0.0 } else { opts.t_end / steps as f64 };
    let every = ((opts.sample_interval / dt.max(f64::MIN_POSITIVE)).round() as usize).max(1);
    let mut state = s.clone();
    let mut trace = vec![MhdTraceRow::of(&state)];
    observer(&state);
    for i in 1..=steps {
        let halve = opts.halving_threshold.is_some_and(|thr| {
            state.omega_plus.hilbert().linf_norm() + state.omega_minus.hilbert().linf_norm() > thr
        });
        let next = if halve {
            step_rk4(&state, params, 0.5 * dt).and_then(|s| step_rk4(&s, params, 0.5 * dt))
        } else {
            step_rk4(&state, params, dt)
        };
        let next = match next {
            Ok(n) => n,
            Err(e) => {
                let reason = e.to_string();
                return Integration { state, trace, breakdown: Some((s.time + (i - 1) as f64 * dt, reason)) };
            }
        };
        let sup = next.omega_plus.linf_norm().max(next.omega_minus.linf_norm());
        if sup > BLOWUP_LINF {
            let t = state.time;
            return Integration {
                state,
                trace,
                breakdown: Some((t, format!("sup norm {sup:.3e} exceeded {BLOWUP_LINF:.0e}"))),
            };
        }
        state = next;
        state.time = s.time + i as f64 * dt;
        if i % every == 0 || i == steps {
            trace.push(MhdTraceRow::of(&state));
            observer(&state);
        }
    }
    Integration { state, trace, breakdown: None }
}
