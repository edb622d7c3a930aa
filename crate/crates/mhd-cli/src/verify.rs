//! Verification suites: the acceptance experiments at default parameters,
//! one line per check.

use mhd_spectral::analysis::{lambda_bounds, TAIL_LIMIT};
use mhd_spectral::basis::{basis_function, to_basis, tridiagonal_l, BasisCoefficients, Sign};
use mhd_spectral::exact::{self, Q};
use mhd_spectral::experiments::{
    estimate_horizon_constants, random_smooth, run_linear_decay, run_linear_instability,
    run_nonlinear_instability, run_nonlinear_stability, two_mode_data, two_mode_default_coefficient, Parity,
};
use mhd_spectral::fourier::OddField;
use mhd_spectral::perturbation::{op_l_minus, op_l_plus};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::output::OutDir;
use crate::{Common, Failure, Suite};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, r: Result<(bool, String), mhd_spectral::Error>) -> Check {
    match r {
        Ok((pass, detail)) => Check { name, pass, detail },
        Err(e) => Check { name, pass: false, detail: e.to_string() },
    }
}

/// Run parameters after applying `--nmax`, `--dt`, `--tend`.
struct Params {
    n_max: usize,
    dt: f64,
    t_end: f64,
}

impl Params {
    fn new(common: &Common, n_max: usize, dt: f64, t_end: f64) -> Result<Self, Failure> {
        let p = Params {
            n_max: common.nmax.unwrap_or(n_max),
            dt: common.dt.unwrap_or(dt),
            t_end: common.tend.unwrap_or(t_end),
        };
        if p.n_max < 6 || !(p.dt > 0.0 && p.dt.is_finite()) || !(p.t_end > 0.0 && p.t_end.is_finite()) {
            return Err(Failure::Config("verify needs nmax ≥ 6, dt > 0 and tend > 0".into()));
        }
        Ok(p)
    }

    fn k(&self) -> usize {
        self.n_max - 2
    }
}

fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn operators(common: &Common) -> Result<Vec<Check>, Failure> {
    let p = Params::new(common, 128, 1e-3, 1.0)?;
    let mut out = Vec::new();
    out.push(check("exact-anchors", {
        let gap = exact::d_plus(1) - exact::d_plus(3);
        let e1 = exact::eps_plus_def(1);
        Ok((
            exact::d_minus(2) == Q::from_integer(0) && gap == Q::new(11, 18) && e1 == Q::new(62, 405),
            format!("d⁻(2) = {}, d⁺(1) − d⁺(3) = {gap}, ε₁ = {e1}", exact::d_minus(2)),
        ))
    }));
    out.push(check("diagonal-signs", {
        let (mut wm, mut wp) = (Q::new(-1000, 1), Q::new(-1000, 1));
        for k in 2..=10_000u64 {
            wm = wm.max(exact::d_minus(k) - exact::d_minus(k + 2));
            wp = wp.max(exact::d_plus(k) - exact::d_plus(k + 2));
        }
        Ok((
            wm < Q::new(-1, 2) && wp <= Q::new(-3, 8),
            format!("max L⁻ diagonal {:.9} < −1/2, max L⁺ diagonal {:.9} ≤ −3/8 (2 ≤ k ≤ 10⁴)", to_f64(wm), to_f64(wp)),
        ))
    }));
    out.push(check("eps-closed-form", {
        let bad = (1..=1000u64).filter(|&k| exact::eps_plus_def(k) != exact::eps_plus_closed(k)).count();
        Ok((bad == 0, format!("{bad} mismatches for k ≤ 1000")))
    }));
    out.push(check(
        "lambda-bounds",
        lambda_bounds(10_000).map(|b| {
            (
                b.inside_paper_interval(),
                format!("λ_inf = {:.6}, λ_sup = {:.6}, tail {TAIL_LIMIT} inside (1/50, 3/5)", b.lambda_inf, b.lambda_sup),
            )
        }),
    ));
    out.push(check("tridiagonal-columns", {
        let kk = p.k();
        let cols = (kk / 2).max(1);
        (|| {
            let plus = tridiagonal_l(Sign::Plus, 2, kk)?;
            let minus = tridiagonal_l(Sign::Minus, 2, kk)?;
            let mut worst: f64 = 0.0;
            for l in 1..=cols {
                let e = basis_function(2, l, p.n_max)?;
                for (img, op) in [(op_l_plus(e.field()), &plus), (op_l_minus(e.field(), 0.0), &minus)] {
                    let ex = to_basis(&OddField::from_sines(img.sines().to_vec()), 2);
                    let col = op.column(l);
                    worst = ex.coeffs.c.iter().zip(&col).fold(worst.max(ex.residual), |m, (a, b)| m.max((a - b).abs()));
                }
            }
            Ok((worst <= 1e-11, format!("max deviation {worst:.3e} over l ≤ {cols} at n_max = {} (tol 1e-11)", p.n_max)))
        })()
    }));
    Ok(out)
}

fn linear_instability(common: &Common) -> Result<Vec<Check>, Failure> {
    let p = Params::new(common, 128, 1e-3, 5.0)?;
    let e = BasisCoefficients::unit(2, p.k(), 1);
    let r = lambda_bounds(10_000).and_then(|b| {
        let r = run_linear_instability(&e, &e, p.t_end, p.dt, (b.lambda_inf, b.lambda_sup), 1e-6)?;
        let floor = b.lambda_inf.sqrt() - 1e-3;
        Ok((
            r.verdict && r.fitted_rate >= floor,
            format!(
                "lower margin {:.4e}, upper margin {:.4e}, fitted rate {:.5} (floor {:.5})",
                r.lower_margin, r.upper_margin, r.fitted_rate, floor
            ),
        ))
    });
    Ok(vec![check("growth-envelope", r)])
}

fn linear_decay(common: &Common) -> Result<Vec<Check>, Failure> {
    let p = Params::new(common, 64, 1e-3, 10.0)?;
    let k = p.k();
    let e1 = BasisCoefficients::unit(2, k, 1);
    let zero = BasisCoefficients::zeros(2, k);
    let single = run_linear_decay(&zero, &e1, p.t_end, p.dt, 1e-9)
        .map(|r| (r.verdict, format!("η⁻ = e₂,₁: excess over e^(−t/2) {:.3e}", r.excess_minus)));
    let random = (|| {
        let (mut wm, mut wp, mut ok) = (f64::NEG_INFINITY, f64::NEG_INFINITY, true);
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(800 + seed);
            let cp = random_smooth(&mut rng, k, 24, Parity::Even);
            let cm = random_smooth(&mut rng, k, 24, Parity::Any);
            let r = run_linear_decay(&cp, &cm, p.t_end, p.dt, 1e-9)?;
            wm = wm.max(r.excess_minus);
            wp = wp.max(r.excess_plus);
            ok &= r.verdict;
        }
        Ok((ok, format!("20 random data: excess η⁻ {wm:.3e}, even η⁺ {wp:.3e} (slack 1e-9)")))
    })();
    Ok(vec![check("decay-single-mode", single), check("decay-random", random)])
}

fn nonlinear_stability(common: &Common) -> Result<Vec<Check>, Failure> {
    let p = Params::new(common, 128, 1e-3, 20.0)?;
    let k = p.k();
    let cp = BasisCoefficients::unit(2, k, 2).scaled(1e-3);
    let cm = BasisCoefficients::unit(2, k, 1).scaled(1e-3);
    let r = run_nonlinear_stability(&cp, &cm, k, p.t_end, p.dt, 2.0).map(|r| {
        (
            r.verdict == Some(true),
            format!(
                "max I₀(t)/(e^(−t/2) I₀(0)) = {:.4} (margin 2), first above at {:?}, late rate {:.4}",
                r.max_ratio,
                r.first_violation,
                r.fitted_rate.unwrap_or(f64::NAN)
            ),
        )
    });
    Ok(vec![check("bootstrap-decay", r)])
}

fn nonlinear_instability(common: &Common) -> Result<Vec<Check>, Failure> {
    let p = Params::new(common, 128, 1e-3, 1.0)?; // the horizon T₀ sets the run length
    let (k, m, k_lip, mode) = (p.k(), 4, 10.0, 2);
    let r = (|| {
        let lam = lambda_bounds(10_000)?.lambda_inf;
        let horizon = estimate_horizon_constants(k, m, &[1e-5, 1e-3, 1e-2], &[1, 2, 3], 2.0, p.dt)?;
        let shape = two_mode_data(k, mode, two_mode_default_coefficient(mode, lam));
        let r = run_nonlinear_instability(&shape, &[1e-2, 1e-3, 1e-4], k_lip, m, k, p.dt, lam, horizon)?;
        let runs: Vec<String> = r
            .runs
            .iter()
            .map(|x| {
                format!(
                    "ε={:.0e}: sup={:.2} T₀={:.2} t_K={:.2} t_exc={}",
                    x.eps,
                    x.sup_ratio,
                    x.t0,
                    x.t_k,
                    x.t_exceed.map_or("none".into(), |t| format!("{t:.2}"))
                )
            })
            .collect();
        Ok((r.verdict, format!("C₁ = {:.3}, C₂ = {:.2e}; {}", horizon.c1, horizon.c2, runs.join("; "))))
    })();
    Ok(vec![check("lipschitz-failure", r)])
}

pub fn run_suite(suite: Suite, common: &Common) -> Result<Vec<Check>, Failure> {
    match suite {
        Suite::Operators => operators(common),
        Suite::LinearInstability => linear_instability(common),
        Suite::LinearDecay => linear_decay(common),
        Suite::NonlinearStability => nonlinear_stability(common),
        Suite::NonlinearInstability => nonlinear_instability(common),
    }
}

pub fn cmd_verify(suite: Suite, common: &Common, out: Option<&OutDir>) -> Result<(), Failure> {
    let checks = run_suite(suite, common)?;
    for c in &checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let all = checks.iter().all(|c| c.pass);
    if let Some(out) = out {
        let items: Vec<_> =
            checks.iter().map(|c| json!({ "name": c.name, "pass": c.pass, "detail": c.detail })).collect();
        out.write_json("verdict.json", &json!({ "verdict": all, "checks": items }))?;
    }
    if all {
        Ok(())
    } else {
        let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
        Err(Failure::Verdict(failed.join(", ")))
    }
}
