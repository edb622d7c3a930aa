mod common;

use common::{coeffs, odd_field};
use mhd_spectral::fourier::{FourierField, OddField};
use mhd_spectral::model::{integrate, rhs_mhd, rhs_osw, step_rk4, IntegrateOptions, MhdState, ModelParams};
use proptest::prelude::*;

fn excited(n: usize) -> FourierField {
    FourierField::sin_mode(n, 2, -1.0)
}

fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = x.iter().zip(y).map(|(a, b)| (a.ln(), b.ln())).unzip();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

proptest! {
    #[test]
    fn excited_state_is_stationary_for_any_split(p in -2.0f64..3.0) {
        let params = ModelParams::new(1.0, p, 1.0 - p);
        let (a, b) = rhs_mhd(&MhdState::diagonal(excited(12)), &params);
        prop_assert!(a.coeff_norm_sq().sqrt() < 1e-12 && b.coeff_norm_sq().sqrt() < 1e-12);
    }

    #[test]
    fn diagonal_data_reduce_to_osw(w in odd_field(20), a in -2.0f64..2.0, p in -2.0f64..3.0) {
        let params = ModelParams::new(a, p, 1.0 - p);
        let (rp, rm) = rhs_mhd(&MhdState::diagonal(w.field().clone()), &params);
        let osw = rhs_osw(w.field(), a);
        prop_assert!(rp.max_abs_diff(&osw) < 1e-12 && rm.max_abs_diff(&osw) < 1e-12);
    }

    #[test]
    fn rhs_of_odd_data_is_odd_and_mean_free(wp in coeffs(10), wm in coeffs(10)) {
        let s = MhdState::new(FourierField::from_sines(wp), FourierField::from_sines(wm)).unwrap();
        let (a, b) = rhs_mhd(&s, &ModelParams::MHD_DVZ);
        prop_assert!(a.max_abs_cos() < 1e-13 && b.max_abs_cos() < 1e-13);
    }

    #[test]
    fn diagonal_mean_is_conserved(s in coeffs(8), c in coeffs(9), a in -1.0f64..1.0) {
        let mut c = c;
        c[0] = 0.0;
        let w = FourierField::new(s, c).unwrap();
        let (r, _) = rhs_mhd(&MhdState::diagonal(w), &ModelParams::osw(a));
        prop_assert!(r.mean().abs() < 1e-13);
    }
}

#[test]
fn odd_data_stay_odd_and_mean_stays_zero() {
    let w = OddField::from_sines(vec![0.3, -0.2, 0.1, 0.05, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let m = OddField::from_sines(vec![0.1, 0.0, -0.1, 0.02, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let s = MhdState::new(w.into_field(), m.into_field()).unwrap();
    let opts = IntegrateOptions { t_end: 1.0, dt: 1e-3, sample_interval: 0.1, halving_threshold: None };
    let mut worst: f64 = 0.0;
    let run = integrate(&s, &ModelParams::MHD_DVZ, &opts, |st| {
        worst = worst.max(st.omega_plus.max_abs_cos()).max(st.omega_minus.max_abs_cos());
    });
    assert!(run.breakdown.is_none());
    assert!(worst < 1e-10, "cosine leakage {worst}");
    assert!(run.state.omega_plus.mean().abs() < 1e-12);
}

#[test]
fn steady_state_trace_is_flat() {
    let s = MhdState::diagonal(excited(16));
    let opts = IntegrateOptions { t_end: 2.0, dt: 1e-2, sample_interval: 0.5, halving_threshold: None };
    let run = integrate(&s, &ModelParams::DE_GREGORIO, &opts, |_| {});
    let l2 = run.trace[0].l2_plus;
    assert!(run.trace.len() >= 5);
    assert!(run.trace.iter().all(|r| (r.l2_plus - l2).abs() < 1e-12 && (r.l2_minus - l2).abs() < 1e-12));
}

#[test]
fn step_doubling_error_is_fifth_order() {
    // ‖one step − two half steps‖ = O(dt⁵) for a smooth RHS.
    let w = FourierField::from_sines(vec![0.5, -0.3, 0.2, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let m = FourierField::from_sines(vec![0.2, 0.1, 0.0, -0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let s = MhdState::new(w, m).unwrap();
    let dts = [0.08, 0.04, 0.02, 0.01];
    let errs: Vec<f64> = dts
        .iter()
        .map(|&dt| {
            let one = step_rk4(&s, &ModelParams::MHD_DVZ, dt).unwrap();
            let half = step_rk4(&s, &ModelParams::MHD_DVZ, dt / 2.0).unwrap();
            let two = step_rk4(&half, &ModelParams::MHD_DVZ, dt / 2.0).unwrap();
            one.omega_plus.max_abs_diff(&two.omega_plus).max(one.omega_minus.max_abs_diff(&two.omega_minus))
        })
        .collect();
    let slope = log_log_slope(&dts, &errs);
    assert!(slope >= 4.5, "slope {slope}, errors {errs:?}");
}

#[test]
fn halving_rule_changes_nothing_in_the_smooth_regime() {
    let s = MhdState::diagonal(FourierField::sin_mode(16, 1, 0.2));
    let base = IntegrateOptions { t_end: 0.5, dt: 1e-3, sample_interval: 0.1, halving_threshold: None };
    let a = integrate(&s, &ModelParams::DE_GREGORIO, &base, |_| {});
    let halved = IntegrateOptions { halving_threshold: Some(0.0), ..base };
    let b = integrate(&s, &ModelParams::DE_GREGORIO, &halved, |_| {});
    assert!(a.state.omega_plus.max_abs_diff(&b.state.omega_plus) < 1e-11);
    assert!((a.state.time - b.state.time).abs() < 1e-12);
}

#[test]
fn mismatched_truncations_are_rejected() {
    assert!(MhdState::new(FourierField::zeros(3), FourierField::zeros(4)).is_err());
    assert!(step_rk4(&MhdState::diagonal(excited(4)), &ModelParams::CLM, f64::NAN).is_err());
}
