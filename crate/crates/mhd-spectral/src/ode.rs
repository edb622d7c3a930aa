//! Classical fourth-order Runge–Kutta on flat state vectors.

/// One RK4 step of `y' = f(y)`.
pub fn rk4_step<F>(y: &[f64], dt: f64, mut f: F) -> Vec<f64>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let n = y.len();
    let k1 = f(y);
    let mut tmp = vec![0.0; n];
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * dt * k1[i];
    }
    let k2 = f(&tmp);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * dt * k2[i];
    }
    let k3 = f(&tmp);
    for i in 0..n {
        tmp[i] = y[i] + dt * k3[i];
    }
    let k4 = f(&tmp);
    (0..n)
        .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Number of fixed steps covering `[0, t_end]` with step close to `dt`,
/// so that the final step lands exactly on `t_end`.
pub fn step_count(t_end: f64, dt: f64) -> usize {
    if t_end <= 0.0 {
        0
    } else {
        ((t_end / dt) - 1e-9).ceil().max(1.0) as usize
    }
}
