//! Quadratic-form analysis of `L⁺` in the basis `e_{2,k}`.
//!
//! Along `ċ = L⁺c`, `d/dt ‖c‖² = 2 Σ D_k c_k²` with `D_k = d_k − d_{k+2}`, and
//! the second derivative splits into the 2×2 forms
//! `Q_k = a_k c_k² + a_{k+2} c_{k+2}² + 2 ε_k c_k c_{k+2}` whose matrices
//! `A_k = [[a_k, ε_k], [ε_k, a_{k+2}]]` are uniformly positive definite.

use serde::Serialize;

use crate::basis::{d_kappa_gap_closed, d_plus, to_basis, BasisCoefficients, TridiagonalOperator};
use crate::error::{Error, Result};
use crate::fourier::OddField;
use crate::perturbation::op_q;
use crate::basis::{basis_function, from_basis_on};

pub const LAMBDA_LOWER: f64 = 1.0 / 50.0;
pub const LAMBDA_UPPER: f64 = 3.0 / 5.0;
pub const TAIL_LIMIT: f64 = 0.25;

/// `D_k = d⁺_k − d⁺_{k+2}`, from the cancellation-free closed form.
pub fn diag_plus(k: usize) -> f64 {
    d_kappa_gap_closed(2, k)
}

/// `a_k = D_k²`.
pub fn a_plus(k: usize) -> f64 {
    diag_plus(k).powi(2)
}

/// `ε_k` from its definition `d_k d_{k+2} + d_{k+2} d_{k+4} − 2 d_{k+2}²`.
pub fn eps_plus_def(k: usize) -> f64 {
    let (a, b, c) = (d_plus(k), d_plus(k + 2), d_plus(k + 4));
    a * b + b * c - 2.0 * b * b
}

/// `ε_k = (−2k³ + 32k + 32)/((k+2)⁴(k+4))`.
pub fn eps_plus(k: usize) -> f64 {
    let k = k as f64;
    (-2.0 * k.powi(3) + 32.0 * k + 32.0) / ((k + 2.0).powi(4) * (k + 4.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadFormMatrix {
    pub k: usize,
    pub a_k: f64,
    pub a_k2: f64,
    pub eps_k: f64,
}

impl QuadFormMatrix {
    pub fn new(k: usize) -> Self {
        QuadFormMatrix { k, a_k: a_plus(k), a_k2: a_plus(k + 2), eps_k: eps_plus(k) }
    }

    /// `(λ¹, λ²)`, smaller first.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let tr = self.a_k + self.a_k2;
        let disc = ((self.a_k - self.a_k2).powi(2) + 4.0 * self.eps_k * self.eps_k).sqrt();
        let big = (tr + disc) / 2.0;
        // the product form avoids cancelling tr − disc
        (self.det() / big, big)
    }

    pub fn det(&self) -> f64 {
        self.a_k * self.a_k2 - self.eps_k * self.eps_k
    }

    pub fn trace(&self) -> f64 {
        self.a_k + self.a_k2
    }

    /// `Q_k(x, y) = a_k x² + a_{k+2} y² + 2 ε_k x y`.
    pub fn form(&self, x: f64, y: f64) -> f64 {
        self.a_k * x * x + self.a_k2 * y * y + 2.0 * self.eps_k * x * y
    }
}

pub fn eigen_ak(k: usize) -> (f64, f64) {
    QuadFormMatrix::new(k).eigenvalues()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralBounds {
    pub lambda_inf: f64,
    pub lambda_sup: f64,
    pub argmin_k: usize,
    pub argmax_k: usize,
    pub k_range: usize,
    pub tail_limit: f64,
    /// From this index on, `a_k`, `λ_k¹`, `λ_k²` approach the tail limit monotonically.
    pub monotone_from: usize,
}

impl SpectralBounds {
    pub fn inside_paper_interval(&self) -> bool {
        LAMBDA_LOWER < self.lambda_inf
            && self.lambda_sup < LAMBDA_UPPER
            && LAMBDA_LOWER < self.tail_limit
            && self.tail_limit < LAMBDA_UPPER
    }
}

/// Inf/sup of `{a_k, λ_k¹, λ_k²}` over `1 ≤ k ≤ k_max`.
pub fn lambda_bounds(k_max: usize) -> Result<SpectralBounds> {
    if k_max < 4 {
        return Err(Error::InvalidIndex(format!("k_max must be at least 4, got {k_max}")));
    }
    let mut lo = (f64::INFINITY, 0);
    let mut hi = (f64::NEG_INFINITY, 0);
    let mut last_bad = 1;
    let mut prev: Option<[f64; 3]> = None;
    for k in 1..=k_max {
        let m = QuadFormMatrix::new(k);
        let (l1, l2) = m.eigenvalues();
        let vals = [m.a_k, l1, l2];
        for v in vals {
            if v < lo.0 {
                lo = (v, k);
            }
            if v > hi.0 {
                hi = (v, k);
            }
        }
        let dist = vals.map(|v| (v - TAIL_LIMIT).abs());
        if let Some(p) = prev {
            if dist.iter().zip(&p).any(|(d, q)| d > q) {
                last_bad = k;
            }
        }
        prev = Some(dist);
    }
    let b = SpectralBounds {
        lambda_inf: lo.0,
        lambda_sup: hi.0,
        argmin_k: lo.1,
        argmax_k: hi.1,
        k_range: k_max,
        tail_limit: TAIL_LIMIT,
        monotone_from: last_bad,
    };
    if !b.inside_paper_interval() {
        return Err(Error::BoundViolation(format!(
            "λ_inf = {}, λ_sup = {} not inside (1/50, 3/5)",
            b.lambda_inf, b.lambda_sup
        )));
    }
    Ok(b)
}

/// `⟨L⁺η, η⟩_{ℋ₂} = Σ D_k c_k²`.
pub fn lplus_energy_derivative(c: &BasisCoefficients) -> f64 {
    c.c.iter().enumerate().map(|(i, x)| diag_plus(i + 1) * x * x).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartialSums {
    pub n: usize,
    /// `S_n = 2 Σ_{k≤n} D_k c_k ċ_k`, straight from the supplied derivative.
    pub s_n: f64,
    /// `Q_1 … Q_{n−2}`.
    pub q: Vec<f64>,
    /// `a_1c_1² + a_2c_2² + a_{n−1}c_{n−1}² + a_n c_n²`.
    pub boundary: f64,
    /// `R_{n−1} + R_n` with `R_k = 2 d_{k+2} D_k c_k c_{k+2}`.
    pub r: f64,
}

impl PartialSums {
    /// The splitting `boundary + Σ Q_k + R`, equal to `s_n` on ODE trajectories.
    pub fn reassembled(&self) -> f64 {
        self.boundary + self.q.iter().sum::<f64>() + self.r
    }

    pub fn without_remainders(&self) -> f64 {
        self.s_n - self.r
    }
}

/// Evaluates both sides of the partial-sum splitting for `2 ≤ n ≤ K`.
pub fn partial_sum_diagnostics(c: &[f64], c_dot: &[f64], n: usize) -> Result<PartialSums> {
    let kk = c.len();
    if n < 2 || n > kk || c_dot.len() != kk {
        return Err(Error::InvalidIndex(format!("need 2 ≤ n ≤ K = {kk}, got n = {n}")));
    }
    let at = |k: usize| if k >= 1 && k <= kk { c[k - 1] } else { 0.0 };
    let s_n = 2.0 * (1..=n).map(|k| diag_plus(k) * c[k - 1] * c_dot[k - 1]).sum::<f64>();
    let q = (1..=n - 2).map(|k| QuadFormMatrix::new(k).form(at(k), at(k + 2))).collect();
    let mut boundary = a_plus(1) * at(1).powi(2) + a_plus(2) * at(2).powi(2);
    boundary += a_plus(n - 1) * at(n - 1).powi(2) + a_plus(n) * at(n).powi(2);
    let rk = |k: usize| 2.0 * d_plus(k + 2) * diag_plus(k) * at(k) * at(k + 2);
    Ok(PartialSums { n, s_n, q, boundary, r: rk(n - 1) + rk(n) })
}

/// `d²/dt² ‖c‖²` for `ċ = Mc`, i.e. `2(‖Mc‖² + c·M²c)` — no differencing.
pub fn energy_second_derivative(op: &TridiagonalOperator, c: &[f64]) -> f64 {
    let mc = op.apply(c);
    let mmc = op.apply(&mc);
    2.0 * (mc.iter().map(|x| x * x).sum::<f64>() + c.iter().zip(&mmc).map(|(a, b)| a * b).sum::<f64>())
}

/// `⟨Q e_{2,j}, e_{2,i}⟩` for `i, j ≤ K`, with the largest recurrence tail seen.
///
/// `Q` does not map the span into itself (`∂_θ(Q f)(0) = 2 Hf(0)` need not
/// vanish), so the tail is typically O(1); entries are the recurrence values.
pub fn q_operator_matrix(k: usize) -> (Vec<Vec<f64>>, f64) {
    let n = k + 4;
    let mut g = vec![vec![0.0; k]; k];
    let mut tail = 0.0f64;
    for j in 1..=k {
        let e = basis_function(2, j, n).expect("index in range");
        let qe = op_q(e.field());
        let ex = to_basis(&OddField::from_sines(qe.sines().to_vec()), 2);
        tail = tail.max(ex.residual);
        for i in 1..=k {
            g[i - 1][j - 1] = ex.coeffs.get(i);
        }
    }
    (g, tail)
}

/// Largest singular value by power iteration on `GᵀG`.
pub fn operator_norm(g: &[Vec<f64>], tol: f64) -> f64 {
    let k = g.len();
    if k == 0 {
        return 0.0;
    }
    let mut x = vec![1.0 / (k as f64).sqrt(); k];
    let mut sigma = 0.0;
    for _ in 0..10_000 {
        let y: Vec<f64> = (0..k).map(|i| (0..k).map(|j| g[i][j] * x[j]).sum()).collect();
        let z: Vec<f64> = (0..k).map(|j| (0..k).map(|i| g[i][j] * y[i]).sum()).collect();
        let nz = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nz == 0.0 {
            return 0.0;
        }
        let s = nz.sqrt();
        x = z.into_iter().map(|v| v / nz).collect();
        if (s - sigma).abs() <= tol * s.max(1.0) {
            return s;
        }
        sigma = s;
    }
    sigma
}

pub fn q_operator_norm(k: usize) -> f64 {
    operator_norm(&q_operator_matrix(k).0, 1e-10)
}

/// `δ = 1 − 4 C_Q q`.
pub fn q_decay_rate(q: f64, c_q: f64) -> f64 {
    1.0 - 4.0 * c_q * q
}

/// Coefficient array of `η` in the basis, as a plain vector helper.
pub fn coefficients_of(f: &OddField) -> BasisCoefficients {
    to_basis(f, 2).coeffs
}

/// Field of a coefficient vector on its natural truncation.
pub fn field_of(c: &[f64]) -> OddField {
    from_basis_on(&BasisCoefficients { kappa: 2, c: c.to_vec() }, c.len() + 2)
}
