//! Truncated Fourier series on the torus `[-π, π]`.
//!
//! A [`FourierField`] stores `f(θ) = b₀ + Σ_{k=1}^{n} (a_k sin kθ + b_k cos kθ)`.
//! Hilbert transform, differentiation and velocity recovery act exactly on
//! coefficients; products go through zero-padded collocation (or direct
//! convolution for small truncations).

use std::cell::RefCell;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Products of fields with `n_max` at or below this threshold use the O(N²)
/// convolution; above it, padded FFT collocation.
pub const DIRECT_PRODUCT_MAX: usize = 64;

/// Real 2π-periodic function as truncated sine/cosine coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldRepr", into = "FieldRepr")]
pub struct FourierField {
    n_max: usize,
    /// `sin[k-1] = a_k`, k = 1..=n_max
    sin: Vec<f64>,
    /// `cos[k] = b_k`, k = 0..=n_max
    cos: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldRepr {
    n_max: usize,
    sin: Vec<f64>,
    cos: Vec<f64>,
}

impl TryFrom<FieldRepr> for FourierField {
    type Error = Error;
    fn try_from(r: FieldRepr) -> Result<Self> {
        if r.sin.len() != r.n_max || r.cos.len() != r.n_max + 1 {
            return Err(Error::InvalidField(format!(
                "n_max = {} needs {} sine and {} cosine coefficients, got {} and {}",
                r.n_max,
                r.n_max,
                r.n_max + 1,
                r.sin.len(),
                r.cos.len()
            )));
        }
        FourierField::new(r.sin, r.cos)
    }
}

impl From<FourierField> for FieldRepr {
    fn from(f: FourierField) -> Self {
        FieldRepr { n_max: f.n_max, sin: f.sin, cos: f.cos }
    }
}

impl FourierField {
    pub fn zeros(n_max: usize) -> Self {
        FourierField { n_max, sin: vec![0.0; n_max], cos: vec![0.0; n_max + 1] }
    }

    /// Builds a field from `a_1..a_n` and `b_0..b_n`.
    pub fn new(sin: Vec<f64>, cos: Vec<f64>) -> Result<Self> {
        let n_max = sin.len();
        if cos.len() != n_max + 1 {
            return Err(Error::InvalidField(format!(
                "expected {} cosine coefficients, got {}",
                n_max + 1,
                cos.len()
            )));
        }
        if sin.iter().chain(cos.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidField("non-finite coefficient".into()));
        }
        Ok(FourierField { n_max, sin, cos })
    }

    /// Pure sine series `Σ a_k sin kθ`.
    pub fn from_sines(sin: Vec<f64>) -> Self {
        let n_max = sin.len();
        FourierField { n_max, sin, cos: vec![0.0; n_max + 1] }
    }

    /// Pure cosine series `Σ b_k cos kθ` (b₀ first).
    pub fn from_cosines(cos: Vec<f64>) -> Self {
        assert!(!cos.is_empty(), "cosine series needs at least b_0");
        let n_max = cos.len() - 1;
        FourierField { n_max, sin: vec![0.0; n_max], cos }
    }

    pub fn constant(n_max: usize, value: f64) -> Self {
        let mut f = Self::zeros(n_max);
        f.cos[0] = value;
        f
    }

    /// `amp · sin kθ`.
    pub fn sin_mode(n_max: usize, k: usize, amp: f64) -> Self {
        assert!(k >= 1 && k <= n_max, "sine mode {k} outside 1..={n_max}");
        let mut f = Self::zeros(n_max);
        f.sin[k - 1] = amp;
        f
    }

    /// `amp · cos kθ`.
    pub fn cos_mode(n_max: usize, k: usize, amp: f64) -> Self {
        assert!(k <= n_max, "cosine mode {k} outside 0..={n_max}");
        let mut f = Self::zeros(n_max);
        f.cos[k] = amp;
        f
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Sine coefficient `a_k`; zero outside the truncation.
    pub fn sin_coeff(&self, k: usize) -> f64 {
        if k == 0 || k > self.n_max {
            0.0
        } else {
            self.sin[k - 1]
        }
    }

    /// Cosine coefficient `b_k` (`b_0` is the mean); zero outside the truncation.
    pub fn cos_coeff(&self, k: usize) -> f64 {
        self.cos.get(k).copied().unwrap_or(0.0)
    }

    pub fn sines(&self) -> &[f64] {
        &self.sin
    }

    pub fn cosines(&self) -> &[f64] {
        &self.cos
    }

    pub fn sines_mut(&mut self) -> &mut [f64] {
        &mut self.sin
    }

    pub fn cosines_mut(&mut self) -> &mut [f64] {
        &mut self.cos
    }

    /// Zero-pads or truncates to a new `n_max`.
    pub fn resized(&self, n_max: usize) -> Self {
        let mut out = Self::zeros(n_max);
        let n = n_max.min(self.n_max);
        out.sin[..n].copy_from_slice(&self.sin[..n]);
        out.cos[..=n].copy_from_slice(&self.cos[..=n]);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.sin.iter().chain(self.cos.iter()).all(|x| x.is_finite())
    }

    pub fn mean(&self) -> f64 {
        self.cos[0]
    }

    /// Largest cosine coefficient in magnitude (oddness defect).
    pub fn max_abs_cos(&self) -> f64 {
        self.cos.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `Σ (a_k² + b_k²)` over k ≥ 1, plus `b₀²`: the coefficient ℓ² norm squared.
    pub fn coeff_norm_sq(&self) -> f64 {
        self.sin.iter().chain(self.cos.iter()).map(|x| x * x).sum()
    }

    /// `∫_{-π}^{π} f² dθ`, by Parseval.
    pub fn l2_norm_sq(&self) -> f64 {
        let tail: f64 = self.sin.iter().chain(self.cos[1..].iter()).map(|x| x * x).sum();
        2.0 * PI * self.cos[0] * self.cos[0] + PI * tail
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// Sup norm estimated on a collocation grid four times finer than the
    /// truncation.
    pub fn linf_norm(&self) -> f64 {
        let grid = Grid::new((4 * self.n_max + 4).next_power_of_two());
        grid.samples(self).iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        FourierField {
            n_max: self.n_max,
            sin: self.sin.iter().map(|x| s * x).collect(),
            cos: self.cos.iter().map(|x| s * x).collect(),
        }
    }

    /// `self + s·other`, on the larger of the two truncations.
    pub fn axpy(&self, s: f64, other: &FourierField) -> Self {
        let n = self.n_max.max(other.n_max);
        let mut out = self.resized(n);
        for (k, x) in other.sin.iter().enumerate() {
            out.sin[k] += s * x;
        }
        for (k, x) in other.cos.iter().enumerate() {
            out.cos[k] += s * x;
        }
        out
    }

    /// Largest coefficient difference, comparing on the common padded truncation.
    pub fn max_abs_diff(&self, other: &FourierField) -> f64 {
        let d = self.axpy(-1.0, other);
        d.sin.iter().chain(d.cos.iter()).fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn value_at(&self, theta: f64) -> f64 {
        let mut v = self.cos[0];
        for k in 1..=self.n_max {
            let (s, c) = (k as f64 * theta).sin_cos();
            v += self.sin[k - 1] * s + self.cos[k] * c;
        }
        v
    }

    pub fn hilbert(&self) -> Self {
        hilbert(self)
    }

    pub fn derivative(&self) -> Self {
        differentiate(self)
    }

    pub fn velocity(&self) -> Self {
        velocity_from_vorticity(self)
    }
}

impl Add for &FourierField {
    type Output = FourierField;
    fn add(self, rhs: &FourierField) -> FourierField {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &FourierField {
    type Output = FourierField;
    fn sub(self, rhs: &FourierField) -> FourierField {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &FourierField {
    type Output = FourierField;
    fn mul(self, s: f64) -> FourierField {
        self.scaled(s)
    }
}

impl Neg for &FourierField {
    type Output = FourierField;
    fn neg(self) -> FourierField {
        self.scaled(-1.0)
    }
}

/// Odd field: a pure sine series. Oddness is checked on construction only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FourierField", into = "FourierField")]
pub struct OddField(FourierField);

impl OddField {
    pub fn from_sines(sin: Vec<f64>) -> Self {
        OddField(FourierField::from_sines(sin))
    }

    pub fn zeros(n_max: usize) -> Self {
        OddField(FourierField::zeros(n_max))
    }

    pub fn field(&self) -> &FourierField {
        &self.0
    }

    pub fn into_field(self) -> FourierField {
        self.0
    }

    pub fn n_max(&self) -> usize {
        self.0.n_max
    }

    pub fn sines(&self) -> &[f64] {
        &self.0.sin
    }
}

impl TryFrom<FourierField> for OddField {
    type Error = Error;
    fn try_from(f: FourierField) -> Result<Self> {
        if f.max_abs_cos() > 1e-12 {
            return Err(Error::InvalidField(format!(
                "field is not odd (cosine coefficient up to {:.3e})",
                f.max_abs_cos()
            )));
        }
        let n = f.n_max;
        Ok(OddField(FourierField { n_max: n, sin: f.sin, cos: vec![0.0; n + 1] }))
    }
}

impl From<OddField> for FourierField {
    fn from(f: OddField) -> Self {
        f.0
    }
}

impl AsRef<FourierField> for OddField {
    fn as_ref(&self) -> &FourierField {
        &self.0
    }
}

/// Fourier multiplier `−i·sgn(k)`: sin kθ ↦ −cos kθ, cos kθ ↦ sin kθ, 1 ↦ 0.
pub fn hilbert(f: &FourierField) -> FourierField {
    let n = f.n_max;
    let mut out = FourierField::zeros(n);
    for k in 1..=n {
        out.cos[k] = -f.sin[k - 1];
        out.sin[k - 1] = f.cos[k];
    }
    out
}

/// Term-by-term `∂_θ`.
pub fn differentiate(f: &FourierField) -> FourierField {
    let n = f.n_max;
    let mut out = FourierField::zeros(n);
    for k in 1..=n {
        let kf = k as f64;
        out.cos[k] = kf * f.sin[k - 1];
        out.sin[k - 1] = -kf * f.cos[k];
    }
    out
}

/// The velocity `v` with `∂_θ v = Hω` and `v(0) = 0`.
pub fn velocity_from_vorticity(omega: &FourierField) -> FourierField {
    let n = omega.n_max;
    let mut v = FourierField::zeros(n);
    let mut c0 = 0.0;
    for k in 1..=n {
        let kf = k as f64;
        v.sin[k - 1] = -omega.sin[k - 1] / kf;
        v.cos[k] = -omega.cos[k] / kf;
        c0 += omega.cos[k] / kf;
    }
    v.cos[0] = c0;
    v
}

/// Pointwise synthesis at arbitrary angles.
pub fn evaluate(f: &FourierField, thetas: &[f64]) -> Vec<f64> {
    thetas.iter().map(|&t| f.value_at(t)).collect()
}

/// Dealiased product truncated to `max(n_f, n_g)`.
pub fn multiply(f: &FourierField, g: &FourierField) -> FourierField {
    let n = f.n_max.max(g.n_max);
    if n <= DIRECT_PRODUCT_MAX {
        multiply_direct(f, g, n)
    } else {
        multiply_fft(f, g, n)
    }
}

/// Complex coefficient `F_k`, k ∈ [−n, n], with `f = Σ F_k e^{ikθ}`.
fn complex_coeff(f: &FourierField, k: i64) -> Complex64 {
    let m = k.unsigned_abs() as usize;
    if m == 0 {
        return Complex64::new(f.cos[0], 0.0);
    }
    if m > f.n_max {
        return Complex64::new(0.0, 0.0);
    }
    let half = Complex64::new(0.5 * f.cos[m], -0.5 * f.sin[m - 1]);
    if k > 0 {
        half
    } else {
        half.conj()
    }
}

/// Exact coefficient convolution, keeping modes `0..=n_out`.
pub fn multiply_direct(f: &FourierField, g: &FourierField, n_out: usize) -> FourierField {
    let nf = f.n_max as i64;
    let ng = g.n_max as i64;
    let fc: Vec<Complex64> = (-nf..=nf).map(|k| complex_coeff(f, k)).collect();
    let mut out = FourierField::zeros(n_out);
    for m in 0..=(n_out as i64) {
        let mut acc = Complex64::new(0.0, 0.0);
        // m = k + j, |k| ≤ nf, |j| ≤ ng
        let lo = (-nf).max(m - ng);
        let hi = nf.min(m + ng);
        for k in lo..=hi {
            acc += fc[(k + nf) as usize] * complex_coeff(g, m - k);
        }
        if m == 0 {
            out.cos[0] = acc.re;
        } else {
            out.cos[m as usize] = 2.0 * acc.re;
            out.sin[m as usize - 1] = -2.0 * acc.im;
        }
    }
    out
}

/// Product via zero-padded collocation on a grid large enough that no
/// aliased mode lands in `0..=n_out`.
pub fn multiply_fft(f: &FourierField, g: &FourierField, n_out: usize) -> FourierField {
    let n = f.n_max.max(g.n_max);
    let grid = Grid::new(Grid::dealiased_size(n, n_out));
    let fs = grid.samples(f);
    let gs = grid.samples(g);
    let prod: Vec<f64> = fs.iter().zip(&gs).map(|(a, b)| a * b).collect();
    grid.coefficients(&prod, n_out)
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Uniform collocation grid `θ_j = 2πj/M`, `j = 0..M`.
#[derive(Clone)]
pub struct Grid {
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Grid {
    pub fn new(m: usize) -> Self {
        assert!(m >= 2, "grid needs at least two points");
        let (fwd, inv) = PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            (p.plan_fft_forward(m), p.plan_fft_inverse(m))
        });
        Grid { m, fwd, inv }
    }

    /// Smallest power of two `M` such that products of two fields of
    /// truncation `n` are alias-free on modes `0..=n_out`
    /// (needs `M > 2n + n_out`; `n_out = n` is the 3/2 rule).
    pub fn dealiased_size(n: usize, n_out: usize) -> usize {
        (2 * n + n_out + 2).next_power_of_two().max(8)
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.m as f64
    }

    /// Values of `f` at the grid points.
    pub fn samples(&self, f: &FourierField) -> Vec<f64> {
        let m = self.m;
        assert!(2 * f.n_max < m, "grid of {m} points cannot resolve n_max = {}", f.n_max);
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        buf[0] = Complex64::new(f.cos[0], 0.0);
        for k in 1..=f.n_max {
            let c = Complex64::new(0.5 * f.cos[k], -0.5 * f.sin[k - 1]);
            buf[k] = c;
            buf[m - k] = c.conj();
        }
        self.inv.process(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Fourier coefficients `0..=n_out` of grid data.
    pub fn coefficients(&self, values: &[f64], n_out: usize) -> FourierField {
        let m = self.m;
        assert_eq!(values.len(), m);
        assert!(2 * n_out < m, "grid of {m} points cannot resolve n_out = {n_out}");
        let mut buf: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fwd.process(&mut buf);
        let scale = 1.0 / m as f64;
        let mut out = FourierField::zeros(n_out);
        out.cos[0] = buf[0].re * scale;
        for (k, z) in buf.iter().enumerate().take(n_out + 1).skip(1) {
            out.cos[k] = 2.0 * z.re * scale;
            out.sin[k - 1] = -2.0 * z.im * scale;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hilbert_of_sine_and_cosine() {
        let f = FourierField::sin_mode(4, 1, 1.0);
        assert_eq!(hilbert(&f), FourierField::cos_mode(4, 1, -1.0));
        let g = FourierField::cos_mode(4, 3, 1.0);
        assert_eq!(hilbert(&g), FourierField::sin_mode(4, 3, 1.0));
        assert_eq!(hilbert(&FourierField::constant(4, 1.0)), FourierField::zeros(4));
    }

    #[test]
    fn derivative_examples() {
        let f = FourierField::sin_mode(4, 2, 1.0);
        assert_eq!(differentiate(&f), FourierField::cos_mode(4, 2, 2.0));
        assert_eq!(differentiate(&FourierField::constant(4, 3.0)), FourierField::zeros(4));
        let g = &FourierField::sin_mode(4, 2, -1.0) + &FourierField::sin_mode(4, 3, 1.0 / 3.0);
        let want = &FourierField::cos_mode(4, 2, -2.0) + &FourierField::cos_mode(4, 3, 1.0);
        assert!(differentiate(&g).max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn velocity_examples() {
        let w = FourierField::sin_mode(6, 2, -1.0);
        assert!(velocity_from_vorticity(&w).max_abs_diff(&FourierField::sin_mode(6, 2, 0.5)) < 1e-15);
        assert_eq!(velocity_from_vorticity(&FourierField::zeros(6)), FourierField::zeros(6));
        for k in 1..=6 {
            let v = velocity_from_vorticity(&FourierField::sin_mode(6, k, 1.0));
            let want = FourierField::sin_mode(6, k, -1.0 / k as f64);
            assert!(v.max_abs_diff(&want) < 1e-15);
        }
    }

    #[test]
    fn velocity_vanishes_at_origin_for_cosine_data() {
        let w = FourierField::new(vec![0.3, -0.2, 0.1], vec![0.0, 1.0, -0.5, 0.25]).unwrap();
        let v = velocity_from_vorticity(&w);
        assert!(v.value_at(0.0).abs() < 1e-15);
    }

    #[test]
    fn product_examples() {
        let s1 = FourierField::sin_mode(8, 1, 1.0);
        let c1 = FourierField::cos_mode(8, 1, 1.0);
        let s2 = FourierField::sin_mode(8, 2, 1.0);
        assert!(multiply(&s1, &c1).max_abs_diff(&FourierField::sin_mode(8, 2, 0.5)) < 1e-15);
        assert_eq!(multiply(&s1, &FourierField::zeros(8)), FourierField::zeros(8));
        let want = &FourierField::cos_mode(8, 1, 0.5) + &FourierField::cos_mode(8, 3, -0.5);
        assert!(multiply_direct(&s1, &s2, 8).max_abs_diff(&want) < 1e-15);
        assert!(multiply_fft(&s1, &s2, 8).max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn evaluate_examples() {
        let f = FourierField::sin_mode(3, 2, 1.0);
        assert!((evaluate(&f, &[PI / 4.0])[0] - 1.0).abs() < 1e-15);
        let c = FourierField::constant(3, 5.0);
        assert!(evaluate(&c, &[0.1, 2.0, -3.0]).iter().all(|&x| (x - 5.0).abs() < 1e-15));
    }

    #[test]
    fn json_shape() {
        let f = FourierField::new(vec![1.0, 2.0], vec![0.5, 0.0, -1.0]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"n_max":2,"sin":[1.0,2.0],"cos":[0.5,0.0,-1.0]}"#);
        let back: FourierField = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<FourierField>(r#"{"n_max":3,"sin":[1.0],"cos":[0.0]}"#).is_err());
        assert!(serde_json::from_str::<FourierField>(r#"{"n_max":0,"sin":[],"cos":[0.0],"x":1}"#).is_err());
    }

    #[test]
    fn odd_field_rejects_cosines() {
        let f = FourierField::cos_mode(3, 1, 1.0);
        assert!(OddField::try_from(f).is_err());
        assert!(OddField::try_from(FourierField::sin_mode(3, 1, 1.0)).is_ok());
    }

    #[test]
    fn sampling_round_trip() {
        let f = FourierField::new(vec![0.1, -0.7, 0.3], vec![0.2, 0.5, 0.0, -0.4]).unwrap();
        let g = Grid::new(7);
        let back = g.coefficients(&g.samples(&f), 3);
        assert!(back.max_abs_diff(&f) < 1e-14);
        for (j, v) in g.samples(&f).iter().enumerate() {
            assert!((v - f.value_at(g.theta(j))).abs() < 1e-13);
        }
    }
}
