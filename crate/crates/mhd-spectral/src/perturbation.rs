//! Perturbations of the first excited state.
//!
//! With `ω± = −sin 2θ + (η⁺ ± η⁻)` and `u± = ½ sin 2θ + (v⁺ ± v⁻)` the
//! De Gregorio-type system (a = 1, p + q = 1) becomes
//! `∂_t η⁺ = L⁺η⁺ + N₁`, `∂_t η⁻ = L⁻η⁻ + N₂` with
//! `L⁺ = L + A`, `L⁻ = L − A − 2qQ`,
//! `L f = ½{f, sin 2θ}`, `A f = {v(f), sin 2θ}`, `Q f = sin 2θ·Hf + cos 2θ·f`.
//!
//! The second half of the module is the same system after the weighted
//! derivative `u = −∂_θ η / (2 sin θ)`.

use serde::{Deserialize, Serialize};

use crate::basis::{
    coeffs_of_u, divide_by_sin, expand_sines, from_basis_on, to_basis, tridiagonal_l, u_field,
    BasisCoefficients, Sign, TridiagonalOperator,
};
use crate::error::{Error, Result};
use crate::fourier::{multiply, velocity_from_vorticity, FourierField, Grid, OddField};
use crate::model::MhdState;
use crate::ode::rk4_step;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationState {
    pub eta_plus: OddField,
    pub eta_minus: OddField,
    pub time: f64,
}

impl PerturbationState {
    pub fn new(eta_plus: OddField, eta_minus: OddField) -> Result<Self> {
        if eta_plus.n_max() != eta_minus.n_max() {
            return Err(Error::InvalidField("η⁺ and η⁻ truncations differ".into()));
        }
        Ok(PerturbationState { eta_plus, eta_minus, time: 0.0 })
    }

    pub fn n_max(&self) -> usize {
        self.eta_plus.n_max()
    }

    /// `ω± = −sin 2θ + (η⁺ ± η⁻)`.
    pub fn to_mhd(&self) -> MhdState {
        let n = self.n_max();
        let base = FourierField::sin_mode(n, 2, -1.0);
        let (p, m) = (self.eta_plus.field(), self.eta_minus.field());
        MhdState { omega_plus: &(&base + p) + m, omega_minus: &(&base + p) - m, time: self.time }
    }
}

fn sin2(n: usize) -> FourierField {
    FourierField::sin_mode(n.max(2), 2, 1.0).resized(n)
}

fn cos2(n: usize) -> FourierField {
    FourierField::cos_mode(n.max(2), 2, 1.0).resized(n)
}

/// `{f, g} = f ∂_θ g − g ∂_θ f`, dealiased, on the larger truncation.
pub fn lie_bracket(f: &FourierField, g: &FourierField) -> FourierField {
    let n = f.n_max().max(g.n_max());
    let grid = Grid::new(Grid::dealiased_size(n, n));
    let (fs, gs) = (grid.samples(f), grid.samples(g));
    let (dfs, dgs) = (grid.samples(&f.derivative()), grid.samples(&g.derivative()));
    let r: Vec<f64> = (0..grid.len()).map(|j| fs[j] * dgs[j] - gs[j] * dfs[j]).collect();
    grid.coefficients(&r, n)
}

/// `L f = ½{f, sin 2θ}`.
pub fn op_l(f: &FourierField) -> FourierField {
    lie_bracket(f, &sin2(f.n_max())).scaled(0.5)
}

/// `A f = {v(f), sin 2θ}`.
pub fn op_a(f: &FourierField) -> FourierField {
    lie_bracket(&velocity_from_vorticity(f), &sin2(f.n_max()))
}

/// `Q f = sin 2θ·Hf + cos 2θ·f`.
pub fn op_q(f: &FourierField) -> FourierField {
    let n = f.n_max();
    &multiply(&sin2(n), &f.hilbert()) + &multiply(&cos2(n), f)
}

pub fn op_l_plus(f: &FourierField) -> FourierField {
    &op_l(f) + &op_a(f)
}

pub fn op_l_minus(f: &FourierField, q: f64) -> FourierField {
    let lm = &op_l(f) - &op_a(f);
    if q == 0.0 {
        lm
    } else {
        lm.axpy(-2.0 * q, &op_q(f))
    }
}

struct Sampled {
    eta: Vec<f64>,
    deta: Vec<f64>,
    v: Vec<f64>,
    dv: Vec<f64>,
}

fn sample_pair(grid: &Grid, eta: &FourierField) -> Sampled {
    let v = velocity_from_vorticity(eta);
    Sampled {
        eta: grid.samples(eta),
        deta: grid.samples(&eta.derivative()),
        dv: grid.samples(&eta.hilbert()),
        v: grid.samples(&v),
    }
}

/// Pointwise `(N₁, N₂)` from sampled fields (Hη = ∂_θ v).
fn nonlinear_pointwise(p: &Sampled, m: &Sampled, q: f64) -> (Vec<f64>, Vec<f64>) {
    let len = p.eta.len();
    let br = |f: &[f64], df: &[f64], g: &[f64], dg: &[f64], j: usize| f[j] * dg[j] - g[j] * df[j];
    let mut n1 = vec![0.0; len];
    let mut n2 = vec![0.0; len];
    for j in 0..len {
        n1[j] = br(&p.eta, &p.deta, &p.v, &p.dv, j) - br(&m.eta, &m.deta, &m.v, &m.dv, j);
        n2[j] = br(&m.eta, &m.deta, &p.v, &p.dv, j) - br(&p.eta, &p.deta, &m.v, &m.dv, j)
            - 2.0 * q * (m.eta[j] * p.dv[j] - p.eta[j] * m.dv[j]);
    }
    (n1, n2)
}

fn nonlinear_on(s: &PerturbationState, q: f64, n_out: usize) -> (FourierField, FourierField) {
    let n = s.n_max();
    let grid = Grid::new(Grid::dealiased_size(n, n_out));
    let p = sample_pair(&grid, s.eta_plus.field());
    let m = sample_pair(&grid, s.eta_minus.field());
    let (n1, n2) = nonlinear_pointwise(&p, &m, q);
    (grid.coefficients(&n1, n_out), grid.coefficients(&n2, n_out))
}

/// `N₁ = {η⁺, v⁺} − {η⁻, v⁻}`.
pub fn nonlinear_n1(s: &PerturbationState) -> FourierField {
    nonlinear_on(s, 0.0, s.n_max()).0
}

/// `N₂ = {η⁻, v⁺} − {η⁺, v⁻} − 2q(η⁻Hη⁺ − η⁺Hη⁻)`.
pub fn nonlinear_n2(s: &PerturbationState, q: f64) -> FourierField {
    nonlinear_on(s, q, s.n_max()).1
}

/// `(L⁺η⁺ + N₁, L⁻η⁻ + N₂)`, nonlinear terms omitted when `linear_only`.
pub fn rhs_perturbation(s: &PerturbationState, q: f64, linear_only: bool) -> (FourierField, FourierField) {
    let lp = op_l_plus(s.eta_plus.field());
    let lm = op_l_minus(s.eta_minus.field(), q);
    if linear_only {
        return (lp, lm);
    }
    let (n1, n2) = nonlinear_on(s, q, s.n_max());
    (&lp + &n1, &lm + &n2)
}

// ---------------------------------------------------------------------------
// u-variables

/// `u± = −√π ρ₂^{1/2} ∂_θ η±` as sine series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UState {
    pub u_plus: FourierField,
    pub u_minus: FourierField,
}

/// Weighted derivative `−∂_θ f / (2 sin θ) = Σ c_k sin((k+1)θ)`, on the same
/// truncation as `f`. Span membership is not checked here.
pub fn weighted_transform(f: &FourierField) -> FourierField {
    let e = expand_sines(f.sines(), 2);
    u_field(&e.coeffs, f.n_max())
}

/// `g = Σ c_k cos((k+1)θ)`, equal to `∂_θ Hη / (2 sin θ)`.
pub fn g_field(c: &BasisCoefficients, n_max: usize) -> FourierField {
    let mut cos = vec![0.0; n_max + 1];
    for (i, &ck) in c.c.iter().enumerate() {
        cos[i + 2] = ck;
    }
    FourierField::from_cosines(cos)
}

/// `h = v / (2 sin θ)` with `v` the velocity of `η = Σ c_k e_{2,k}`; exact cosine series.
pub fn h_field(c: &BasisCoefficients, n_max: usize) -> FourierField {
    let eta = from_basis_on(c, n_max);
    let v = velocity_from_vorticity(eta.field());
    divide_by_sin(v.sines()).scaled(0.5).resized(n_max)
}

fn trig(n: usize, k: usize, sine: bool) -> FourierField {
    let big = n.max(k);
    let f = if sine { FourierField::sin_mode(big, k, 1.0) } else { FourierField::cos_mode(big, k, 1.0) };
    f.resized(n)
}

/// `L₁^± u = −½ sin 2θ ∂_θu − cos²θ u ∓ 2 cos θ H(sin θ u) + 2 cos θ η ± 4 cos θ v`.
fn op_l1(u: &FourierField, eta: &FourierField, v: &FourierField, sign: f64) -> FourierField {
    let n = u.n_max().max(eta.n_max()).max(v.n_max());
    let (u, eta, v) = (u.resized(n), eta.resized(n), v.resized(n));
    let (s1, c1, s2) = (trig(n, 1, true), trig(n, 1, false), trig(n, 2, true));
    let cos_sq = &FourierField::constant(n, 0.5) + &trig(n, 2, false).scaled(0.5);
    let t1 = multiply(&s2, &u.derivative()).scaled(-0.5);
    let t2 = multiply(&cos_sq, &u).scaled(-1.0);
    let t3 = multiply(&c1, &multiply(&s1, &u).hilbert()).scaled(-2.0 * sign);
    let t4 = multiply(&c1, &eta).scaled(2.0);
    let t5 = multiply(&c1, &v).scaled(4.0 * sign);
    [t2, t3, t4, t5].iter().fold(t1, |acc, t| &acc + t)
}

/// Weighted form of `L⁺`, taking the consistent triple `(u, η, v)`.
pub fn op_l1_plus(u: &FourierField, eta: &FourierField, v: &FourierField) -> FourierField {
    op_l1(u, eta, v, 1.0)
}

/// Weighted form of `L⁻` (q = 0).
pub fn op_l1_minus(u: &FourierField, eta: &FourierField, v: &FourierField) -> FourierField {
    op_l1(u, eta, v, -1.0)
}

/// The nonlinear terms in u-variables, `(𝒩₁, 𝒩₂)`, assembled from the helper
/// fields `g±` and `h±`. Output truncation equals the input truncation.
pub fn u_nonlinear_rhs(s: &UState, q: f64) -> UState {
    let n = s.u_plus.n_max().max(s.u_minus.n_max());
    let k = n - 1;
    let cp = coeffs_of_u(&s.u_plus, k);
    let cm = coeffs_of_u(&s.u_minus, k);
    // η lives on K + 2 = n + 1 modes; products are evaluated on a grid
    // that resolves everything and then truncated to n.
    let nf = n + 1;
    let eta_p = from_basis_on(&cp, nf).into_field();
    let eta_m = from_basis_on(&cm, nf).into_field();
    let (gp, gm) = (g_field(&cp, nf), g_field(&cm, nf));
    let (hp, hm) = (h_field(&cp, nf), h_field(&cm, nf));
    let (up, um) = (s.u_plus.resized(nf), s.u_minus.resized(nf));

    let grid = Grid::new(Grid::dealiased_size(nf, n));
    let sm = |f: &FourierField| grid.samples(f);
    let (sp, sn) = (sm(&up), sm(&um));
    let (dup, dum) = (sm(&up.derivative()), sm(&um.derivative()));
    let (ep, em) = (sm(&eta_p), sm(&eta_m));
    let (hep, hem) = (sm(&eta_p.hilbert()), sm(&eta_m.hilbert()));
    let (gps, gms) = (sm(&gp), sm(&gm));
    let (hps, hms) = (sm(&hp), sm(&hm));
    let len = grid.len();
    let mut n1 = vec![0.0; len];
    let mut n2 = vec![0.0; len];
    for j in 0..len {
        let (st, ct) = grid.theta(j).sin_cos();
        n1[j] = -2.0 * st * hps[j] * dup[j] - 2.0 * ct * hps[j] * sp[j] - ep[j] * gps[j]
            + em[j] * gms[j]
            + 2.0 * ct * sn[j] * hms[j]
            + 2.0 * st * hms[j] * dum[j];
        n2[j] = -2.0 * st * hps[j] * dum[j] - 2.0 * ct * hps[j] * sn[j] - em[j] * gps[j]
            + ep[j] * gms[j]
            + 2.0 * ct * sp[j] * hms[j]
            + 2.0 * st * hms[j] * dup[j];
        if q != 0.0 {
            n2[j] -= 2.0 * q * (sn[j] * hep[j] - em[j] * gps[j] - sp[j] * hem[j] + ep[j] * gms[j]);
        }
    }
    UState { u_plus: grid.coefficients(&n1, n), u_minus: grid.coefficients(&n2, n) }
}

// ---------------------------------------------------------------------------
// Galerkin system in basis coefficients

/// The perturbation system projected onto `span{e_{2,1..K}}`.
///
/// The linear part is the exact banded operator. Nonlinear terms are formed
/// from fields of truncation `K + 2`, evaluated without truncation (the exact
/// product has modes up to `2K + 4`) and expanded back into the basis; the
/// first K coefficients are kept. Since `N₁`, `N₂` of span members lie in the
/// span, this is an orthogonal projection in ℋ₂.
#[derive(Clone)]
pub struct Galerkin {
    pub k: usize,
    pub q: f64,
    pub linear_only: bool,
    lp: TridiagonalOperator,
    lm: TridiagonalOperator,
    grid: Grid,
}

impl Galerkin {
    pub fn new(k: usize, q: f64, linear_only: bool) -> Result<Self> {
        let n = k + 2;
        Ok(Galerkin {
            k,
            q,
            linear_only,
            lp: tridiagonal_l(Sign::Plus, 2, k)?,
            lm: tridiagonal_l(Sign::Minus, 2, k)?,
            grid: Grid::new(Grid::dealiased_size(n, 2 * n)),
        })
    }

    pub fn l_plus(&self) -> &TridiagonalOperator {
        &self.lp
    }

    pub fn l_minus(&self) -> &TridiagonalOperator {
        &self.lm
    }

    fn project(&self, f: &FourierField) -> Vec<f64> {
        let mut c = to_basis(&OddField::from_sines(f.sines().to_vec()), 2).coeffs.c;
        c.resize(self.k, 0.0);
        c
    }

    /// `(L⁺c⁺ + P N₁, L⁻c⁻ + P N₂)`.
    pub fn rhs(&self, cp: &[f64], cm: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut dp = self.lp.apply(cp);
        let mut dm = self.lm.apply(cm);
        let n = self.k + 2;
        let need_fields = !self.linear_only || self.q != 0.0;
        if !need_fields {
            return (dp, dm);
        }
        let bp = BasisCoefficients { kappa: 2, c: cp.to_vec() };
        let bm = BasisCoefficients { kappa: 2, c: cm.to_vec() };
        let ep = from_basis_on(&bp, n).into_field();
        let em = from_basis_on(&bm, n).into_field();
        if self.q != 0.0 {
            let qm = op_q(&em.resized(n + 2));
            for (d, x) in dm.iter_mut().zip(self.project(&qm)) {
                *d -= 2.0 * self.q * x;
            }
        }
        if !self.linear_only {
            let p = sample_pair(&self.grid, &ep);
            let m = sample_pair(&self.grid, &em);
            let (n1, n2) = nonlinear_pointwise(&p, &m, self.q);
            let n1 = self.grid.coefficients(&n1, 2 * n);
            let n2 = self.grid.coefficients(&n2, 2 * n);
            for (d, x) in dp.iter_mut().zip(self.project(&n1)) {
                *d += x;
            }
            for (d, x) in dm.iter_mut().zip(self.project(&n2)) {
                *d += x;
            }
        }
        (dp, dm)
    }

    /// One RK4 step of the coupled pair.
    pub fn step(&self, cp: &[f64], cm: &[f64], dt: f64) -> (Vec<f64>, Vec<f64>) {
        let k = self.k;
        let mut y = cp.to_vec();
        y.extend_from_slice(cm);
        let y1 = rk4_step(&y, dt, |y| {
            let (a, b) = self.rhs(&y[..k], &y[k..]);
            let mut out = a;
            out.extend(b);
            out
        });
        (y1[..k].to_vec(), y1[k..].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::basis_function;

    fn s(n: usize, k: usize, a: f64) -> FourierField {
        FourierField::sin_mode(n, k, a)
    }

    #[test]
    fn bracket_examples() {
        let b = lie_bracket(&s(8, 1, 1.0), &s(8, 2, 1.0));
        let want = &s(8, 3, 0.5) + &s(8, 1, -1.5);
        assert!(b.max_abs_diff(&want) < 1e-15);
        let f = &s(8, 1, 0.3) + &FourierField::cos_mode(8, 2, -0.7);
        assert!(lie_bracket(&f, &f).coeff_norm_sq() < 1e-30);
    }

    #[test]
    fn operator_examples() {
        assert!(op_l(&s(8, 2, 1.0)).coeff_norm_sq() < 1e-30);
        assert!(op_q(&s(8, 2, 1.0)).coeff_norm_sq() < 1e-30);
        let a = op_a(&s(8, 1, 1.0));
        assert!(a.max_abs_diff(&(&s(8, 3, -0.5) + &s(8, 1, 1.5))) < 1e-15);
        let lp = op_l_plus(&s(8, 1, 1.0));
        assert!(lp.max_abs_diff(&(&s(8, 3, -0.25) + &s(8, 1, 0.75))) < 1e-15);
        assert!(op_l_minus(&s(8, 2, 1.0), 0.0).coeff_norm_sq() < 1e-30);
        let lm = op_l_minus(&s(8, 1, 1.0), 0.0);
        assert!(lm.max_abs_diff(&(&s(8, 3, 0.75) + &s(8, 1, -2.25))) < 1e-15);
    }

    #[test]
    fn nonlinear_examples() {
        let z = PerturbationState::new(OddField::zeros(8), OddField::zeros(8)).unwrap();
        assert_eq!(nonlinear_n1(&z).coeff_norm_sq(), 0.0);
        assert_eq!(nonlinear_n2(&z, 0.3).coeff_norm_sq(), 0.0);
        let one = OddField::from_sines(s(8, 1, 1.0).sines().to_vec());
        let st = PerturbationState::new(one, OddField::zeros(8)).unwrap();
        assert!(nonlinear_n1(&st).coeff_norm_sq() < 1e-30);
        assert!(nonlinear_n2(&st, 0.0).coeff_norm_sq() < 1e-30);
        let e = basis_function(2, 3, 8).unwrap();
        let eq = PerturbationState::new(e.clone(), e).unwrap();
        assert!(nonlinear_n2(&eq, 0.0).coeff_norm_sq() < 1e-30);
    }

    #[test]
    fn linear_rhs_is_operator() {
        let e = basis_function(2, 1, 12).unwrap();
        let st = PerturbationState::new(e.clone(), OddField::zeros(12)).unwrap();
        let (a, b) = rhs_perturbation(&st, 0.0, true);
        assert!(a.max_abs_diff(&op_l_plus(e.field())) < 1e-16);
        assert_eq!(b.coeff_norm_sq(), 0.0);
    }

    #[test]
    fn g_of_basis_element() {
        let c = BasisCoefficients::unit(2, 6, 3);
        let g = g_field(&c, 8);
        assert!(g.max_abs_diff(&FourierField::cos_mode(8, 4, 1.0)) < 1e-16);
    }

    #[test]
    fn galerkin_linear_matches_tridiagonal() {
        let g = Galerkin::new(10, 0.0, true).unwrap();
        let cp = vec![1.0, 0.5, 0.0, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.1];
        let (dp, dm) = g.rhs(&cp, &cp);
        assert_eq!(dp, g.l_plus().apply(&cp));
        assert_eq!(dm, g.l_minus().apply(&cp));
    }
}
