//! The weighted spaces ℋ_κ of odd functions, their orthonormal basis
//! `e_{κ,l} = sin((l+κ)θ)/(l+κ) − sin(lθ)/l`, and the three-term coefficient
//! formulas of the linearised operators.
//!
//! For κ = 2 the weight is `ρ₂ = 1/(4π sin²θ)` and `∂_θ e_{2,k} = −2 sin((k+1)θ) sin θ`,
//! so `u = −√π ρ₂^{1/2} ∂_θ η = Σ c_k sin((k+1)θ)`: basis coefficients are plain
//! sine coefficients of `u`, and the ℋ₂ norm is their ℓ² norm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{FourierField, OddField};

/// Default relative tolerance on the recurrence tail.
pub const SPAN_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisCoefficients {
    pub kappa: usize,
    /// `c[l-1]` multiplies `e_{κ,l}`.
    pub c: Vec<f64>,
}

impl BasisCoefficients {
    pub fn zeros(kappa: usize, k: usize) -> Self {
        BasisCoefficients { kappa, c: vec![0.0; k] }
    }

    /// Unit vector at index `l` (1-based).
    pub fn unit(kappa: usize, k: usize, l: usize) -> Self {
        let mut b = Self::zeros(kappa, k);
        b.c[l - 1] = 1.0;
        b
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    /// Coefficient at 1-based index, zero outside.
    pub fn get(&self, l: usize) -> f64 {
        if l == 0 {
            0.0
        } else {
            self.c.get(l - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn norm(&self) -> f64 {
        self.c.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &BasisCoefficients) -> f64 {
        self.c.iter().zip(&other.c).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        BasisCoefficients { kappa: self.kappa, c: self.c.iter().map(|x| s * x).collect() }
    }

    pub fn resized(&self, k: usize) -> Self {
        let mut c = self.c.clone();
        c.resize(k, 0.0);
        BasisCoefficients { kappa: self.kappa, c }
    }

    /// Field truncation needed to hold every basis element: `K + κ`.
    pub fn field_n_max(&self) -> usize {
        self.c.len() + self.kappa
    }
}

/// `e_{κ,l}` on a field of truncation `n_max ≥ l + κ`.
pub fn basis_function(kappa: usize, l: usize, n_max: usize) -> Result<OddField> {
    if kappa < 1 || l < 1 {
        return Err(Error::InvalidIndex(format!("need κ ≥ 1 and l ≥ 1, got κ = {kappa}, l = {l}")));
    }
    if l + kappa > n_max {
        return Err(Error::InvalidIndex(format!("e_({kappa},{l}) needs n_max ≥ {}", l + kappa)));
    }
    let mut a = vec![0.0; n_max];
    a[l + kappa - 1] = 1.0 / (l + kappa) as f64;
    a[l - 1] = -1.0 / l as f64;
    Ok(OddField::from_sines(a))
}

/// Result of the forward transform.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub coeffs: BasisCoefficients,
    /// `Σ |c_l|` over the last κ recurrence values (indices above K).
    pub residual: f64,
}

/// Basis coefficients of a sine series, by the telescoping recurrence
/// `c_j = c_{j−κ} − j·a_j`. With top mode `N`, `K = N − κ` coefficients are
/// returned and the `κ` values `c_{K+1..N}` — which must vanish for members of
/// the span — make up the residual.
pub fn expand_sines(sines: &[f64], kappa: usize) -> Expansion {
    let n = sines.len();
    let mut c = vec![0.0; n];
    for j in 1..=n {
        let prev = if j > kappa { c[j - 1 - kappa] } else { 0.0 };
        c[j - 1] = prev - j as f64 * sines[j - 1];
    }
    let k = n.saturating_sub(kappa);
    let residual = c[k..].iter().map(|x| x.abs()).sum();
    c.truncate(k);
    Expansion { coeffs: BasisCoefficients { kappa, c }, residual }
}

/// Forward transform of an odd field (no span check).
pub fn to_basis(f: &OddField, kappa: usize) -> Expansion {
    expand_sines(f.sines(), kappa)
}

/// Forward transform failing when the tail exceeds `tol · max(1, ‖c‖)`.
pub fn to_basis_checked(f: &OddField, kappa: usize, tol: f64) -> Result<BasisCoefficients> {
    let e = to_basis(f, kappa);
    let scale = e.coeffs.norm().max(1.0);
    if e.residual > tol * scale {
        return Err(Error::OutOfSpan { residual: e.residual, tol });
    }
    Ok(e.coeffs)
}

/// `Σ c_l e_{κ,l}` on truncation `K + κ`.
pub fn from_basis(c: &BasisCoefficients) -> OddField {
    from_basis_on(c, c.field_n_max())
}

/// `Σ c_l e_{κ,l}` on an explicit truncation (at least `K + κ`).
pub fn from_basis_on(c: &BasisCoefficients, n_max: usize) -> OddField {
    assert!(n_max >= c.field_n_max(), "truncation {n_max} too small for {} coefficients", c.len());
    let kappa = c.kappa;
    let mut a = vec![0.0; n_max];
    for (i, &cl) in c.c.iter().enumerate() {
        let l = i + 1;
        a[l + kappa - 1] += cl / (l + kappa) as f64;
        a[l - 1] -= cl / l as f64;
    }
    OddField::from_sines(a)
}

/// ℋ₂ inner product via Parseval on basis coefficients.
pub fn h2_inner(f: &OddField, g: &OddField) -> Result<f64> {
    let cf = to_basis_checked(f, 2, SPAN_TOL)?;
    let cg = to_basis_checked(g, 2, SPAN_TOL)?;
    let k = cf.len().min(cg.len());
    Ok(cf.c[..k].iter().zip(&cg.c[..k]).map(|(a, b)| a * b).sum())
}

pub fn h2_norm(f: &OddField) -> Result<f64> {
    Ok(to_basis_checked(f, 2, SPAN_TOL)?.norm())
}

/// The u-representation `u = Σ c_k sin((k+1)θ)` (κ = 2) on truncation `K + 1`,
/// or larger if requested.
pub fn u_field(c: &BasisCoefficients, n_max: usize) -> FourierField {
    assert_eq!(c.kappa, 2, "u-representation is defined for κ = 2");
    assert!(n_max > c.len());
    let mut s = vec![0.0; n_max];
    s[1..=c.len()].copy_from_slice(&c.c);
    FourierField::from_sines(s)
}

/// Reads basis coefficients back off a u-field (sine coefficient k+1 ↦ c_k).
pub fn coeffs_of_u(u: &FourierField, k: usize) -> BasisCoefficients {
    BasisCoefficients { kappa: 2, c: (1..=k).map(|i| u.sin_coeff(i + 1)).collect() }
}

/// `d⁻_{2,k} = (k+2)²(k−2)/(4k²)`.
pub fn d_minus(k: usize) -> f64 {
    let k = k as f64;
    (k + 2.0).powi(2) * (k - 2.0) / (4.0 * k * k)
}

/// `d⁺_{2,k} = (k−2)²(k+2)/(4k²)`.
pub fn d_plus(k: usize) -> f64 {
    let k = k as f64;
    (k - 2.0).powi(2) * (k + 2.0) / (4.0 * k * k)
}

/// `d_{κ,l} = (l−κ)²(l+κ)/(2κl²)`.
pub fn d_kappa(kappa: usize, l: usize) -> f64 {
    let (kp, l) = (kappa as f64, l as f64);
    (l - kp).powi(2) * (l + kp) / (2.0 * kp * l * l)
}

/// `d_{κ,l} − d_{κ,l+κ}` in closed form.
pub fn d_kappa_gap_closed(kappa: usize, l: usize) -> f64 {
    let (kp, l) = (kappa as f64, l as f64);
    -0.5 + kp * kp * (-l * l + kp * l + kp * kp) / (2.0 * l * l * (l + kp).powi(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

/// Banded matrix of `L±` in the basis `e_{κ,l}`, stored by basis element:
/// `L e_l = upper[l]·e_{l+κ} + diag[l]·e_l + lower[l]·e_{l−κ}`
/// with `upper = −d_{l+κ}`, `diag = d_l − d_{l+κ}`, `lower = d_l` (dropped for `l ≤ κ`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TridiagonalOperator {
    pub kappa: usize,
    pub k: usize,
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Assembles `L±` for κ = 2, or the general-κ operator `L_κ` (sign `Plus`).
pub fn tridiagonal_l(sign: Sign, kappa: usize, k: usize) -> Result<TridiagonalOperator> {
    if k < kappa + 2 {
        return Err(Error::InvalidIndex(format!("K = {k} must be at least κ + 2 = {}", kappa + 2)));
    }
    let d: Box<dyn Fn(usize) -> f64> = match (sign, kappa) {
        (Sign::Plus, 2) => Box::new(d_plus),
        (Sign::Minus, 2) => Box::new(d_minus),
        (Sign::Plus, kp) if kp >= 1 => Box::new(move |l| d_kappa(kp, l)),
        _ => return Err(Error::InvalidIndex("L⁻ coefficients are only defined for κ = 2".into())),
    };
    let mut lower = vec![0.0; k];
    let mut diag = vec![0.0; k];
    let mut upper = vec![0.0; k];
    for l in 1..=k {
        diag[l - 1] = d(l) - d(l + kappa);
        upper[l - 1] = -d(l + kappa);
        if l > kappa {
            lower[l - 1] = d(l);
        }
    }
    Ok(TridiagonalOperator { kappa, k, lower, diag, upper })
}

impl TridiagonalOperator {
    /// Galerkin action on coefficients (components beyond K are dropped).
    pub fn apply(&self, c: &[f64]) -> Vec<f64> {
        let (k, kp) = (self.k, self.kappa);
        assert_eq!(c.len(), k);
        let mut out = vec![0.0; k];
        for j in 0..k {
            let mut v = self.diag[j] * c[j];
            if j >= kp {
                v += self.upper[j - kp] * c[j - kp];
            }
            if j + kp < k {
                v += self.lower[j + kp] * c[j + kp];
            }
            out[j] = v;
        }
        out
    }

    /// Coefficients of `L e_l` as a dense column of length `K + κ`.
    pub fn column(&self, l: usize) -> Vec<f64> {
        let mut col = vec![0.0; self.k + self.kappa];
        col[l - 1] = self.diag[l - 1];
        col[l + self.kappa - 1] = self.upper[l - 1];
        if l > self.kappa {
            col[l - self.kappa - 1] = self.lower[l - 1];
        }
        col
    }

    /// Dense K×K matrix (row = output index).
    pub fn dense(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.k]; self.k];
        for l in 1..=self.k {
            for (i, v) in self.column(l).into_iter().enumerate().take(self.k) {
                m[i][l - 1] = v;
            }
        }
        m
    }
}

/// Hardy-type ratio `‖f/sin θ‖_∞ / ‖∂_θ f/sin θ‖_{L²}` for f in the ℋ₂ span.
///
/// Uses `∂_θ f / sin θ = −2u` and `sin(jθ)/sin θ = Σ_{i<j} cos((j−1−2i)θ)`, so
/// nothing is divided pointwise. The L² norm is normalised so that
/// `‖sin kθ‖ = 1`.
pub fn hardy_ratio(f: &OddField) -> Result<f64> {
    let c = to_basis_checked(f, 2, SPAN_TOL)?;
    let denom = 2.0 * c.norm();
    if denom == 0.0 {
        return Err(Error::Precondition("Hardy ratio of the zero field".into()));
    }
    let q = divide_by_sin(f.sines());
    Ok(q.linf_norm() / denom)
}

/// Cosine series of `(Σ a_j sin jθ)/sin θ`, exact.
pub fn divide_by_sin(sines: &[f64]) -> FourierField {
    let n = sines.len();
    let mut cos = vec![0.0; n.max(1)];
    for (idx, &a) in sines.iter().enumerate() {
        let j = idx + 1;
        if a == 0.0 {
            continue;
        }
        // sin(jθ)/sin θ = Σ_{i=0}^{j−1} cos((j−1−2i)θ); fold negative frequencies
        for i in 0..j {
            let m = (j as i64 - 1 - 2 * i as i64).unsigned_abs() as usize;
            cos[m] += a;
        }
    }
    FourierField::from_cosines(cos)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_examples() {
        let e21 = basis_function(2, 1, 4).unwrap();
        assert_eq!(e21.sines(), &[-1.0, 0.0, 1.0 / 3.0, 0.0]);
        let e22 = basis_function(2, 2, 4).unwrap();
        assert_eq!(e22.sines(), &[0.0, -0.5, 0.0, 0.25]);
        let e31 = basis_function(3, 1, 4).unwrap();
        assert_eq!(e31.sines(), &[-1.0, 0.0, 0.0, 0.25]);
        assert!(basis_function(0, 1, 4).is_err());
        assert!(basis_function(2, 3, 4).is_err());
        let v = e21.field().value_at(std::f64::consts::FRAC_PI_2);
        assert!((v + 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn expansion_examples() {
        let e = to_basis(&basis_function(2, 1, 10).unwrap(), 2);
        assert_eq!(e.coeffs.c, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(e.residual, 0.0);

        let mut c = BasisCoefficients::zeros(2, 8);
        c.c[2] = 2.0;
        c.c[3] = 1.0;
        let back = to_basis(&from_basis(&c), 2);
        assert!(back.residual < 1e-15);
        assert!(back.coeffs.c.iter().zip(&c.c).all(|(a, b)| (a - b).abs() < 1e-15));

        let s = to_basis(&OddField::from_sines(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]), 2);
        assert_eq!(s.coeffs.c, vec![-1.0, 0.0, -1.0, 0.0, -1.0]);
        assert!(s.residual >= 1.0);
        assert!(to_basis_checked(&OddField::from_sines(vec![1.0, 0.0, 0.0]), 2, SPAN_TOL).is_err());
    }

    #[test]
    fn from_basis_two_terms() {
        let c = BasisCoefficients { kappa: 2, c: vec![1.0, 1.0] };
        let f = from_basis(&c);
        // e_{2,1} + e_{2,2} = −sin θ − sin 2θ/2 + sin 3θ/3 + sin 4θ/4
        assert_eq!(f.sines(), &[-1.0, -0.5, 1.0 / 3.0, 0.25]);
        assert_eq!(from_basis(&BasisCoefficients::zeros(2, 3)).sines(), &[0.0; 5]);
    }

    #[test]
    fn inner_products() {
        let e1 = basis_function(2, 1, 8).unwrap();
        let e3 = basis_function(2, 3, 8).unwrap();
        assert!((h2_inner(&e1, &e1).unwrap() - 1.0).abs() < 1e-15);
        assert!(h2_inner(&e1, &e3).unwrap().abs() < 1e-15);
        let three = OddField::from_sines(basis_function(2, 2, 8).unwrap().field().scaled(3.0).sines().to_vec());
        assert!((h2_norm(&three).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn d_examples() {
        assert_eq!(d_minus(2), 0.0);
        assert!((d_plus(1) - d_plus(3) - 11.0 / 18.0).abs() < 1e-15);
        for l in 1..50 {
            assert!((d_kappa(2, l) - d_plus(l)).abs() < 1e-13);
        }
    }

    #[test]
    fn tridiagonal_examples() {
        let lp = tridiagonal_l(Sign::Plus, 2, 10).unwrap();
        assert!((lp.diag[0] - 11.0 / 18.0).abs() < 1e-15);
        assert!((lp.upper[0] + 5.0 / 36.0).abs() < 1e-15);
        assert!((lp.diag[1] + 3.0 / 8.0).abs() < 1e-15);
        let lm = tridiagonal_l(Sign::Minus, 2, 10).unwrap();
        assert!(lm.diag.iter().all(|&x| x < -0.5));
        assert!(tridiagonal_l(Sign::Minus, 3, 10).is_err());
        assert!(tridiagonal_l(Sign::Plus, 2, 3).is_err());
    }

    #[test]
    fn divide_by_sin_is_exact() {
        let a = vec![0.3, -0.1, 0.7, 0.0, 0.2];
        let q = divide_by_sin(&a);
        let f = OddField::from_sines(a);
        for t in [0.3, 1.1, 2.9, -0.7] {
            let want = f.field().value_at(t) / f64::sin(t);
            assert!((q.value_at(t) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn hardy_ratio_of_first_element() {
        // e_{2,1}/sin θ = −(4/3) sin²θ, so the sup is 4/3 and ‖u‖ = 1.
        let r = hardy_ratio(&basis_function(2, 1, 6).unwrap()).unwrap();
        assert!((r - 2.0 / 3.0).abs() < 1e-12);
    }
}
