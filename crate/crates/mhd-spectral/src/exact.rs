//! Exact rational versions of the coefficient formulas.
//!
//! `i128` is ample: for k ≤ 10⁴ the largest reduced denominators that occur
//! stay below 10²⁰.

use num_rational::Ratio;

pub type Q = Ratio<i128>;

fn q(n: i128) -> Q {
    Q::from_integer(n)
}

pub fn d_plus(k: u64) -> Q {
    let k = k as i128;
    Q::new((k - 2).pow(2) * (k + 2), 4 * k * k)
}

pub fn d_minus(k: u64) -> Q {
    let k = k as i128;
    Q::new((k + 2).pow(2) * (k - 2), 4 * k * k)
}

pub fn d_kappa(kappa: u64, l: u64) -> Q {
    let (kp, l) = (kappa as i128, l as i128);
    Q::new((l - kp).pow(2) * (l + kp), 2 * kp * l * l)
}

/// `d_{κ,l} − d_{κ,l+κ}` from the closed form.
pub fn d_kappa_gap_closed(kappa: u64, l: u64) -> Q {
    let (kp, l) = (kappa as i128, l as i128);
    Q::new(-1, 2) + Q::new(kp * kp * (-l * l + kp * l + kp * kp), 2 * l * l * (l + kp).pow(2))
}

/// `a_k = (d⁺_k − d⁺_{k+2})²`.
pub fn a_plus(k: u64) -> Q {
    let g = d_plus(k) - d_plus(k + 2);
    g * g
}

/// `ε_k = d_k d_{k+2} + d_{k+2} d_{k+4} − 2 d_{k+2}²`.
pub fn eps_plus_def(k: u64) -> Q {
    let (a, b, c) = (d_plus(k), d_plus(k + 2), d_plus(k + 4));
    a * b + b * c - q(2) * b * b
}

/// `ε_k = (−2k³ + 32k + 32)/((k+2)⁴(k+4))`.
pub fn eps_plus_closed(k: u64) -> Q {
    let k = k as i128;
    Q::new(-2 * k.pow(3) + 32 * k + 32, (k + 2).pow(4) * (k + 4))
}
