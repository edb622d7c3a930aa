//! Shared proptest strategies.
#![allow(dead_code)]

use mhd_spectral::basis::BasisCoefficients;
use mhd_spectral::fourier::{FourierField, OddField};
use proptest::prelude::*;

pub fn coeffs(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len)
}

/// A general real field with `1 ≤ n_max ≤ max_n`.
pub fn field(max_n: usize) -> impl Strategy<Value = FourierField> {
    (1..=max_n).prop_flat_map(|n| (coeffs(n), coeffs(n + 1))).prop_map(|(s, c)| FourierField::new(s, c).unwrap())
}

pub fn odd_field(max_n: usize) -> impl Strategy<Value = OddField> {
    (1..=max_n).prop_flat_map(coeffs).prop_map(OddField::from_sines)
}

/// Basis coefficients on `K` entries, nonzero only below `band`, decaying like `l⁻²`.
pub fn basis_coeffs(k: usize, band: usize) -> impl Strategy<Value = BasisCoefficients> {
    coeffs(band.min(k)).prop_map(move |v| {
        let mut b = BasisCoefficients::zeros(2, k);
        for (i, x) in v.into_iter().enumerate() {
            b.c[i] = x / ((i + 1) * (i + 1)) as f64;
        }
        b
    })
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
