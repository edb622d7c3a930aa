//! Pseudo-spectral simulation and spectral analysis of a one-dimensional MHD
//! vorticity model and its CLM / De Gregorio / CCF / OSW reductions, around
//! the first excited state `Ω₂ = −sin 2θ`.
//!
//! * [`fourier`] — truncated Fourier fields, Hilbert transform, products.
//! * [`model`] — the two-component model and its reductions, RK4.
//! * [`perturbation`] — the perturbation system `∂_t η± = L±η± + N`.
//! * [`basis`] — the weighted space ℋ₂, its basis and banded operators.
//! * [`analysis`] — the 2×2 quadratic forms and their uniform eigenvalue bounds.
//! * [`experiments`] — growth/decay/stability/instability drivers.
//! * [`config`] — JSON experiment configs and verdicts.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod basis;
pub mod config;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod fourier;
pub mod model;
pub mod ode;
pub mod perturbation;

pub use error::{Error, Result};
pub use fourier::{FourierField, OddField};
