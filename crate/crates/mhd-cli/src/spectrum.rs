//! The coefficient table: exact rationals for d±, the diagonal gap, a_k and ε_k,
//! floating eigenvalues of the 2×2 forms, and the uniform bound summary.

use mhd_spectral::analysis::{QuadFormMatrix, LAMBDA_LOWER, LAMBDA_UPPER, TAIL_LIMIT};
use mhd_spectral::exact;
use serde_json::json;

use crate::output::{fmt_f64, OutDir};
use crate::Failure;

/// Largest table size kept in exact `i128` arithmetic.
pub const KMAX_LIMIT: usize = 10_000;

pub const HEADER: [&str; 9] = ["k", "d_minus", "d_plus", "diag_plus", "a_k", "eps_k", "lambda_1", "lambda_2", "a_k_float"];

pub fn check_kmax(k_max: usize) -> Result<(), Failure> {
    if k_max < 4 {
        return Err(Failure::Config(format!("--kmax must be at least 4, got {k_max}")));
    }
    if k_max > KMAX_LIMIT {
        return Err(Failure::Config(format!("--kmax is limited to {KMAX_LIMIT}, got {k_max}")));
    }
    Ok(())
}

pub fn rows(k_max: usize) -> Vec<Vec<String>> {
    (1..=k_max as u64)
        .map(|k| {
            let m = QuadFormMatrix::new(k as usize);
            let (l1, l2) = m.eigenvalues();
            vec![
                k.to_string(),
                exact::d_minus(k).to_string(),
                exact::d_plus(k).to_string(),
                (exact::d_plus(k) - exact::d_plus(k + 2)).to_string(),
                exact::a_plus(k).to_string(),
                exact::eps_plus_closed(k).to_string(),
                fmt_f64(l1),
                fmt_f64(l2),
                fmt_f64(m.a_k),
            ]
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub lambda_inf: f64,
    pub argmin_k: usize,
    pub lambda_sup: f64,
    pub argmax_k: usize,
    pub pass: bool,
}

pub fn summary(k_max: usize) -> Summary {
    let mut s = Summary { lambda_inf: f64::INFINITY, argmin_k: 0, lambda_sup: f64::NEG_INFINITY, argmax_k: 0, pass: false };
    for k in 1..=k_max {
        let m = QuadFormMatrix::new(k);
        let (l1, l2) = m.eigenvalues();
        for v in [m.a_k, l1, l2] {
            if v < s.lambda_inf {
                (s.lambda_inf, s.argmin_k) = (v, k);
            }
            if v > s.lambda_sup {
                (s.lambda_sup, s.argmax_k) = (v, k);
            }
        }
    }
    let inside = |x: f64| LAMBDA_LOWER < x && x < LAMBDA_UPPER;
    s.pass = inside(s.lambda_inf) && inside(s.lambda_sup) && inside(TAIL_LIMIT);
    s
}

impl Summary {
    pub fn line(&self) -> String {
        format!(
            "lambda_inf={} (k={}) lambda_sup={} (k={}) tail={} interval=(1/50,3/5) verdict={}",
            fmt_f64(self.lambda_inf),
            self.argmin_k,
            fmt_f64(self.lambda_sup),
            self.argmax_k,
            fmt_f64(TAIL_LIMIT),
            if self.pass { "pass" } else { "fail" }
        )
    }
}

pub fn cmd_spectrum(k_max: usize, out: &OutDir) -> Result<(), Failure> {
    check_kmax(k_max)?;
    out.write_table("spectrum.csv", &HEADER, rows(k_max))?;
    let s = summary(k_max);
    out.write_json(
        "summary.json",
        &json!({
            "k_max": k_max,
            "lambda_inf": s.lambda_inf,
            "argmin_k": s.argmin_k,
            "lambda_sup": s.lambda_sup,
            "argmax_k": s.argmax_k,
            "tail_limit": TAIL_LIMIT,
            "interval": [LAMBDA_LOWER, LAMBDA_UPPER],
            "verdict": if s.pass { "pass" } else { "fail" },
        }),
    )?;
    println!("{}", s.line());
    if s.pass {
        Ok(())
    } else {
        Err(Failure::Bound(s.line()))
    }
}
