mod common;

use common::basis_coeffs;
use mhd_spectral::analysis::{
    a_plus, diag_plus, energy_second_derivative, eps_plus, eps_plus_def, lambda_bounds, lplus_energy_derivative,
    operator_norm, partial_sum_diagnostics, q_operator_matrix, QuadFormMatrix, LAMBDA_LOWER, LAMBDA_UPPER,
};
use mhd_spectral::basis::{tridiagonal_l, BasisCoefficients, Sign};
use mhd_spectral::exact;
use mhd_spectral::experiments::integrate_banded;
use nalgebra::{DMatrix, Matrix2};
use proptest::prelude::*;

#[test]
fn eps_forms_agree_exactly() {
    for k in 1..=1000u64 {
        assert_eq!(exact::eps_plus_def(k), exact::eps_plus_closed(k), "k = {k}");
    }
    for k in 1..=1000usize {
        // the definition cancels terms of size k²/16
        assert!((eps_plus(k) - eps_plus_def(k)).abs() <= 1e-15 * (k * k) as f64);
    }
}

#[test]
fn quad_forms_are_uniformly_positive_definite() {
    for k in 1..=10_000 {
        let m = QuadFormMatrix::new(k);
        assert!(m.det() > 0.0 && m.trace() > 0.0, "k = {k}");
        let (l1, l2) = m.eigenvalues();
        for v in [m.a_k, l1, l2] {
            assert!(LAMBDA_LOWER < v && v < LAMBDA_UPPER, "k = {k}: {v}");
        }
    }
}

#[test]
fn closed_form_eigenvalues_match_dense_solver() {
    for k in [1usize, 2, 3, 5, 10, 50, 500, 5000] {
        let m = QuadFormMatrix::new(k);
        let a = Matrix2::new(m.a_k, m.eps_k, m.eps_k, m.a_k2);
        let mut ev: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let (l1, l2) = m.eigenvalues();
        assert!((ev[0] - l1).abs() < 1e-14 && (ev[1] - l2).abs() < 1e-14, "k = {k}");
    }
}

#[test]
fn bounds_report_extremes() {
    let b = lambda_bounds(10_000).unwrap();
    assert!(b.inside_paper_interval());
    let direct = (1..=10_000).flat_map(|k| {
        let m = QuadFormMatrix::new(k);
        let (l1, l2) = m.eigenvalues();
        [m.a_k, l1, l2]
    });
    let (lo, hi) = direct.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    assert_eq!((lo, hi), (b.lambda_inf, b.lambda_sup));
    assert!(b.monotone_from < 100, "monotone from {}", b.monotone_from);
    assert!((a_plus(100_000) - 0.25).abs() < 1e-4);
}

#[test]
fn a_k_matches_rational() {
    for k in 1..=200usize {
        let r = exact::a_plus(k as u64);
        let rf = *r.numer() as f64 / *r.denom() as f64;
        assert!((a_plus(k) - rf).abs() <= 1e-14 * rf);
    }
}

proptest! {
    #[test]
    fn partial_sums_reassemble(c in basis_coeffs(40, 40), n in 2usize..=40) {
        let op = tridiagonal_l(Sign::Plus, 2, 40).unwrap();
        let c_dot = op.apply(&c.c);
        let ps = partial_sum_diagnostics(&c.c, &c_dot, n).unwrap();
        let scale = 1.0 + ps.s_n.abs() + ps.q.iter().map(|x| x.abs()).sum::<f64>();
        prop_assert!((ps.s_n - ps.reassembled()).abs() <= 1e-12 * scale, "{} vs {}", ps.s_n, ps.reassembled());
        prop_assert!((ps.without_remainders() - ps.s_n + ps.r).abs() <= 1e-15 * scale);
    }

    #[test]
    fn quad_forms_dominate_smallest_eigenvalue(k in 1usize..10_000, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let m = QuadFormMatrix::new(k);
        let (l1, l2) = m.eigenvalues();
        let r2 = x * x + y * y;
        prop_assert!(m.form(x, y) >= l1 * r2 - 1e-15);
        prop_assert!(m.form(x, y) <= l2 * r2 + 1e-15);
    }

    #[test]
    fn energy_derivative_is_diagonal_form(c in basis_coeffs(30, 30)) {
        let op = tridiagonal_l(Sign::Plus, 2, 30).unwrap();
        let mc = op.apply(&c.c);
        let direct: f64 = mc.iter().zip(&c.c).map(|(a, b)| a * b).sum();
        prop_assert!((direct - lplus_energy_derivative(&c)).abs() < 1e-13);
    }
}

#[test]
fn second_derivative_inequality_along_trajectories() {
    let b = lambda_bounds(10_000).unwrap();
    let k = 126;
    let op = tridiagonal_l(Sign::Plus, 2, k).unwrap();
    let inits: Vec<Vec<f64>> = vec![
        BasisCoefficients::unit(2, k, 1).c,
        BasisCoefficients::unit(2, k, 2).c,
        (1..=k).map(|l| 1.0 / (l * l) as f64).collect(),
        (1..=k).map(|l| if l % 3 == 0 { -1.0 } else { 1.0 } / (l * l * l) as f64).collect(),
    ];
    for c0 in inits {
        integrate_banded(&op, &c0, 5.0, 1e-3, |t, c| {
            let n2: f64 = c.iter().map(|x| x * x).sum();
            let d2 = energy_second_derivative(&op, c);
            let slack = 1e-8 * n2;
            assert!(d2 >= 4.0 * b.lambda_inf * n2 - slack, "t = {t}: {d2} < 4λ_inf·{n2}");
            assert!(d2 <= 4.0 * b.lambda_sup * n2 + slack, "t = {t}: {d2} > 4λ_sup·{n2}");
        });
    }
}

#[test]
fn second_derivative_matches_dense_matrix() {
    let k = 20;
    let op = tridiagonal_l(Sign::Plus, 2, k).unwrap();
    let m = DMatrix::from_fn(k, k, |i, j| op.dense()[i][j]);
    let c = nalgebra::DVector::from_fn(k, |i, _| 1.0 / ((i + 1) as f64).powi(2));
    let mc = &m * &c;
    let mmc = &m * &mc;
    let want = 2.0 * (mc.norm_squared() + c.dot(&mmc));
    assert!((energy_second_derivative(&op, c.as_slice()) - want).abs() < 1e-13);
}

#[test]
fn diagonal_entries() {
    assert!((diag_plus(1) - 11.0 / 18.0).abs() < 1e-15);
    assert!((diag_plus(2) + 3.0 / 8.0).abs() < 1e-15);
}

#[test]
fn q_galerkin_matrix_is_not_uniformly_bounded() {
    // Q leaves a fixed O(1) residual outside the span and its truncated
    // matrices grow with K: the q-term is not a bounded perturbation on ℋ₂.
    let (g40, tail40) = q_operator_matrix(40);
    let (g80, tail80) = q_operator_matrix(80);
    assert!((tail40 - 4.0 / 3.0).abs() < 1e-9 && (tail80 - 4.0 / 3.0).abs() < 1e-9);
    let (n40, n80) = (operator_norm(&g40, 1e-12), operator_norm(&g80, 1e-12));
    assert!(n80 > 1.3 * n40, "{n40} vs {n80}");
}
