mod common;

use std::f64::consts::PI;

use common::{field, odd_field};
use mhd_spectral::fourier::{
    differentiate, hilbert, multiply, multiply_direct, multiply_fft, velocity_from_vorticity, FourierField, Grid,
    OddField,
};
use proptest::prelude::*;

fn mean_free(f: &FourierField) -> FourierField {
    let mut g = f.clone();
    g.cosines_mut()[0] = 0.0;
    g
}

proptest! {
    #[test]
    fn hilbert_squared_is_minus_identity_on_mean_free(f in field(40)) {
        let hh = hilbert(&hilbert(&f));
        prop_assert!(hh.max_abs_diff(&mean_free(&f).scaled(-1.0)) <= 1e-12);
    }

    #[test]
    fn hilbert_is_isometry_on_mean_free(f in field(40)) {
        let g = mean_free(&f);
        let h = hilbert(&g);
        prop_assert_eq!(h.n_max(), g.n_max());
        prop_assert!((h.coeff_norm_sq() - g.coeff_norm_sq()).abs() <= 1e-12 * (1.0 + g.coeff_norm_sq()));
    }

    #[test]
    fn fft_product_equals_convolution(f in field(32), g in field(32)) {
        let n = f.n_max() + g.n_max();
        let direct = multiply_direct(&f, &g, n);
        let fft = multiply_fft(&f, &g, n);
        prop_assert!(direct.max_abs_diff(&fft) <= 1e-12);
    }

    #[test]
    fn product_matches_pointwise_values(f in field(20), g in field(20), t in 0.0..(2.0 * PI)) {
        let p = multiply_direct(&f, &g, f.n_max() + g.n_max());
        let want = f.value_at(t) * g.value_at(t);
        prop_assert!((p.value_at(t) - want).abs() <= 1e-11);
    }

    #[test]
    fn truncated_product_keeps_low_modes(f in field(80), g in field(80)) {
        let n = f.n_max().max(g.n_max());
        let full = multiply_fft(&f, &g, 2 * n);
        prop_assert!(multiply(&f, &g).max_abs_diff(&full.resized(n)) <= 1e-11);
    }

    #[test]
    fn derivative_of_velocity_is_hilbert(f in field(40)) {
        let d = differentiate(&velocity_from_vorticity(&f));
        prop_assert!(d.max_abs_diff(&hilbert(&f)) <= 1e-14);
        prop_assert!(velocity_from_vorticity(&f).value_at(0.0).abs() <= 1e-12);
    }

    #[test]
    fn oddness_closure(a in odd_field(24), b in odd_field(24)) {
        let (a, b) = (a.field(), b.field());
        prop_assert!(max_sin(&hilbert(a)) == 0.0);
        prop_assert!(max_sin(&multiply(a, b)) <= 1e-13);
        prop_assert!(OddField::try_from(velocity_from_vorticity(a)).is_ok());
    }

    #[test]
    fn grid_roundtrip(f in field(30)) {
        let grid = Grid::new(Grid::dealiased_size(f.n_max(), f.n_max()));
        let back = grid.coefficients(&grid.samples(&f), f.n_max());
        prop_assert!(back.max_abs_diff(&f) <= 1e-13);
    }

    #[test]
    fn parseval_matches_quadrature(f in field(12)) {
        let m = 64;
        let quad: f64 = (0..m).map(|j| f.value_at(2.0 * PI * j as f64 / m as f64).powi(2)).sum::<f64>() * 2.0 * PI / m as f64;
        prop_assert!((f.l2_norm_sq() - quad).abs() <= 1e-10 * (1.0 + quad));
    }

    #[test]
    fn json_roundtrip(f in field(10)) {
        let s = serde_json::to_string(&f).unwrap();
        let g: FourierField = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(f, g);
    }
}

fn max_sin(f: &FourierField) -> f64 {
    f.sines().iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[test]
fn hilbert_of_basic_modes() {
    let s = FourierField::sin_mode(3, 2, 1.0);
    assert_eq!(hilbert(&s), FourierField::cos_mode(3, 2, -1.0));
    let c = FourierField::cos_mode(3, 3, 1.0);
    assert_eq!(hilbert(&c), FourierField::sin_mode(3, 3, 1.0));
    assert_eq!(hilbert(&FourierField::constant(3, 5.0)), FourierField::zeros(3));
}

#[test]
fn malformed_json_is_rejected() {
    assert!(serde_json::from_str::<FourierField>(r#"{"n_max":2,"sin":[1.0],"cos":[0,0,0]}"#).is_err());
    assert!(serde_json::from_str::<FourierField>(r#"{"n_max":1,"sin":[1.0],"cos":[0,0],"x":1}"#).is_err());
    assert!(serde_json::from_str::<FourierField>(r#"{"n_max":1,"sin":[1.0],"cos":[0,0]}"#).is_ok());
}
