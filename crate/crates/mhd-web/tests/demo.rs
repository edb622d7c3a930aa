use mhd_web::{decay_trace_json, linear_growth_json, spectrum_table_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn spectrum_table_has_the_known_extremes() {
    let v = parse(spectrum_table_json(200).unwrap());
    assert_eq!(floats(&v["a_k"]).len(), 200);
    assert_eq!(v["argmin_k"], 2);
    assert_eq!(v["argmax_k"], 1);
    assert_eq!(v["inside"], true);
    let a1 = floats(&v["a_k"])[0];
    assert!((a1 - 121.0 / 324.0).abs() < 1e-15);
    let (l1, l2) = (floats(&v["lambda_1"]), floats(&v["lambda_2"]));
    assert!(l1.iter().zip(&l2).all(|(a, b)| a <= b));
}

#[test]
fn spectrum_table_rejects_small_tables() {
    assert!(spectrum_table_json(3).is_err());
    assert!(spectrum_table_json(20_000).is_err());
}

#[test]
fn growth_sits_between_envelopes() {
    let v = parse(linear_growth_json(0.5, 5.0).unwrap());
    let (n, lo, hi) = (floats(&v["norm"]), floats(&v["lower"]), floats(&v["upper"]));
    assert_eq!(n.len(), lo.len());
    for i in 1..n.len() {
        assert!(n[i] * n[i] >= lo[i] * lo[i] * (1.0 - 1e-6));
        assert!(n[i] * n[i] <= hi[i] * hi[i] * (1.0 + 1e-8));
    }
    assert_eq!(v["verdict"], true);
}

#[test]
fn growth_rejects_inadmissible_data() {
    // e_{2,1} + 2e_{2,2}: 11/18 − 4·3/8 < 0
    assert!(linear_growth_json(2.0, 2.0).is_err());
    assert!(linear_growth_json(0.5, 0.0).is_err());
    assert!(linear_growth_json(f64::NAN, 1.0).is_err());
}

#[test]
fn decay_stays_below_the_bound() {
    for l in [1, 2, 5] {
        let v = parse(decay_trace_json(l, 6.0).unwrap());
        let (n, b) = (floats(&v["norm"]), floats(&v["bound"]));
        assert!(n.iter().zip(&b).all(|(x, y)| *x <= y + 1e-9), "l = {l}");
        assert!(v["fitted_rate"].as_f64().unwrap() <= -0.5 + 1e-9);
    }
    assert!(decay_trace_json(0, 1.0).is_err());
    assert!(decay_trace_json(1, 50.0).is_err());
}

#[test]
fn exported_wrappers_agree_with_the_json_functions() {
    assert_eq!(mhd_web::spectrum_table(10).unwrap(), spectrum_table_json(10).unwrap());
    assert_eq!(mhd_web::decay_trace(2, 1.0).unwrap(), decay_trace_json(2, 1.0).unwrap());
}
