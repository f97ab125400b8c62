use cglmp_wasm::{bell_value_impl, region_impl, threshold_impl};

#[test]
fn pure_qutrit_value() {
    let v = bell_value_impl(3, "max-entangled", 1.0, -1.0).unwrap();
    assert!((v - 2.8729340511723382).abs() < 1e-10);
}

#[test]
fn filtered_threshold_json() {
    let text = threshold_impl(5, "max-entangled", 0.71).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!((v["q_star"].as_f64().unwrap() - 0.6059609854963913).abs() < 1e-6);
}

#[test]
fn region_marks_invalid_cells() {
    let cells = region_impl(3, "max-violating", 0.25, 4, 0.5, 3).unwrap();
    assert_eq!(cells.len(), 12);
    // q = 0.25 admits only ξ ≤ 0.5
    assert!(!cells[0].is_nan() && cells[1].is_nan() && cells[2].is_nan());
    assert!(cells[9..].iter().all(|v| v.is_finite()));
}

#[test]
fn bad_state_is_rejected() {
    assert!(bell_value_impl(3, "nope", 1.0, -1.0).is_err());
}
