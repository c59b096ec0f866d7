use padic_rmt_wasm::{corner_distribution_json, lln_prediction_json, simulate_json, MAX_STEPS};
use serde_json::Value;

#[test]
fn corner_of_one_zero() {
    let rows: Value =
        serde_json::from_str(&corner_distribution_json("1,0", 2, 2).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let probs: Vec<(&str, f64)> = rows
        .iter()
        .map(|r| (r["prob"].as_str().unwrap(), r["approx"].as_f64().unwrap()))
        .collect();
    assert!(probs.contains(&("2/3", 2.0 / 3.0)));
    assert!(probs.contains(&("1/3", 1.0 / 3.0)));
}

#[test]
fn prediction_for_one_zero() {
    let v: Value = serde_json::from_str(&lln_prediction_json("1,0", 3).unwrap()).unwrap();
    let exact: Vec<&str> = v["exact"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert_eq!(exact.len(), 2);
    let sum: f64 = v["approx"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .sum();
    assert!((sum - 1.0).abs() < 1e-12);
}

#[test]
fn simulation_shape_and_determinism() {
    let a = simulate_json("2,1,0", 2, 200, 7).unwrap();
    assert_eq!(a, simulate_json("2,1,0", 2, 200, 7).unwrap());
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["k"].as_array().unwrap().len(), 201);
    let lambda = v["lambda"].as_array().unwrap();
    assert_eq!(lambda.len(), 3);
    let total: i64 = lambda
        .iter()
        .map(|s| s.as_array().unwrap()[200].as_i64().unwrap())
        .sum();
    assert_eq!(total, 3 * 200);
}

#[test]
fn bad_input_is_an_error() {
    assert!(corner_distribution_json("1,x", 2, 2).is_err());
    assert!(corner_distribution_json("1,0", 4, 2).is_err());
    assert!(corner_distribution_json("1,0", 2, 3).is_err());
    assert!(simulate_json("1,0", 2, 0, 1).is_err());
    assert!(simulate_json("1,0", 2, MAX_STEPS as u32 + 1, 1).is_err());
}
