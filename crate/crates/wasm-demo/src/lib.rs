//! Browser bindings for the `padic-rmt` demo page.
//!
//! Every export takes plain strings and numbers and returns a JSON string, so the page needs
//! no generated TypeScript types. The `*_json` functions are the native entry points used by
//! the tests.

use num_traits::ToPrimitive;
use padic_rmt::ensembles::{EnsembleSpec, RngStream};
use padic_rmt::hall_littlewood::{
    kth_corner_distribution, lln_prediction, rational, SignatureDistribution,
};
use padic_rmt::processes::{lyapunov_at, run_coupled_trajectory, TrajectoryOptions};
use padic_rmt::{Prime, Signature};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Longest trajectory the page may request.
pub const MAX_STEPS: u64 = 2000;

#[derive(Debug, Serialize)]
pub struct CornerRow {
    pub signature: Vec<i64>,
    pub prob: String,
    pub approx: f64,
}

#[derive(Debug, Serialize)]
pub struct Prediction {
    pub exact: Vec<String>,
    pub approx: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct TrajectoryView {
    pub k: Vec<u64>,
    /// `lambda[i][k]`, one series per coordinate.
    pub lambda: Vec<Vec<i64>>,
    /// `λ(k_max) / k_max`.
    pub lyapunov: Vec<f64>,
    pub prediction: Prediction,
}

fn parse(signature: &str, p: u32) -> Result<(Signature, Prime), String> {
    let sig: Signature = signature.parse().map_err(|e| format!("{e}"))?;
    if sig.is_empty() {
        return Err("empty signature".into());
    }
    let prime = Prime::new(p as u64).map_err(|e| format!("{e}"))?;
    Ok((sig, prime))
}

fn predict(sig: &Signature, p: Prime) -> Result<Prediction, String> {
    let t = rational(1, p.get() as i64);
    let law = SignatureDistribution::point_mass(sig.clone());
    let exact = lln_prediction(&law, &t).map_err(|e| format!("{e}"))?;
    Ok(Prediction {
        approx: exact
            .iter()
            .map(|x| x.to_f64().unwrap_or(f64::NAN))
            .collect(),
        exact: exact.iter().map(|x| x.to_string()).collect(),
    })
}

pub fn corner_distribution_json(signature: &str, p: u32, level: usize) -> Result<String, String> {
    let (sig, prime) = parse(signature, p)?;
    let t = rational(1, prime.get() as i64);
    let law = kth_corner_distribution(&sig, level, &t).map_err(|e| format!("{e}"))?;
    let rows: Vec<CornerRow> = law
        .iter()
        .map(|(s, prob)| CornerRow {
            signature: s.parts().to_vec(),
            prob: prob.to_string(),
            approx: prob.to_f64().unwrap_or(f64::NAN),
        })
        .collect();
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

pub fn lln_prediction_json(signature: &str, p: u32) -> Result<String, String> {
    let (sig, prime) = parse(signature, p)?;
    serde_json::to_string(&predict(&sig, prime)?).map_err(|e| e.to_string())
}

pub fn simulate_json(signature: &str, p: u32, k_max: u32, seed: u32) -> Result<String, String> {
    let (sig, prime) = parse(signature, p)?;
    let k_max = k_max as u64;
    if k_max == 0 || k_max > MAX_STEPS {
        return Err(format!("steps must lie in 1..={MAX_STEPS}"));
    }
    let spec = EnsembleSpec::fixed(prime, sig.clone()).map_err(|e| format!("{e}"))?;
    let traj = run_coupled_trajectory(
        &spec,
        RngStream::new(seed as u64, 0),
        TrajectoryOptions::new(k_max),
    )
    .map_err(|e| format!("{e}"))?;
    let n = sig.len();
    let mut lambda = vec![Vec::with_capacity(traj.steps.len()); n];
    for rec in &traj.steps {
        for (i, x) in rec.lambda.parts().iter().enumerate() {
            lambda[i].push(*x);
        }
    }
    let last = traj.steps.last().expect("k_max ≥ 1");
    let view = TrajectoryView {
        k: traj.steps.iter().map(|r| r.k).collect(),
        lambda,
        lyapunov: lyapunov_at(&last.lambda, last.k)
            .iter()
            .map(|x| x.to_f64().unwrap_or(f64::NAN))
            .collect(),
        prediction: predict(&sig, prime)?,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = cornerDistribution)]
pub fn corner_distribution(signature: &str, p: u32, level: usize) -> Result<String, JsValue> {
    corner_distribution_json(signature, p, level).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = llnPrediction)]
pub fn lln_prediction_js(signature: &str, p: u32) -> Result<String, JsValue> {
    lln_prediction_json(signature, p).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn simulate(signature: &str, p: u32, steps: u32, seed: u32) -> Result<String, JsValue> {
    simulate_json(signature, p, steps, seed).map_err(|e| JsValue::from_str(&e))
}
