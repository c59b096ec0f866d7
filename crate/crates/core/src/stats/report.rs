use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::ensembles::EnsembleSpec;
use crate::error::Result;
use crate::signature::Signature;

pub const REPORT_SCHEMA: &str = "experiment-report/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Lln,
    Clt,
    BoundedDifference,
}

/// One pass/fail line together with what it was judged against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub name: String,
    pub passed: bool,
    pub tolerance: f64,
    pub sample_size: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceComparison {
    /// Exact `LΣLᵀ`.
    pub target: Vec<Vec<String>>,
    pub empirical: Vec<Vec<f64>>,
    pub standard_error: Vec<Vec<f64>>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalityCheck {
    /// 1-based coordinate.
    pub coordinate: usize,
    pub skewness: f64,
    pub skewness_band: f64,
    pub excess_kurtosis: f64,
    pub kurtosis_band: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundedSummary {
    pub expect_split: bool,
    pub checkpoints: [u64; 3],
    pub stabilized_trials: u64,
    pub grew_trials: u64,
    pub largest_maxima: [i64; 3],
}

/// Wall-clock facts kept apart so the rest of the report is reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub runtime_seconds: f64,
    pub jobs: usize,
    pub version: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema: &'static str,
    pub kind: ExperimentKind,
    pub spec: EnsembleSpec,
    pub k_max: u64,
    pub trials: u64,
    pub master_seed: u64,
    /// Exact limits as rational strings, when known.
    pub prediction: Option<Vec<String>>,
    pub estimate: Vec<f64>,
    pub standard_error: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covariance: Option<CovarianceComparison>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub normality: Vec<NormalityCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounded: Option<BoundedSummary>,
    pub criteria: Vec<CriterionResult>,
    pub notes: Vec<String>,
    pub passed: bool,
    pub metadata: RunMetadata,
    #[serde(skip)]
    pub terminals: Vec<Signature>,
}

impl ExperimentReport {
    pub fn finish(&mut self) {
        self.passed = self.criteria.iter().all(|c| c.passed);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Human-readable summary, one line per criterion.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{:?} experiment: n={}, p={}, k_max={}, trials={}\n",
            self.kind,
            self.spec.n,
            self.spec.p.get(),
            self.k_max,
            self.trials
        );
        if let Some(pred) = &self.prediction {
            out += &format!("  prediction: ({})\n", pred.join(", "));
        }
        if !self.estimate.is_empty() {
            let est: Vec<String> = self
                .estimate
                .iter()
                .zip(&self.standard_error)
                .map(|(e, s)| format!("{e:.5} ± {s:.5}"))
                .collect();
            out += &format!("  estimate:   ({})\n", est.join(", "));
        }
        for c in &self.criteria {
            out += &format!(
                "  [{}] {}: {} (tolerance {}, n = {})\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail,
                c.tolerance,
                c.sample_size
            );
        }
        for note in &self.notes {
            out += &format!("  note: {note}\n");
        }
        out
    }

    /// Per-trial terminal `λ(k_max)`, one row per trial.
    pub fn write_terminals_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["trial".to_string()];
        header.extend((1..=self.spec.n).map(|i| format!("lambda_{i}")));
        w.write_record(&header)?;
        for (i, s) in self.terminals.iter().enumerate() {
            let mut row = vec![i.to_string()];
            row.extend(s.parts().iter().map(i64::to_string));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
