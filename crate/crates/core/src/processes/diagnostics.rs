use serde::Serialize;

use super::{StepRecord, Trajectory};

/// Per-`i` series `v_i(k) − v_{i+1}(k+1) + SN(A_{k+1})_n`, `i = 1..n−1`.
pub fn split_margins(traj: &Trajectory) -> Vec<Vec<i64>> {
    collect_series(traj, |r| &r.split_margins.0)
}

/// The same series computed on the product process.
pub fn lambda_split_margins(traj: &Trajectory) -> Vec<Vec<i64>> {
    collect_series(traj, |r| &r.lambda_margins.0)
}

fn collect_series(traj: &Trajectory, pick: impl Fn(&StepRecord) -> &Vec<i64>) -> Vec<Vec<i64>> {
    let width = traj.n().saturating_sub(1);
    (0..width)
        .map(|i| traj.steps.iter().map(|r| pick(r)[i]).collect())
        .collect()
}

/// Finite-run proxy for divergence of the margins: the minimum over the last part of the
/// run must exceed the value at an earlier reference step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SplitCriterion {
    /// Reference step as a fraction `num/den` of the run length.
    pub reference: (u64, u64),
    /// Start of the window whose minimum is compared.
    pub window_start: (u64, u64),
}

impl Default for SplitCriterion {
    fn default() -> Self {
        SplitCriterion {
            reference: (1, 4),
            window_start: (1, 2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitReport {
    pub reference_values: Vec<i64>,
    pub window_minima: Vec<i64>,
    pub consistent: Vec<bool>,
    pub split_consistent: bool,
}

pub fn split_diagnostic(traj: &Trajectory, criterion: SplitCriterion) -> SplitReport {
    let series = split_margins(traj);
    let len = traj.steps.len() as u64;
    let last = len.saturating_sub(1);
    let at = |(num, den): (u64, u64)| (last * num / den.max(1)) as usize;
    let r = at(criterion.reference);
    let w = at(criterion.window_start);
    let mut report = SplitReport {
        reference_values: Vec::new(),
        window_minima: Vec::new(),
        consistent: Vec::new(),
        split_consistent: true,
    };
    for s in &series {
        let reference = s.get(r).copied().unwrap_or(0);
        let minimum = s[w.min(s.len().saturating_sub(1))..]
            .iter()
            .copied()
            .min()
            .unwrap_or(reference);
        let ok = minimum > reference;
        report.reference_values.push(reference);
        report.window_minima.push(minimum);
        report.consistent.push(ok);
        report.split_consistent &= ok;
    }
    report
}

/// Running maxima `M(T) = max_{k ≤ T} max_i |λ_i(k) − v_i(k)|` at `T = K/4, K/2, K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundedDifferenceProfile {
    pub checkpoints: [u64; 3],
    pub maxima: [i64; 3],
}

impl BoundedDifferenceProfile {
    pub fn new(k_max: u64) -> Self {
        BoundedDifferenceProfile {
            checkpoints: [k_max / 4, k_max / 2, k_max],
            maxima: [0; 3],
        }
    }

    pub fn observe(&mut self, rec: &StepRecord) {
        let d = rec
            .lambda
            .parts()
            .iter()
            .zip(&rec.v.0)
            .map(|(l, v)| (l - v).abs())
            .max()
            .unwrap_or(0);
        for (c, m) in self.checkpoints.iter().zip(self.maxima.iter_mut()) {
            if rec.k <= *c {
                *m = (*m).max(d);
            }
        }
    }

    /// `M(K) = M(K/2)`.
    pub fn stabilized(&self) -> bool {
        self.maxima[2] == self.maxima[1]
    }

    /// Strict growth across both halves.
    pub fn grew(&self) -> bool {
        self.maxima[0] < self.maxima[1] && self.maxima[1] < self.maxima[2]
    }
}

pub fn bounded_difference_profile(traj: &Trajectory) -> BoundedDifferenceProfile {
    let mut prof = BoundedDifferenceProfile::new(traj.metadata.k_max);
    for rec in &traj.steps {
        prof.observe(rec);
    }
    prof
}
