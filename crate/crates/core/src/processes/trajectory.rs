use std::io::Write;

use serde::Serialize;

use super::{interpolation_step, product_step, v_from_cumulative, InterpolatingState};
use crate::ensembles::{draw_step_matrix, EnsembleSpec, RngStream};
use crate::error::{Error, Result};
use crate::padic::{smith_singular_numbers, PadicMatrix};
use crate::signature::{IntVector, Signature};

pub const CSV_SCHEMA: &str = "trajectory/v1";

/// One row of a trajectory. Margins at `k` look one step ahead, at `A_{k+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub k: u64,
    pub lambda: Signature,
    pub v: IntVector,
    /// `|SN(A_k^{(i)})|` for `i = 1..n`; zero at `k = 0`.
    pub corner_weights: IntVector,
    /// `v_i(k) − v_{i+1}(k+1) + SN(A_{k+1})_n`.
    pub split_margins: IntVector,
    /// The same margins evaluated on `λ`.
    pub lambda_margins: IntVector,
    /// `SN(A_k)_n`; zero at `k = 0`.
    pub sn_last: i64,
    /// `λ^{(1)}(k), …, λ^{(n)}(k)` when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interpolation: Option<Vec<IntVector>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Escalation {
    pub k: u64,
    pub from: u32,
    pub to: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrajectoryOptions {
    pub k_max: u64,
    pub with_interpolation: bool,
    /// Number of precision doublings allowed for a single step.
    pub max_escalations: u32,
}

impl TrajectoryOptions {
    pub fn new(k_max: u64) -> Self {
        TrajectoryOptions {
            k_max,
            with_interpolation: false,
            max_escalations: 6,
        }
    }

    pub fn with_interpolation(mut self, on: bool) -> Self {
        self.with_interpolation = on;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrajectoryMetadata {
    pub schema: &'static str,
    pub spec: EnsembleSpec,
    pub master_seed: u64,
    pub stream_index: u64,
    pub k_max: u64,
    pub with_interpolation: bool,
    pub escalations: Vec<Escalation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trajectory {
    pub metadata: TrajectoryMetadata,
    pub steps: Vec<StepRecord>,
}

struct StepData {
    lambda: Signature,
    weights: IntVector,
    sn_last: i64,
    interpolation: Option<Vec<InterpolatingState>>,
}

/// Streaming coupled run: each `A_k` is drawn once and drives both `λ` and `v`.
pub struct CoupledRun {
    spec: EnsembleSpec,
    stream: RngStream,
    opts: TrajectoryOptions,
    k: u64,
    lambda: Signature,
    cumulative: Vec<i64>,
    weights: IntVector,
    sn_last: i64,
    interpolation: Option<Vec<InterpolatingState>>,
    escalations: Vec<Escalation>,
    finished: bool,
}

impl CoupledRun {
    pub fn new(spec: &EnsembleSpec, stream: RngStream, opts: TrajectoryOptions) -> Result<Self> {
        spec.validate()?;
        let n = spec.n;
        let interpolation = if opts.with_interpolation {
            Some(
                (1..=n)
                    .map(|j| InterpolatingState::initial(j, n))
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        Ok(CoupledRun {
            spec: spec.clone(),
            stream,
            opts,
            k: 0,
            lambda: Signature::zeros(n),
            cumulative: vec![0; n],
            weights: IntVector::zeros(n),
            sn_last: 0,
            interpolation,
            escalations: Vec::new(),
            finished: false,
        })
    }

    pub fn escalations(&self) -> &[Escalation] {
        &self.escalations
    }

    fn base_precision(&self, k: u64) -> u32 {
        let mut spread = self.lambda.spread();
        if let Some(levels) = &self.interpolation {
            for s in levels {
                if let Ok(b) = s.bottom() {
                    spread = spread.max(b.spread());
                }
            }
        }
        let step = self.spec.step_spread(k).unwrap_or(0);
        let total = spread + step + self.spec.precision_base as i64;
        u32::try_from(total).unwrap_or(u32::MAX)
    }

    fn compute(
        &self,
        a: &PadicMatrix,
        v_next: impl Fn(&IntVector) -> IntVector,
    ) -> Result<StepData> {
        let sn = smith_singular_numbers(a)?;
        let mut weights = vec![sn.weight()];
        for i in 2..=a.rows() {
            weights.push(smith_singular_numbers(&a.corner(i)?)?.weight());
        }
        let weights = IntVector(weights);
        let lambda = product_step(&self.lambda, a)?;
        let interpolation = match &self.interpolation {
            None => None,
            Some(levels) => {
                let v = v_next(&weights);
                Some(
                    levels
                        .iter()
                        .map(|s| interpolation_step(s, &v, a))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
        };
        Ok(StepData {
            sn_last: sn.last().unwrap_or(0),
            lambda,
            weights,
            interpolation,
        })
    }

    /// Draws `A_{k+1}`, doubling the precision on exhaustion.
    fn next_step(&mut self) -> Result<StepData> {
        let k = self.k + 1;
        let src = self.stream.step(k);
        let mut precision = self.base_precision(k);
        let cumulative = self.cumulative.clone();
        let v_next = move |w: &IntVector| {
            let c: Vec<i64> = cumulative.iter().zip(&w.0).map(|(a, b)| a + b).collect();
            v_from_cumulative(&c)
        };
        for attempt in 0..=self.opts.max_escalations {
            let outcome = draw_step_matrix(&self.spec, k, &src, precision)
                .and_then(|a| self.compute(&a, &v_next));
            match outcome {
                Err(Error::PrecisionExhausted { .. }) if attempt < self.opts.max_escalations => {
                    let to = precision.saturating_mul(2);
                    self.escalations.push(Escalation {
                        k,
                        from: precision,
                        to,
                    });
                    precision = to;
                }
                other => return other,
            }
        }
        Err(Error::PrecisionExhausted { precision })
    }

    fn v(&self) -> IntVector {
        v_from_cumulative(&self.cumulative)
    }

    fn margins(current: &[i64], next: &[i64], sn_next_last: i64) -> IntVector {
        IntVector(
            (0..current.len().saturating_sub(1))
                .map(|i| current[i] - next[i + 1] + sn_next_last)
                .collect(),
        )
    }

    /// Produces the record for the current step and advances to the next one.
    pub fn next_record(&mut self) -> Option<Result<StepRecord>> {
        if self.finished || self.k > self.opts.k_max {
            return None;
        }
        let data = match self.next_step() {
            Ok(d) => d,
            Err(e) => {
                self.finished = true;
                return Some(Err(e));
            }
        };
        let v_now = self.v();
        let next_cumulative: Vec<i64> = self
            .cumulative
            .iter()
            .zip(&data.weights.0)
            .map(|(a, b)| a + b)
            .collect();
        let v_next = v_from_cumulative(&next_cumulative);
        let record = StepRecord {
            k: self.k,
            lambda: self.lambda.clone(),
            split_margins: Self::margins(&v_now.0, &v_next.0, data.sn_last),
            lambda_margins: Self::margins(self.lambda.parts(), data.lambda.parts(), data.sn_last),
            v: v_now,
            corner_weights: self.weights.clone(),
            sn_last: self.sn_last,
            interpolation: self
                .interpolation
                .as_ref()
                .map(|levels| levels.iter().map(|s| s.lambda_j.clone()).collect()),
        };
        self.k += 1;
        self.lambda = data.lambda;
        self.cumulative = next_cumulative;
        self.weights = data.weights;
        self.sn_last = data.sn_last;
        self.interpolation = data.interpolation;
        Some(Ok(record))
    }

    pub fn metadata(&self) -> TrajectoryMetadata {
        TrajectoryMetadata {
            schema: CSV_SCHEMA,
            spec: self.spec.clone(),
            master_seed: self.stream.master_seed,
            stream_index: self.stream.stream_index,
            k_max: self.opts.k_max,
            with_interpolation: self.opts.with_interpolation,
            escalations: self.escalations.clone(),
        }
    }
}

impl Iterator for CoupledRun {
    type Item = Result<StepRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_record()
    }
}

/// The product process alone, for runs that never look at corners.
pub struct ProductRun {
    spec: EnsembleSpec,
    stream: RngStream,
    max_escalations: u32,
    k: u64,
    lambda: Signature,
    escalations: Vec<Escalation>,
}

impl ProductRun {
    pub fn new(spec: &EnsembleSpec, stream: RngStream) -> Result<Self> {
        spec.validate()?;
        Ok(ProductRun {
            spec: spec.clone(),
            stream,
            max_escalations: TrajectoryOptions::new(0).max_escalations,
            k: 0,
            lambda: Signature::zeros(spec.n),
            escalations: Vec::new(),
        })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn lambda(&self) -> &Signature {
        &self.lambda
    }

    pub fn escalations(&self) -> &[Escalation] {
        &self.escalations
    }

    /// Multiplies in `A_{k+1}` and returns `λ(k+1)`.
    pub fn advance(&mut self) -> Result<&Signature> {
        let k = self.k + 1;
        let src = self.stream.step(k);
        let step = self.spec.step_spread(k).unwrap_or(0);
        let base = self.lambda.spread() + step + self.spec.precision_base as i64;
        let mut precision = u32::try_from(base).unwrap_or(u32::MAX);
        for attempt in 0..=self.max_escalations {
            let outcome = draw_step_matrix(&self.spec, k, &src, precision)
                .and_then(|a| product_step(&self.lambda, &a));
            match outcome {
                Ok(next) => {
                    self.lambda = next;
                    self.k = k;
                    return Ok(&self.lambda);
                }
                Err(Error::PrecisionExhausted { .. }) if attempt < self.max_escalations => {
                    let to = precision.saturating_mul(2);
                    self.escalations.push(Escalation {
                        k,
                        from: precision,
                        to,
                    });
                    precision = to;
                }
                Err(e) => return Err(e),
            }
        }
        Err(Error::PrecisionExhausted { precision })
    }

    /// Advances until step `k`.
    pub fn run_to(&mut self, k: u64) -> Result<&Signature> {
        while self.k < k {
            self.advance()?;
        }
        Ok(&self.lambda)
    }
}

/// Runs `k = 0..=k_max` and keeps every record.
pub fn run_coupled_trajectory(
    spec: &EnsembleSpec,
    stream: RngStream,
    opts: TrajectoryOptions,
) -> Result<Trajectory> {
    if opts.k_max == 0 {
        return Err(Error::InvalidSpec("k_max must be at least 1".into()));
    }
    let mut run = CoupledRun::new(spec, stream, opts)?;
    let mut steps = Vec::with_capacity(opts.k_max as usize + 1);
    for rec in run.by_ref() {
        steps.push(rec?);
    }
    Ok(Trajectory {
        metadata: run.metadata(),
        steps,
    })
}

impl Trajectory {
    pub fn n(&self) -> usize {
        self.metadata.spec.n
    }

    pub fn csv_header(n: usize) -> Vec<String> {
        let mut h = vec!["k".to_string()];
        h.extend((1..=n).map(|i| format!("lambda_{i}")));
        h.extend((1..=n).map(|i| format!("v_{i}")));
        h.extend((1..=n).map(|i| format!("w_{i}")));
        h.extend((1..n).map(|i| format!("margin_{i}")));
        h.push("sn_last".into());
        h
    }

    pub fn csv_row(rec: &StepRecord) -> Vec<String> {
        let mut row = vec![rec.k.to_string()];
        row.extend(rec.lambda.parts().iter().map(i64::to_string));
        row.extend(rec.v.0.iter().map(i64::to_string));
        row.extend(rec.corner_weights.0.iter().map(i64::to_string));
        row.extend(rec.split_margins.0.iter().map(i64::to_string));
        row.push(rec.sn_last.to_string());
        row
    }

    /// Writes `# schema=…` followed by the CSV table.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# schema={CSV_SCHEMA}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::csv_header(self.n()))?;
        for rec in &self.steps {
            w.write_record(Self::csv_row(rec))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::EnsembleKind;
    use crate::padic::Prime;

    #[test]
    fn counterexample_formulas() {
        let spec =
            EnsembleSpec::new(Prime::new(2).unwrap(), 2, EnsembleKind::Counterexample).unwrap();
        let t =
            run_coupled_trajectory(&spec, RngStream::new(0, 0), TrajectoryOptions::new(6)).unwrap();
        assert_eq!(t.steps[3].lambda.parts(), &[5, 2]);
        assert_eq!(t.steps[3].v.0, vec![0, 7]);
        assert_eq!(t.steps[0].lambda, Signature::zeros(2));
        assert_eq!(t.steps.len(), 7);
    }

    #[test]
    fn product_run_matches_coupled_run() {
        let spec = EnsembleSpec::fixed(
            Prime::new(2).unwrap(),
            Signature::new(vec![2, 1, 0]).unwrap(),
        )
        .unwrap();
        let t = run_coupled_trajectory(&spec, RngStream::new(9, 4), TrajectoryOptions::new(30))
            .unwrap();
        let mut run = ProductRun::new(&spec, RngStream::new(9, 4)).unwrap();
        for rec in &t.steps[1..] {
            assert_eq!(run.advance().unwrap(), &rec.lambda);
        }
    }

    #[test]
    fn csv_layout() {
        let spec = EnsembleSpec::fixed(Prime::new(3).unwrap(), Signature::new(vec![1, 0]).unwrap())
            .unwrap();
        let t =
            run_coupled_trajectory(&spec, RngStream::new(1, 0), TrajectoryOptions::new(3)).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# schema=trajectory/v1"));
        assert_eq!(
            lines.next(),
            Some("k,lambda_1,lambda_2,v_1,v_2,w_1,w_2,margin_1,sn_last")
        );
        assert_eq!(lines.count(), 4);
    }
}
