use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_traits::ToPrimitive;
use padic_rmt::ensembles::{sample_bi_invariant, EnsembleKind, EnsembleSpec, RngStream};
use padic_rmt::hall_littlewood::{
    geometric_points, hl_q_eval, hl_skew_eval, kth_corner_distribution, ExactScalar,
};
use padic_rmt::padic::smith_singular_numbers;
use padic_rmt::processes::{
    lyapunov_estimates, run_coupled_trajectory, Trajectory, TrajectoryOptions,
};
use padic_rmt::stats::{
    run_bounded_difference_experiment, run_clt_experiment, run_lln_experiment, tv_distance,
    ExperimentConfig, SignatureHistogram,
};
use padic_rmt::{Prime, Signature};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::presets::Preset;
use crate::{CornerArgs, ExperimentArgs, GspArgs, HlArgs, SeedArgs, SimulateArgs, SpecArgs};

const DEFAULT_K_MAX: u64 = 1000;

pub fn resolve_seed(args: &SeedArgs) -> CliResult<u64> {
    if let Some(s) = args.seed {
        return Ok(s);
    }
    match std::env::var("PADIC_RMT_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|e| CliError::Usage(format!("PADIC_RMT_SEED={v:?} is not a seed: {e}"))),
        Err(_) => Ok(0),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> CliResult<BufWriter<fs::File>> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn parse_signature(s: &str) -> CliResult<Signature> {
    s.parse::<Signature>()
        .map_err(|e| CliError::Usage(format!("signature {s:?}: {e}")))
}

fn parse_rational(s: &str) -> CliResult<ExactScalar> {
    s.trim()
        .parse::<ExactScalar>()
        .map_err(|e| CliError::Usage(format!("{s:?} is not a rational: {e}")))
}

fn with_prime(mut spec: EnsembleSpec, p: Option<u64>) -> CliResult<EnsembleSpec> {
    if let Some(p) = p {
        spec.p = Prime::new(p)?;
        spec.validate()?;
    }
    Ok(spec)
}

/// The ensemble named on the command line, and the preset it came from if any.
fn resolve_spec(args: &SpecArgs) -> CliResult<(EnsembleSpec, Option<Preset>)> {
    if let Some(path) = &args.config {
        let spec = EnsembleSpec::from_json(&read(path)?)?;
        return Ok((with_prime(spec, args.p)?, None));
    }
    if let Some(preset) = args.preset {
        return Ok((preset.spec(args.p)?, Some(preset)));
    }
    if let Some(s) = &args.signature {
        let lambda = parse_signature(s)?;
        let p = Prime::new(args.p.unwrap_or(2))?;
        return Ok((EnsembleSpec::fixed(p, lambda)?, None));
    }
    Err(CliError::Usage(
        "no ensemble given: pass --config FILE, --preset NAME or --signature PARTS".into(),
    ))
}

fn decimals(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.5}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn lyapunov(traj: &Trajectory) -> CliResult<Vec<f64>> {
    Ok(lyapunov_estimates(traj)?
        .iter()
        .map(|x| x.to_f64().unwrap_or(f64::NAN))
        .collect())
}

fn write_trajectories(out: &Path, trajectories: &[Trajectory]) -> CliResult<()> {
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    for (i, t) in trajectories.iter().enumerate() {
        let mut w = create(&out.join(format!("trajectory_{i:04}.csv")))?;
        t.write_csv(&mut w)?;
        w.flush()?;
    }
    let meta: Vec<_> = trajectories.iter().map(|t| &t.metadata).collect();
    let mut w = create(&out.join("metadata.json"))?;
    serde_json::to_writer_pretty(&mut w, &meta).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn run_trajectories(
    spec: &EnsembleSpec,
    seed: u64,
    trials: u64,
    opts: TrajectoryOptions,
) -> CliResult<Vec<Trajectory>> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    (0..trials)
        .map(|i| Ok(run_coupled_trajectory(spec, RngStream::new(seed, i), opts)?))
        .collect()
}

fn print_trajectory_summary(i: usize, t: &Trajectory) -> CliResult<()> {
    let last = t.steps.last().expect("trajectories start at k = 0");
    println!(
        "trial {i}: k = {}, lambda = {}, v = {:?}, lyapunov = ({}), escalations = {}",
        last.k,
        last.lambda,
        last.v.0,
        decimals(&lyapunov(t)?),
        t.metadata.escalations.len()
    );
    Ok(())
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let (spec, preset) = resolve_spec(&args.spec)?;
    let seed = resolve_seed(&args.seed)?;
    let k_max = args
        .kmax
        .or_else(|| preset.and_then(Preset::default_k_max))
        .unwrap_or(DEFAULT_K_MAX);
    let opts = TrajectoryOptions::new(k_max).with_interpolation(args.with_interpolation);
    let trajectories = run_trajectories(&spec, seed, args.trials, opts)?;
    for (i, t) in trajectories.iter().enumerate() {
        print_trajectory_summary(i, t)?;
    }
    if let Some(out) = &args.out {
        write_trajectories(out, &trajectories)?;
        println!(
            "wrote {} trajectories to {}",
            trajectories.len(),
            out.display()
        );
    }
    Ok(())
}

pub fn gsp_simulate(args: &GspArgs) -> CliResult<()> {
    let p = args.p;
    let spec = match (&args.signature, args.haar) {
        (Some(s), _) => {
            let lambda = parse_signature(s)?;
            let n = lambda.len();
            EnsembleSpec::new(
                Prime::new(p.unwrap_or(2))?,
                n,
                EnsembleKind::GSpFixedSN(lambda),
            )?
        }
        (None, Some(h)) => {
            EnsembleSpec::new(Prime::new(p.unwrap_or(2))?, 2 * h, EnsembleKind::GSpHaar(h))?
        }
        (None, None) => Preset::Gsp4Demo.spec(p)?,
    };
    let seed = resolve_seed(&args.seed)?;
    let trajectories =
        run_trajectories(&spec, seed, args.trials, TrajectoryOptions::new(args.kmax))?;
    let mut unbalanced = 0;
    for (i, t) in trajectories.iter().enumerate() {
        print_trajectory_summary(i, t)?;
        unbalanced += t.steps.iter().filter(|r| !r.lambda.is_balanced()).count();
        let last = &t.steps.last().expect("non-empty").lambda;
        let n = last.len();
        let sums: Vec<i64> = (1..=n / 2)
            .map(|j| last.part(j) + last.part(n + 1 - j))
            .collect();
        println!("  pair sums lambda_i + lambda_(n+1-i): {sums:?}");
    }
    if let Some(out) = &args.out {
        write_trajectories(out, &trajectories)?;
    }
    if unbalanced > 0 {
        return Err(CliError::Numeric(format!(
            "{unbalanced} steps broke the balanced-pairs constraint"
        )));
    }
    println!("balanced pairs held at every step");
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub enum Experiment {
    Lln,
    Clt,
    BoundedDiff,
}

impl Experiment {
    fn defaults(self) -> (u64, u64) {
        match self {
            Experiment::Lln => (5000, 50),
            Experiment::Clt => (2000, 10_000),
            Experiment::BoundedDiff => (2000, 100),
        }
    }
}

fn experiment_config(kind: Experiment, args: &ExperimentArgs) -> CliResult<ExperimentConfig> {
    let (k_default, trials_default) = kind.defaults();
    let seed = resolve_seed(&args.seed)?;
    let from_file = match &args.spec.config {
        Some(path) => {
            let text = read(path)?;
            match ExperimentConfig::from_json(&text) {
                Ok(cfg) => Some(cfg),
                Err(_) => None,
            }
        }
        None => None,
    };
    let mut cfg = match from_file {
        Some(mut cfg) => {
            cfg.spec = with_prime(cfg.spec, args.spec.p)?;
            if args.seed.seed.is_some() {
                cfg.master_seed = seed;
            }
            cfg
        }
        None => {
            let (spec, preset) = resolve_spec(&args.spec)?;
            let k = preset.and_then(Preset::default_k_max).unwrap_or(k_default);
            let trials = match preset {
                Some(Preset::Counterexample) => 1,
                _ => trials_default,
            };
            ExperimentConfig::new(spec, k, trials, seed)
        }
    };
    if let Some(k) = args.kmax {
        cfg.k_max = k;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if args.jobs.is_some() {
        cfg.jobs = args.jobs;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn experiment(kind: Experiment, args: &ExperimentArgs) -> CliResult<()> {
    let cfg = experiment_config(kind, args)?;
    let report = match kind {
        Experiment::Lln => run_lln_experiment(&cfg)?,
        Experiment::Clt => run_clt_experiment(&cfg)?,
        Experiment::BoundedDiff => run_bounded_difference_experiment(&cfg)?,
    };
    print!("{}", report.summary());
    if let Some(path) = &args.out {
        let mut w = create(path)?;
        writeln!(w, "{}", report.to_json())?;
        w.flush()?;
    }
    if let Some(path) = &args.terminals {
        let mut w = create(path)?;
        report.write_terminals_csv(&mut w)?;
        w.flush()?;
    }
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Numeric("one or more criteria failed".into()))
    }
}

#[derive(Serialize)]
struct CornerRow {
    signature: Vec<i64>,
    prob: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    empirical: Option<f64>,
}

#[derive(Serialize)]
struct CornerTable {
    signature: Vec<i64>,
    p: u64,
    level: usize,
    rows: Vec<CornerRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tv_distance: Option<f64>,
}

pub fn corner_dist(args: &CornerArgs) -> CliResult<()> {
    let lambda = parse_signature(&args.signature)?;
    let p = Prime::new(args.p)?;
    let law = kth_corner_distribution(&lambda, args.level, &p.t())?;
    let histogram = match args.monte_carlo {
        Some(0) => {
            return Err(CliError::Usage(
                "--monte-carlo needs at least one sample".into(),
            ))
        }
        Some(samples) => {
            let stream = RngStream::new(resolve_seed(&args.seed)?, 0);
            let n = lambda.len();
            let precision = 24 + lambda.spread() as u32;
            let mut h = SignatureHistogram::new();
            for i in 0..samples {
                let a = sample_bi_invariant(&lambda, n, n, p, precision, &stream.step(i + 1))?;
                h.add(smith_singular_numbers(&a.corner(args.level)?)?);
            }
            Some(h)
        }
        None => None,
    };
    let tv = match &histogram {
        Some(h) => Some(tv_distance(h, &law)?.to_f64().unwrap_or(f64::NAN)),
        None => None,
    };
    let mut rows: Vec<CornerRow> = law
        .iter()
        .map(|(s, q)| CornerRow {
            signature: s.parts().to_vec(),
            prob: q.to_string(),
            empirical: histogram.as_ref().map(|h| h.frequency(s)),
        })
        .collect();
    if let Some(h) = &histogram {
        for (s, _) in h
            .counts
            .iter()
            .filter(|(s, _)| law.prob(s) == ExactScalar::default())
        {
            rows.push(CornerRow {
                signature: s.parts().to_vec(),
                prob: "0".into(),
                empirical: Some(h.frequency(s)),
            });
        }
    }
    if args.json {
        let table = CornerTable {
            signature: lambda.parts().to_vec(),
            p: p.get(),
            level: args.level,
            rows,
            samples: args.monte_carlo,
            tv_distance: tv,
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&table).expect("tables serialize")
        );
        return Ok(());
    }
    println!(
        "SN(A^({})) for SN(A) = {lambda}, p = {}",
        args.level,
        p.get()
    );
    for row in &rows {
        let exact = parse_rational(&row.prob)?.to_f64().unwrap_or(f64::NAN);
        let sig = Signature::new(row.signature.clone())?;
        match row.empirical {
            Some(e) => println!("{sig}\t{}\t{exact:.6}\t{e:.6}", row.prob),
            None => println!("{sig}\t{}\t{exact:.6}", row.prob),
        }
    }
    if let (Some(tv), Some(n)) = (tv, args.monte_carlo) {
        println!("total variation distance over {n} samples: {tv:.5}");
    }
    Ok(())
}

pub fn hl_eval(args: &HlArgs) -> CliResult<()> {
    let lambda = parse_signature(&args.signature)?;
    let mu = match &args.mu {
        Some(m) => parse_signature(m)?,
        None => Signature::empty(),
    };
    if args.q && !mu.is_empty() {
        return Err(CliError::Usage(
            "--q does not take a lower signature".into(),
        ));
    }
    let t = match &args.t {
        Some(t) => parse_rational(t)?,
        None => Prime::new(args.p)?.t(),
    };
    let count = lambda.len().saturating_sub(mu.len());
    let points: Vec<ExactScalar> = match (&args.points, &args.principal) {
        (Some(list), _) => list
            .split(',')
            .map(parse_rational)
            .collect::<CliResult<_>>()?,
        (None, Some(x)) => {
            let x = parse_rational(x)?;
            geometric_points(&t, 0, count)
                .into_iter()
                .map(|g| g * &x)
                .collect()
        }
        (None, None) => return Err(CliError::Usage("pass --points or --principal".into())),
    };
    let value = if args.q {
        hl_q_eval(&lambda, &points, &t)?
    } else {
        hl_skew_eval(&lambda, &mu, &points, &t)?
    };
    println!("{value}");
    println!("{:.12}", value.to_f64().unwrap_or(f64::NAN));
    Ok(())
}
