use num_traits::{One, Zero};
use padic_rmt::ensembles::{
    sample_bi_invariant, DigitSource, EnsembleKind, EnsembleSpec, RngStream,
};
use padic_rmt::hall_littlewood::{
    b_lambda, corner_distribution, corner_weight_covariance, geometric_points, hl_p_eval,
    hl_p_symmetrized_oracle, hl_q_eval, hl_skew_eval, kth_corner_distribution,
    principal_specialization, rational, signatures_below, verify_corner_inequality,
    DistributionEntry, ExactScalar, SignatureDistribution,
};
use padic_rmt::padic::{singular_numbers_via_minors, smith_singular_numbers};
use padic_rmt::processes::{run_coupled_trajectory, TrajectoryOptions};
use padic_rmt::symplectic::{is_gsp, sample_haar_gsp};
use padic_rmt::{Prime, Signature};
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::SelftestArgs;

const GOLDEN: &str = include_str!("../../core/testdata/hl/corner_gaps_210_p2.json");

type Check = fn(&SelftestArgs) -> Result<String, String>;

fn checks() -> Vec<(&'static str, Check)> {
    vec![
        ("snf/smith-vs-minors", smith_vs_minors),
        ("hl/branching", branching),
        ("hl/symmetrized-oracle", symmetrized_oracle),
        ("hl/principal-specialization", principal),
        ("hl/q-normalization", q_normalization),
        ("hl/corner-law-10", corner_law_10),
        ("hl/golden-corner-gaps", golden),
        ("process/counterexample", counterexample),
        ("gsp/similitude", gsp_similitude),
    ]
}

pub fn run(args: &SelftestArgs) -> CliResult<()> {
    let selected: Vec<_> = checks()
        .into_iter()
        .filter(|(name, _)| args.filter.as_deref().map_or(true, |f| name.contains(f)))
        .collect();
    if selected.is_empty() {
        return Err(CliError::Usage(format!(
            "no check matches {:?}",
            args.filter
        )));
    }
    let mut failed = Vec::new();
    for (name, check) in selected {
        match check(args) {
            Ok(detail) => println!("[ok]   {name}: {detail}"),
            Err(detail) => {
                println!("[FAIL] {name}: {detail}");
                failed.push(name);
            }
        }
    }
    if failed.is_empty() {
        println!("all checks passed");
        Ok(())
    } else {
        Err(CliError::Numeric(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_signatures(n: usize, lo: i64, hi: i64) -> Vec<Signature> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                let top = prefix.last().copied().unwrap_or(hi);
                (lo..=top).map(move |v| [prefix.clone(), vec![v]].concat())
            })
            .collect();
    }
    out.into_iter()
        .filter_map(|v| Signature::new(v).ok())
        .collect()
}

fn small_signatures() -> Vec<Signature> {
    (1..=3).flat_map(|n| all_signatures(n, -2, 3)).collect()
}

fn points() -> Vec<ExactScalar> {
    vec![rational(2, 1), rational(1, 3), rational(-5, 7)]
}

fn smith_vs_minors(_: &SelftestArgs) -> Result<String, String> {
    let mut rng_seed = 0u64;
    let mut count = 0;
    for p in [2u64, 3, 5] {
        let p = Prime::new(p).map_err(|e| e.to_string())?;
        for lambda in (1..=3).flat_map(|n| all_signatures(n, -1, 3)).step_by(3) {
            let n = lambda.len();
            rng_seed += 1;
            let a = sample_bi_invariant(&lambda, n, n, p, 32, &DigitSource::from_seed(rng_seed))
                .map_err(|e| e.to_string())?;
            let s = smith_singular_numbers(&a).map_err(|e| e.to_string())?;
            let m = singular_numbers_via_minors(&a).map_err(|e| e.to_string())?;
            ensure(s == lambda && m == lambda, || {
                format!("planted {lambda}: smith {s}, minors {m}")
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} planted matrices"))
}

fn branching(_: &SelftestArgs) -> Result<String, String> {
    let x = points();
    let t = rational(1, 2);
    let sigs = small_signatures();
    for lambda in &sigs {
        let n = lambda.len();
        let whole = hl_p_eval(lambda, &x[..n], &t).map_err(|e| e.to_string())?;
        for k in 0..=n {
            let mut total = ExactScalar::zero();
            for mu in signatures_below(lambda, k) {
                let skew = hl_skew_eval(lambda, &mu, &x[k..n], &t).map_err(|e| e.to_string())?;
                total += skew * hl_p_eval(&mu, &x[..k], &t).map_err(|e| e.to_string())?;
            }
            ensure(total == whole, || format!("{lambda} split at {k}"))?;
        }
    }
    Ok(format!("{} signatures", sigs.len()))
}

fn symmetrized_oracle(_: &SelftestArgs) -> Result<String, String> {
    let x = points();
    let t = rational(1, 3);
    let sigs = small_signatures();
    for lambda in &sigs {
        let n = lambda.len();
        let a = hl_p_eval(lambda, &x[..n], &t).map_err(|e| e.to_string())?;
        let b = hl_p_symmetrized_oracle(lambda, &x[..n], &t).map_err(|e| e.to_string())?;
        ensure(a == b, || {
            format!("{lambda}: chains {a}, symmetrization {b}")
        })?;
    }
    Ok(format!("{} signatures", sigs.len()))
}

fn principal(_: &SelftestArgs) -> Result<String, String> {
    let sigs = small_signatures();
    for t in [rational(1, 2), rational(1, 5)] {
        for lambda in &sigs {
            let x = rational(3, 4);
            let pts: Vec<ExactScalar> = geometric_points(&t, 0, lambda.len())
                .into_iter()
                .map(|g| g * &x)
                .collect();
            let chains = hl_p_eval(lambda, &pts, &t).map_err(|e| e.to_string())?;
            let closed = principal_specialization(lambda, &x, &t);
            ensure(chains == closed, || {
                format!("{lambda} at t = {t}: {chains} vs {closed}")
            })?;
        }
    }
    Ok(format!("{} signatures, two values of t", sigs.len()))
}

fn q_normalization(_: &SelftestArgs) -> Result<String, String> {
    let t = rational(1, 2);
    let x = [rational(1, 3), rational(2, 5)];
    let q0 = hl_q_eval(&Signature::zeros(2), &x, &t).map_err(|e| e.to_string())?;
    ensure(q0.is_one(), || format!("Q of the zero signature is {q0}"))?;
    let b = b_lambda(&Signature::new(vec![1, 1]).map_err(|e| e.to_string())?, &t);
    ensure(b == rational(3, 8), || format!("b_(1,1)(1/2) = {b}"))?;
    Ok("Q_0 = 1, b_(1,1)(1/2) = 3/8".into())
}

fn corner_law_10(_: &SelftestArgs) -> Result<String, String> {
    let mu = Signature::new(vec![1, 0]).map_err(|e| e.to_string())?;
    let law = corner_distribution(&mu, &rational(1, 2)).map_err(|e| e.to_string())?;
    let one = Signature::new(vec![1]).map_err(|e| e.to_string())?;
    ensure(law.prob(&one) == rational(1, 3) && law.len() == 2, || {
        format!("{:?}", law.to_entries())
    })?;
    Ok("(1): 1/3, (0): 2/3".into())
}

#[derive(Deserialize)]
struct Golden {
    law: Vec<DistributionEntry>,
    p: i64,
    gaps: Vec<String>,
    corner_2: Vec<DistributionEntry>,
    corner_3: Vec<DistributionEntry>,
    sigma: Vec<Vec<String>>,
}

fn golden(args: &SelftestArgs) -> Result<String, String> {
    let (text, source) = match &args.golden {
        Some(path) => (
            std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?,
            path.display().to_string(),
        ),
        None => (GOLDEN.to_string(), "built-in copy".to_string()),
    };
    let g: Golden = serde_json::from_str(&text).map_err(|e| format!("{source}: {e}"))?;
    let t = rational(1, g.p);
    let law = SignatureDistribution::from_entries(&g.law).map_err(|e| e.to_string())?;
    let report = verify_corner_inequality(&law, &t).map_err(|e| e.to_string())?;
    let gaps: Vec<String> = report.gaps.iter().map(|x| x.to_string()).collect();
    ensure(gaps == g.gaps, || {
        format!("gaps {gaps:?}, golden {:?}", g.gaps)
    })?;
    let mu = law.support().next().ok_or("empty golden law")?.clone();
    for (k, expected) in [(2, &g.corner_2), (3, &g.corner_3)] {
        let got = kth_corner_distribution(&mu, k, &t)
            .map_err(|e| e.to_string())?
            .to_entries();
        ensure(&got == expected, || format!("corner {k}: {got:?}"))?;
    }
    let cov = corner_weight_covariance(&law, &t).map_err(|e| e.to_string())?;
    let sigma: Vec<Vec<String>> = cov
        .sigma
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect())
        .collect();
    ensure(sigma == g.sigma, || format!("sigma {sigma:?}"))?;
    Ok(format!("matches {source}"))
}

fn counterexample(_: &SelftestArgs) -> Result<String, String> {
    let spec = EnsembleSpec::new(
        Prime::new(2).map_err(|e| e.to_string())?,
        2,
        EnsembleKind::Counterexample,
    )
    .map_err(|e| e.to_string())?;
    let traj = run_coupled_trajectory(&spec, RngStream::new(0, 0), TrajectoryOptions::new(20))
        .map_err(|e| e.to_string())?;
    let powers = |top: i64| -> i64 { (0..=top).rev().step_by(2).map(|e| 1i64 << e).sum() };
    for rec in &traj.steps[1..] {
        let k = rec.k as i64;
        let expected = [powers(k - 1), if k >= 2 { powers(k - 2) } else { 0 }];
        ensure(rec.lambda.parts() == expected, || {
            format!("lambda({k}) = {}", rec.lambda)
        })?;
        ensure(rec.v.0 == [0, (1 << k) - 1], || {
            format!("v({k}) = {:?}", rec.v.0)
        })?;
    }
    Ok("k = 1..20".into())
}

fn gsp_similitude(_: &SelftestArgs) -> Result<String, String> {
    let p = Prime::new(3).map_err(|e| e.to_string())?;
    for seed in 0..20 {
        let g = sample_haar_gsp(2, p, 16, &DigitSource::from_seed(seed));
        let ok = is_gsp(&g.matrix).map_err(|e| e.to_string())?.is_some();
        ensure(ok, || format!("seed {seed} is not a similitude"))?;
    }
    Ok("20 Haar samples in GSp_4(Z_3)".into())
}
