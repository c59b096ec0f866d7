use num_traits::{One, Signed, Zero};
use padic_rmt::hall_littlewood::*;
use padic_rmt::Signature;
use proptest::prelude::*;
use serde::Deserialize;

/// Every non-increasing sequence of length `n` with entries in `[lo, hi]`.
fn all_signatures(n: usize, lo: i64, hi: i64) -> Vec<Signature> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<i64>| {
                let top = prefix.last().copied().unwrap_or(hi);
                (lo..=top).map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|v| Signature::new(v).unwrap())
        .collect()
}

fn small_signatures(lo: i64, hi: i64) -> Vec<Signature> {
    (1..=4).flat_map(|n| all_signatures(n, lo, hi)).collect()
}

fn points() -> Vec<ExactScalar> {
    vec![
        rational(2, 1),
        rational(1, 3),
        rational(-5, 7),
        rational(3, 2),
    ]
}

#[test]
fn enumeration_sizes() {
    assert_eq!(all_signatures(2, 0, 1).len(), 3);
    assert_eq!(all_signatures(4, -2, 3).len(), 126);
}

#[test]
fn branching_consistency_exhaustive() {
    let x = points();
    for t in [rational(1, 2), rational(1, 3)] {
        for lambda in small_signatures(-2, 3) {
            let n = lambda.len();
            let oracle = hl_p_symmetrized_oracle(&lambda, &x[..n], &t).unwrap();
            assert_eq!(hl_p_eval(&lambda, &x[..n], &t).unwrap(), oracle, "{lambda}");
            for k in 0..=n {
                let mut total = ExactScalar::zero();
                for mu in signatures_below(&lambda, k) {
                    let skew = hl_skew_eval(&lambda, &mu, &x[k..n], &t).unwrap();
                    total += skew * hl_p_eval(&mu, &x[..k], &t).unwrap();
                }
                assert_eq!(total, oracle, "{lambda}, k = {k}");
            }
        }
    }
}

#[test]
fn symmetrized_oracle_equivalence_exhaustive() {
    let sets = [
        points(),
        vec![
            rational(1, 1),
            rational(1, 2),
            rational(1, 4),
            rational(1, 8),
        ],
        vec![
            rational(-3, 1),
            rational(7, 5),
            rational(2, 9),
            rational(11, 3),
        ],
    ];
    for t in [rational(1, 2), rational(1, 5)] {
        for x in &sets {
            for lambda in small_signatures(-2, 3) {
                let n = lambda.len();
                assert_eq!(
                    hl_p_eval(&lambda, &x[..n], &t).unwrap(),
                    hl_p_symmetrized_oracle(&lambda, &x[..n], &t).unwrap(),
                    "{lambda}"
                );
            }
        }
    }
}

#[test]
fn principal_specialization_exhaustive() {
    for t in [rational(1, 2), rational(1, 3), rational(1, 7)] {
        for x in [rational(1, 1), rational(3, 5), rational(-2, 1)] {
            for lambda in small_signatures(-2, 3) {
                let pts: Vec<ExactScalar> = geometric_points(&t, 0, lambda.len())
                    .into_iter()
                    .map(|g| g * &x)
                    .collect();
                assert_eq!(
                    principal_specialization(&lambda, &x, &t),
                    hl_p_eval(&lambda, &pts, &t).unwrap(),
                    "{lambda}"
                );
            }
        }
    }
}

#[test]
fn repeated_points_are_fine_for_chains() {
    let t = rational(1, 2);
    let one = rational(1, 1);
    let lam = Signature::new(vec![1, 0]).unwrap();
    assert_eq!(
        hl_p_eval(&lam, &[one.clone(), one.clone()], &t).unwrap(),
        rational(2, 1)
    );
    assert!(hl_p_symmetrized_oracle(&lam, &[one.clone(), one], &t).is_err());
}

#[test]
fn corner_laws_are_probability_distributions() {
    for t in [rational(1, 2), rational(1, 3)] {
        for mu in small_signatures(0, 3) {
            let n = mu.len();
            for k in 1..=n {
                // construction rejects totals other than one
                let law = kth_corner_distribution(&mu, k, &t).unwrap();
                assert!(law.iter().all(|(_, p)| p.is_positive()));
                assert!(law.support().all(|s| s.len() == n - k + 1));
            }
            let joint = joint_corner_distribution(&mu, &t).unwrap();
            let total = joint
                .iter()
                .fold(ExactScalar::zero(), |acc, c| acc + &c.prob);
            assert!(total.is_one());
            assert!(joint.iter().all(|c| c.prob.is_positive()));
        }
    }
}

#[test]
fn expected_weight_two_paths_agree() {
    let t = rational(1, 2);
    for mu in small_signatures(0, 3) {
        let law = SignatureDistribution::point_mass(mu.clone());
        for j in 1..=mu.len() {
            let a = expected_corner_weight(&law, j, &t).unwrap();
            let b = expected_corner_weight_direct(&law, j, &t).unwrap();
            assert_eq!(a, b, "{mu}, j = {j}");
            let pgf = corner_weight_pgf(&mu, j, &t).unwrap();
            assert!(pgf.at_one().is_one());
        }
    }
}

#[test]
fn constant_signatures() {
    let t = rational(1, 3);
    for c in [-2i64, 0, 3] {
        let mu = Signature::constant(c, 3);
        let law = SignatureDistribution::point_mass(mu.clone());
        for j in 1..=3 {
            assert_eq!(
                expected_corner_weight(&law, j, &t).unwrap(),
                rational(c * (3 - j as i64 + 1), 1)
            );
        }
        assert_eq!(lln_prediction(&law, &t).unwrap(), vec![rational(c, 1); 3]);
        let cov = corner_weight_covariance(&law, &t).unwrap();
        assert!(cov.sigma.iter().flatten().all(Zero::is_zero));
    }
}

#[test]
fn shift_covariance() {
    let t = rational(1, 2);
    for mu in small_signatures(0, 2) {
        let n = mu.len();
        for c in [-3i64, 2] {
            let shifted = mu.shifted(c);
            for k in 1..=n {
                assert_eq!(
                    kth_corner_distribution(&shifted, k, &t).unwrap(),
                    kth_corner_distribution(&mu, k, &t).unwrap().shifted(c)
                );
                let base =
                    expected_corner_weight(&SignatureDistribution::point_mass(mu.clone()), k, &t)
                        .unwrap();
                let moved = expected_corner_weight(
                    &SignatureDistribution::point_mass(shifted.clone()),
                    k,
                    &t,
                )
                .unwrap();
                assert_eq!(moved - base, rational((n - k + 1) as i64 * c, 1));
            }
        }
    }
}

#[test]
fn covariance_is_positive_semidefinite() {
    for p in [2i64, 3] {
        let t = rational(1, p);
        for mu in small_signatures(0, 2).into_iter().filter(|m| m.len() >= 2) {
            let cov = corner_weight_covariance(&SignatureDistribution::point_mass(mu.clone()), &t)
                .unwrap();
            for m in [&cov.sigma, &cov.l_sigma_lt] {
                for minor in leading_principal_minors(m) {
                    assert!(!minor.is_negative(), "{mu}: {minor}");
                }
            }
        }
    }
}

#[test]
fn q_normalization_golden_values() {
    let t = rational(1, 2);
    let x = [rational(1, 3), rational(2, 5), rational(3, 7)];
    assert!(hl_q_eval(&Signature::zeros(3), &x, &t).unwrap().is_one());
    let q11 = hl_q_eval(&Signature::new(vec![1, 1]).unwrap(), &x[..2], &t).unwrap();
    assert_eq!(q11, rational(1, 2) * rational(3, 4) * &x[0] * &x[1]);
    assert!(cauchy_kernel(&x, &[], &t).unwrap().is_one());
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

#[test]
fn golden_corner_gaps() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/testdata/hl/corner_gaps_210_p2.json"
    ))
    .unwrap();
    let g: Golden = serde_json::from_str(&text).unwrap();
    let t = rational(1, g.p);
    let law = SignatureDistribution::from_entries(&g.law).unwrap();
    let report = verify_corner_inequality(&law, &t).unwrap();
    let gaps: Vec<String> = report.gaps.iter().map(|x| x.to_string()).collect();
    assert_eq!(gaps, g.gaps);
    assert!(report.strict);
    let mu = law.support().next().unwrap().clone();
    assert_eq!(
        kth_corner_distribution(&mu, 2, &t).unwrap().to_entries(),
        g.corner_2
    );
    assert_eq!(
        kth_corner_distribution(&mu, 3, &t).unwrap().to_entries(),
        g.corner_3
    );
    let cov = corner_weight_covariance(&law, &t).unwrap();
    let sigma: Vec<Vec<String>> = cov
        .sigma
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect())
        .collect();
    assert_eq!(sigma, g.sigma);
}

fn distinct_points(n: usize) -> impl Strategy<Value = Vec<ExactScalar>> {
    prop::collection::vec((-9i64..=9, 1i64..=6), n)
        .prop_map(|v| {
            v.into_iter()
                .map(|(a, b)| rational(a, b))
                .collect::<Vec<_>>()
        })
        .prop_filter("distinct and nonzero", |v: &Vec<ExactScalar>| {
            v.iter().all(|x| !x.is_zero())
                && (0..v.len()).all(|i| (i + 1..v.len()).all(|j| v[i] != v[j]))
        })
}

fn signature_and_points() -> impl Strategy<Value = (Signature, Vec<ExactScalar>)> {
    (1usize..=4).prop_flat_map(|n| {
        (
            prop::collection::vec(-2i64..=3, n).prop_map(Signature::from_unsorted),
            distinct_points(n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn chains_match_symmetrization((lambda, x) in signature_and_points(), q in 2i64..=7) {
        let t = rational(1, q);
        prop_assert_eq!(
            hl_p_eval(&lambda, &x, &t).unwrap(),
            hl_p_symmetrized_oracle(&lambda, &x, &t).unwrap()
        );
    }

    #[test]
    fn skew_weight_shift((lambda, x) in signature_and_points(), c in -2i64..=2) {
        let t = rational(1, 3);
        let n = lambda.len();
        let mu = Signature::new(lambda.parts()[..n.saturating_sub(1)].to_vec()).unwrap();
        let k = n - mu.len();
        let base = hl_skew_eval(&lambda, &mu, &x[..k], &t).unwrap();
        let moved = hl_skew_eval(&lambda.shifted(c), &mu.shifted(c), &x[..k], &t).unwrap();
        let factor = x[..k].iter().fold(ExactScalar::one(), |acc, xi| acc * rational_pow(xi, c));
        prop_assert_eq!(moved, base * factor);
    }
}
