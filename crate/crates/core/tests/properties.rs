use padic_rmt::ensembles::{
    sample_bi_invariant, sample_haar_gl, DigitSource, EnsembleSpec, RngStream,
};
use padic_rmt::padic::{singular_numbers_via_minors, smith_singular_numbers, PadicMatrix, Prime};
use padic_rmt::processes::{run_coupled_trajectory, TrajectoryOptions};
use padic_rmt::Signature;
use proptest::prelude::*;

const PRECISION: u32 = 48;

fn signature(
    len: std::ops::RangeInclusive<usize>,
    lo: i64,
    hi: i64,
) -> impl Strategy<Value = Signature> {
    prop::collection::vec(lo..=hi, len).prop_map(Signature::from_unsorted)
}

fn prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5]).prop_map(|p| Prime::new(p).unwrap())
}

fn planted(lambda: &Signature, p: Prime, seed: u64) -> PadicMatrix {
    let n = lambda.len();
    sample_bi_invariant(lambda, n, n, p, PRECISION, &DigitSource::from_seed(seed)).unwrap()
}

fn sn(a: &PadicMatrix) -> Signature {
    smith_singular_numbers(a).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_agrees_with_minors(lambda in signature(1..=4, -3, 5), p in prime(), seed in any::<u64>()) {
        let n = lambda.len();
        let a = sample_bi_invariant(&lambda, n, n, p, 64, &DigitSource::from_seed(seed)).unwrap();
        prop_assert_eq!(sn(&a), lambda.clone());
        prop_assert_eq!(singular_numbers_via_minors(&a).unwrap(), lambda);
    }

    #[test]
    fn invariant_under_haar_multiplication(lambda in signature(1..=4, -2, 4), p in prime(), seed in any::<u64>()) {
        let n = lambda.len();
        let a = planted(&lambda, p, seed);
        let src = DigitSource::from_seed(seed ^ 0x5555);
        let u = sample_haar_gl(n, p, PRECISION, &src.child("left"));
        let v = sample_haar_gl(n, p, PRECISION, &src.child("right"));
        prop_assert_eq!(sn(&u.matmul(&a).unwrap().matmul(&v).unwrap()), sn(&a));
    }

    #[test]
    fn corners_interlace(lambda in signature(2..=4, -2, 4), p in prime(), seed in any::<u64>()) {
        let a = planted(&lambda, p, seed);
        for i in 1..lambda.len() {
            let upper = sn(&a.corner(i).unwrap());
            let lower = sn(&a.corner(i + 1).unwrap());
            prop_assert!(lower.interlaces(&upper), "{lower} vs {upper}");
        }
    }

    #[test]
    fn weight_is_additive(lambda in signature(1..=4, -2, 4), kappa in prop::collection::vec(-3i64..=6, 4), p in prime(), seed in any::<u64>()) {
        let n = lambda.len();
        let a = planted(&lambda, p, seed);
        let kappa = &kappa[..n];
        let scaled = a.scale_rows(kappa).unwrap();
        prop_assert_eq!(sn(&scaled).weight(), lambda.weight() + kappa.iter().sum::<i64>());
    }

    #[test]
    fn small_perturbations_keep_the_tail(lambda in signature(2..=4, 0, 4), k_raw in 0usize..4, lift in 1i64..4, p in prime(), seed in any::<u64>()) {
        let n = lambda.len();
        let k = k_raw % n + 1;
        let a = planted(&lambda, p, seed);
        let floor = lambda.part(k) + lift;
        let mu = Signature::from_unsorted((0..n as i64).map(|i| floor + i % 2).collect());
        let b = planted(&mu, p, seed.wrapping_add(1));
        let sum = sn(&a.add(&b).unwrap());
        for j in k..=n {
            prop_assert_eq!(sum.part(j), lambda.part(j));
        }
    }

    #[test]
    fn nonnegative_factors_raise_every_part(lambda in signature(1..=4, -2, 3), mu in signature(4..=4, 0, 3), p in prime(), seed in any::<u64>()) {
        let n = lambda.len();
        let a = planted(&lambda, p, seed);
        let mu = Signature::new(mu.parts()[..n].to_vec()).unwrap();
        let b = planted(&mu, p, seed.wrapping_mul(3).wrapping_add(7));
        let right = sn(&a.matmul(&b).unwrap());
        let left = sn(&b.matmul(&a).unwrap());
        for i in 1..=n {
            prop_assert!(right.part(i) >= lambda.part(i));
            prop_assert!(left.part(i) >= lambda.part(i));
        }
    }

    #[test]
    fn corner_weights_are_concave(lambda in signature(3..=4, -1, 4), p in prime(), seed in any::<u64>()) {
        let n = lambda.len();
        let a = planted(&lambda, p, seed);
        for i in 1..=n - 2 {
            let ai = a.corner(i).unwrap();
            let w = |m: &PadicMatrix| sn(m).weight();
            let lhs = w(&ai) - w(&a.corner(i + 1).unwrap());
            let rhs = w(&ai.delete_row(2).unwrap()) - w(&a.corner(i + 2).unwrap());
            prop_assert!(lhs >= rhs, "i={i}: {lhs} < {rhs}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trajectories_conserve_weight_and_respect_neighbours(lambda in signature(2..=3, 0, 2), p in prime(), seed in any::<u64>()) {
        let spec = EnsembleSpec::fixed(p, lambda).unwrap();
        let n = spec.n;
        let opts = TrajectoryOptions::new(25).with_interpolation(true);
        let traj = run_coupled_trajectory(&spec, RngStream::new(seed, 0), opts).unwrap();
        for rec in &traj.steps {
            prop_assert_eq!(rec.lambda.weight(), rec.v.sum());
            prop_assert_eq!(rec.v.len(), n);
            let levels = rec.interpolation.as_ref().unwrap();
            prop_assert_eq!(&levels[0], &rec.v);
            prop_assert_eq!(levels[n - 1].as_slice(), rec.lambda.parts());
            for j in 1..n {
                let (lo, hi) = (&levels[j - 1].0, &levels[j].0);
                prop_assert!(hi[n - j - 1] >= lo[n - j - 1]);
                for i in 1..=j {
                    prop_assert!(hi[n - j - 1 + i] <= lo[n - j - 1 + i]);
                }
            }
        }
    }
}
