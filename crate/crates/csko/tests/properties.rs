use num::bigint::BigUint;
use num::traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use corrko_core::adversarial::{gen_2point, gen_random};
use corrko_core::rational::{int, ratio};
use corrko_core::{opt_adaptive, CorrKOInstance, OracleCaps, Rational};
use corrko_csko::decompose::{decompose_difficult, prob_large};
use corrko_csko::randomized::thinned_start_prob;
use corrko_csko::{okd_to_tcsko, poly_logw, tcsko_to_okd, KnapSolver, PolyMode, PolyOptions, RandomizedPolicy};

fn small_instance() -> impl Strategy<Value = CorrKOInstance> {
    (2usize..=5, 0u64..=6, 1u64..=8, 1usize..=3, any::<u64>())
        .prop_map(|(n, b, w, k, seed)| gen_random(n, b, w, k, seed).unwrap())
}

fn is_subsequence(sub: &[usize], of: &[usize]) -> bool {
    let mut it = of.iter();
    sub.iter().all(|v| it.any(|w| w == v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn policies_never_beat_the_optimum(inst in small_instance()) {
        let opt = opt_adaptive(&inst, OracleCaps::default()).unwrap().0;
        let run = poly_logw(&inst, PolyOptions { solver: KnapSolver::Exact, mode: PolyMode::Randomized }).unwrap();
        prop_assert!(run.value() <= &opt);
        prop_assert!(run.value() >= &Rational::zero());
    }

    #[test]
    fn samples_are_rooted_subsequences(inst in small_instance(), seed in any::<u64>()) {
        let run = poly_logw(&inst, PolyOptions::default()).unwrap();
        let path = &run.levels[run.best].path;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..8 {
            let s = run.policy().sample(&mut rng);
            prop_assert_eq!(s.sequence[0], inst.root());
            prop_assert!(is_subsequence(&s.sequence, path));
            s.check(&inst).unwrap();
        }
    }

    #[test]
    fn mixture_value_is_linear(inst in small_instance(), a in 1i64..10, b in 1i64..10) {
        let run = poly_logw(&inst, PolyOptions::default()).unwrap();
        let p = run.policy().clone();
        let q = RandomizedPolicy::root_only(&inst);
        let mix = RandomizedPolicy::mix(vec![(int(a), p.clone()), (int(b), q)]);
        let expect = p.exact_value(&inst).unwrap() * ratio(a, a + b);
        prop_assert_eq!(mix.exact_value(&inst).unwrap(), expect);
    }

    #[test]
    fn start_probability_is_monotone_and_capped(inst in small_instance(), keep_num in 1i64..=4) {
        let keep = ratio(keep_num, 4);
        let path: Vec<usize> = std::iter::once(inst.root())
            .chain(inst.non_root().filter(|&v| inst.d(inst.root(), v) * 2 <= inst.b()).take(3))
            .collect();
        for pos in 0..path.len() {
            let mut prev = Rational::zero();
            let mut t = BigUint::zero();
            while &t <= inst.w() {
                let p = thinned_start_prob(&inst, &path, &keep, pos, &t);
                t += 1u32;
                prop_assert!(p >= prev);
                let cap = if pos == 0 { Rational::one() } else { keep.clone() };
                prop_assert!(p <= cap);
                prev = p;
            }
        }
    }

    #[test]
    fn decomposition_splits_rewards_pointwise(inst in small_instance()) {
        let d = decompose_difficult(&inst);
        let half = ratio(1, 2);
        let mut seen = vec![0usize; inst.n()];
        for (sub, rare) in [(&d.rare_large, true), (&d.heavy, false)] {
            for (i, &v) in sub.ids.iter().enumerate().skip(1) {
                seen[v] += 1;
                prop_assert_eq!(prob_large(&inst, v) <= half, rare);
                let orig = inst.dist(v).atoms();
                let large = sub.inst.dist(i).atoms();
                let small = d.small.dist(v).atoms();
                prop_assert_eq!(orig.len(), large.len());
                for k in 0..orig.len() {
                    prop_assert_eq!(&large[k].reward + &small[k].reward, orig[k].reward.clone());
                }
            }
        }
        for v in inst.non_root() {
            prop_assert!(seen[v] <= 1);
            if seen[v] == 0 {
                prop_assert_eq!(d.small.dist(v), inst.dist(v));
            }
        }
    }

    #[test]
    fn two_point_maps_are_inverse(n in 2usize..=6, b in 0u64..=6, w in 2u64..=12, seed in any::<u64>()) {
        let inst = gen_2point(n, b, w, seed).unwrap();
        let j = tcsko_to_okd(&inst).unwrap();
        prop_assert_eq!(okd_to_tcsko(&j, Some(inst.w().clone())).unwrap(), inst);
    }
}
