use num::bigint::BigUint;
use num::traits::Zero;
use proptest::prelude::*;

use corrko_core::adversarial::{gen_2point, gen_random};
use corrko_core::dist::{Atom, JointDistribution};
use corrko_core::format::{parse_instance, write_instance};
use corrko_core::policy::{
    eval_adaptive_exact, eval_cancellation_exact, eval_nonadaptive_exact, simulate, PolicyRef,
};
use corrko_core::rational::{int, pow2_rat, to_f64};
use corrko_core::{
    opt_adaptive, opt_nonadaptive, split_rewards, start_reward, truncated_mean,
    AdaptivePolicyTree, CancellationPolicy, CorrKOInstance, NonAdaptivePolicy, OracleCaps,
    Rational,
};

fn small_instance() -> impl Strategy<Value = CorrKOInstance> {
    (2usize..=5, 0u64..=6, 1u64..=8, 1usize..=3, any::<u64>())
        .prop_map(|(n, b, w, k, seed)| gen_random(n, b, w, k, seed).unwrap())
}

/// A sequence over a random subset of non-root vertices in random order.
fn sequence_for(inst: &CorrKOInstance, picks: &[usize]) -> NonAdaptivePolicy {
    let mut seq = vec![inst.root()];
    for &p in picks {
        let v = p % inst.n();
        if !seq.contains(&v) {
            seq.push(v);
        }
    }
    NonAdaptivePolicy::new(seq)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn truncated_means_are_bounded_and_ratio_decreasing(inst in small_instance()) {
        for d in inst.dists() {
            let mut prev: Option<Rational> = None;
            for j in 0..6u64 {
                let mu = truncated_mean(d, j);
                prop_assert!(mu >= int(0));
                prop_assert!(mu <= pow2_rat(j));
                prop_assert!(mu <= d.expected_size());
                if let Some(p) = &prev {
                    prop_assert!(&mu >= p);
                    prop_assert!(p / pow2_rat(j - 1) >= &mu / pow2_rat(j));
                }
                prev = Some(mu);
            }
        }
    }

    #[test]
    fn start_reward_is_nonincreasing_and_matches_enumeration(inst in small_instance()) {
        let w = inst.w();
        for d in inst.dists() {
            let mut prev = None;
            for t in 0..=inst.w_u64().unwrap() + 1 {
                let t = BigUint::from(t);
                let pi = start_reward(d, &t, w);
                let mut brute = Rational::zero();
                for a in d.atoms() {
                    if &t <= w && a.size <= w - &t {
                        brute += &a.prob * &a.reward;
                    }
                }
                prop_assert_eq!(&pi, &brute);
                if let Some(p) = &prev {
                    prop_assert!(&pi <= p);
                }
                prev = Some(pi);
            }
        }
    }

    #[test]
    fn split_rewards_partition_each_atom(inst in small_instance()) {
        let (large, small) = split_rewards(&inst);
        for v in 0..inst.n() {
            for ((a, l), s) in inst.dist(v).atoms().iter().zip(large.dist(v).atoms()).zip(small.dist(v).atoms()) {
                prop_assert_eq!(&a.size, &l.size);
                prop_assert_eq!(&a.prob, &s.prob);
                prop_assert_eq!(&a.reward, &(&l.reward + &s.reward));
            }
        }
    }

    #[test]
    fn instance_text_round_trips(inst in small_instance()) {
        prop_assert_eq!(parse_instance(&write_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn chain_tree_matches_sequence(inst in small_instance(), picks in prop::collection::vec(0usize..8, 0..6)) {
        let pol = sequence_for(&inst, &picks);
        let seq = eval_nonadaptive_exact(&inst, &pol).unwrap();
        let tree = AdaptivePolicyTree::from_chain(&inst, &pol).unwrap();
        prop_assert_eq!(eval_adaptive_exact(&inst, &tree).unwrap(), seq.clone());
        let never = CancellationPolicy::without_cancellation(&pol);
        prop_assert_eq!(eval_cancellation_exact(&inst, &never).unwrap(), seq);
    }

    #[test]
    fn oracles_bracket_explicit_policies(inst in small_instance(), picks in prop::collection::vec(0usize..8, 0..6)) {
        let caps = OracleCaps::default();
        let (a, tree) = opt_adaptive(&inst, caps).unwrap();
        let (na, pol) = opt_nonadaptive(&inst, caps).unwrap();
        prop_assert_eq!(eval_adaptive_exact(&inst, &tree).unwrap(), a.clone());
        prop_assert_eq!(eval_nonadaptive_exact(&inst, &pol).unwrap(), na.clone());
        prop_assert!(a >= na);
        let other = eval_nonadaptive_exact(&inst, &sequence_for(&inst, &picks)).unwrap();
        prop_assert!(na >= other);
    }

    #[test]
    fn adaptive_value_scales_with_rewards(inst in small_instance(), c in 1i64..5) {
        let scaled = inst
            .with_dists(inst.dists().iter().map(|d| d.map_rewards(|a| &a.reward * int(c))).collect())
            .unwrap();
        let caps = OracleCaps::default();
        let (a, _) = opt_adaptive(&inst, caps).unwrap();
        let (b, _) = opt_adaptive(&scaled, caps).unwrap();
        prop_assert_eq!(a * int(c), b);
    }

    #[test]
    fn deterministic_sizes_leave_nothing_to_adapt_on(inst in small_instance()) {
        let det = inst
            .with_dists(
                inst.dists()
                    .iter()
                    .map(|d| {
                        let a = &d.atoms()[0];
                        JointDistribution::new(vec![Atom::new(a.size.clone(), d.expected_reward(), int(1))]).unwrap()
                    })
                    .collect(),
            )
            .unwrap();
        let caps = OracleCaps::default();
        prop_assert_eq!(opt_adaptive(&det, caps).unwrap().0, opt_nonadaptive(&det, caps).unwrap().0);
    }

    #[test]
    fn two_point_instances_have_no_adaptivity_gap(seed in any::<u64>(), n in 2usize..=5, b in 0u64..=6, w in 2u64..=8) {
        let inst = gen_2point(n, b, w, seed).unwrap();
        let caps = OracleCaps::default();
        prop_assert_eq!(opt_adaptive(&inst, caps).unwrap().0, opt_nonadaptive(&inst, caps).unwrap().0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn monte_carlo_within_five_stdev(inst in small_instance(), picks in prop::collection::vec(0usize..8, 0..6), seed in any::<u64>()) {
        let pol = sequence_for(&inst, &picks);
        let exact = to_f64(&eval_nonadaptive_exact(&inst, &pol).unwrap());
        let trials = 20_000u64;
        let s = simulate(&inst, PolicyRef::NonAdaptive(&pol), trials, seed).unwrap();
        prop_assert!((s.mean - exact).abs() <= 5.0 * s.stdev / (trials as f64).sqrt() + 1e-9);
        let again = simulate(&inst, PolicyRef::NonAdaptive(&pol), trials, seed).unwrap();
        prop_assert_eq!(s, again);
    }
}
