use corrko_core::rational::int;
use corrko_detsolve::generate::{gen_knap_orient, gen_orientkd, gen_p2p_knap_orient};
use corrko_detsolve::lagrangian::default_eps;
use corrko_detsolve::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn knapsack_never_beats_orienteering(n in 2usize..8, b in 0u64..12, seed in any::<u64>()) {
        let inst = gen_knap_orient(n, b, seed).unwrap();
        let k = knap_orient_exact(&inst).unwrap();
        let o = orienteering_exact(&inst).unwrap();
        prop_assert!(check_knap_orient(&inst, &k.path).is_ok());
        prop_assert!(k.reward <= o.reward);
    }

    #[test]
    fn lagrangian_is_feasible_and_within_factor(n in 2usize..8, b in 0u64..12, seed in any::<u64>(), p2p in any::<bool>()) {
        let inst = if p2p { gen_p2p_knap_orient(n, b, seed) } else { gen_knap_orient(n, b, seed) }.unwrap();
        let opt = knap_orient_exact(&inst).unwrap().reward;
        let solver = Lagrangian { base: ExactOrienteering, eps: default_eps() };
        let got = solver.solve(&inst).unwrap();
        prop_assert!(check_knap_orient(&inst, &got.path).is_ok());
        prop_assert!(got.reward * solver.alpha() >= opt);
    }

    #[test]
    fn text_format_round_trips(n in 2usize..7, b in 0u64..12, seed in any::<u64>()) {
        let a = DetInstance::KnapOrient(gen_p2p_knap_orient(n, b, seed).unwrap());
        prop_assert_eq!(parse_det_instance(&write_det_instance(&a)).unwrap(), a);
        let o = DetInstance::OrientKd(gen_orientkd(n, b, seed).unwrap());
        prop_assert_eq!(parse_det_instance(&write_det_instance(&o)).unwrap(), o);
    }

    #[test]
    fn normalization_preserves_feasibility(
        n in 2usize..7,
        seed in any::<u64>(),
        root_weight in 0i64..3,
        order in proptest::collection::vec(1usize..7, 0..6),
    ) {
        let mut inst = gen_orientkd(n, 6, seed).unwrap();
        inst.weights[0] = int(root_weight);
        inst.deadlines[0] = int(root_weight);
        let norm = inst.normalized().unwrap();
        let mut path = vec![0];
        for v in order.into_iter().filter(|&v| v < n) {
            if !path.contains(&v) {
                path.push(v);
            }
        }
        prop_assert_eq!(check_orientkd(&inst, &path).is_ok(), check_orientkd(&norm, &path).is_ok());
    }

    #[test]
    fn okd_approximations_are_feasible(n in 2usize..8, b in 0u64..12, seed in any::<u64>()) {
        let inst = gen_orientkd(n, b, seed).unwrap();
        let opt = orientkd_exact(&inst).unwrap();
        let bucket = orientkd_bucketing(&inst, &ExactKnapOrient).unwrap();
        prop_assert!(check_orientkd(&inst, &bucket.best.path).is_ok());
        prop_assert!(bucket.best.reward <= opt.reward);
        let s = extract_okd_portals(&inst, &opt.path, &portals::default_zeta()).unwrap();
        prop_assert!(verify_okd_portals(&inst, &s).is_ok());
        let run = orientkd_portal_alg(&inst, &s, &ExactKnapOrient).unwrap();
        prop_assert!(check_orientkd(&inst, &run.best.path).is_ok());
        prop_assert!(run.best.reward <= opt.reward);
    }
}
