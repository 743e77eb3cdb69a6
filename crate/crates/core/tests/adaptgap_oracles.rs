use corrko_core::adversarial::{adaptgap_levels, adaptgap_policy, gen_adaptgap, AdaptGapParams};
use corrko_core::policy::{eval_adaptive_exact, eval_nonadaptive_exact};
use corrko_core::rational::int;
use corrko_core::{opt_adaptive, opt_nonadaptive, opt_nonadaptive_restricted, OracleCaps};

fn wide_caps() -> OracleCaps {
    OracleCaps {
        max_vertices: 16,
        max_w: u64::MAX,
        max_states: 50_000_000,
    }
}

#[test]
fn h4_nonadaptive_optimum_at_most_one() {
    let inst = gen_adaptgap(AdaptGapParams { height: 4 }).unwrap();
    let (v, pol) = opt_nonadaptive(&inst, wide_caps()).unwrap();
    assert!(v <= int(1));
    assert_eq!(eval_nonadaptive_exact(&inst, &pol).unwrap(), v);
    let (r, rpol) =
        opt_nonadaptive_restricted(&inst, &adaptgap_levels(&inst).unwrap(), 1_000_000).unwrap();
    assert!(r <= v);
    assert_eq!(eval_nonadaptive_exact(&inst, &rpol).unwrap(), r);
}

#[test]
fn h4_adaptive_optimum_dominates_walking_policy() {
    let inst = gen_adaptgap(AdaptGapParams { height: 4 }).unwrap();
    let walk = eval_adaptive_exact(&inst, &adaptgap_policy(&inst).unwrap()).unwrap();
    let (opt, tree) = opt_adaptive(&inst, wide_caps()).unwrap();
    assert!(opt >= walk);
    assert_eq!(eval_adaptive_exact(&inst, &tree).unwrap(), opt);
}
