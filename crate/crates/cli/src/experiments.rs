//! The experiments behind the acceptance suite. Each one builds its own
//! seeded fixtures, runs the algorithm against an independent reference and
//! returns a report whose checks decide pass or fail.

use anyhow::{bail, Context, Result};
use corrko_core::adversarial::{
    adaptgap_levels, adaptgap_policy, gen_2point, gen_adaptgap, gen_appendix_a, gen_random, random_metric,
    AdaptGapParams,
};
use corrko_core::policy::{eval_adaptive_exact, eval_nonadaptive_exact, simulate, NonAdaptivePolicy, PolicyRef};
use corrko_core::rational::{ceil_log2, consts, format_rational, int, ratio, to_f64, Rational};
use corrko_core::{Atom, JointDistribution};
use corrko_core::{opt_adaptive, opt_nonadaptive, opt_nonadaptive_restricted, split_rewards, CorrKOInstance, OracleCaps};
use corrko_csko::cancel::{brute_force_cancellation, cancel_branch};
use corrko_csko::configlp::{config_lp_violation, solve_config_lp};
use corrko_csko::structure::passes_single_vertex_filter;
use corrko_csko::twopoint::{expreward_formula, okd_to_tcsko, path_factor, solve_two_point, tcsko_to_okd};
use corrko_csko::{csko_round, extract_structure, poly_logw, verify_structure, KnapSolver, PolyMode, PolyOptions};
use corrko_detsolve::generate::{gen_knap_orient, gen_orientkd};
use corrko_detsolve::portals::{default_zeta, extract_okd_portals};
use corrko_detsolve::{
    check_knap_orient, check_orientkd, knap_orient_exact, knapokd_exact, lagrangian_knap_reduce, orientkd_bucketing,
    orientkd_exact, orientkd_portal_alg, ExactKnapOrient, ExactOrienteering, OrientKdInstance,
};
use corrko_lp::kolp::CHECK_TOL;
use corrko_lp::{round_kolp, solve_ckoclp, solve_kolp};
use num::bigint::BigUint;
use num::traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{Format, Report};

/// Settings shared by every experiment.
#[derive(Debug, Clone, Copy, Default)]
pub struct Ctx {
    /// Base seed; fixture `i` uses seed `seed + i`.
    pub seed: u64,
    pub caps: OracleCaps,
    /// Overrides the fixture count of the fixture-driven experiments.
    pub fixtures: Option<usize>,
}

impl Ctx {
    fn count(&self, default: usize) -> usize {
        self.fixtures.unwrap_or(default)
    }

    fn fixture_seed(&self, i: usize) -> u64 {
        self.seed.wrapping_add(i as u64)
    }
}

pub type ExperimentFn = fn(&Ctx) -> Result<Report>;

pub struct Experiment {
    pub id: &'static str,
    /// Acceptance criterion the experiment belongs to.
    pub criterion: u32,
    pub about: &'static str,
    pub run: ExperimentFn,
}

pub const EXPERIMENTS: &[Experiment] = &[
    Experiment { id: "adaptivity-gap", criterion: 1, about: "adaptive value of the walking policy at H=4", run: adaptivity_gap },
    Experiment { id: "nonadaptive-bound", criterion: 2, about: "non-adaptive optimum at H=4", run: nonadaptive_bound },
    Experiment { id: "gap-growth", criterion: 2, about: "restricted gap at H=9 against H=4", run: gap_growth },
    Experiment { id: "appendix-a", criterion: 3, about: "forced versus reverse order, n in {2, 6}", run: appendix_a },
    Experiment { id: "lagrangian", criterion: 4, about: "Lagrangian reduction factor", run: lagrangian },
    Experiment { id: "kolp-rounding", criterion: 5, about: "KO-LP rounding and LP validity", run: kolp_rounding },
    Experiment { id: "poly-logw", criterion: 6, about: "level LP bound and O(log W) policy", run: poly_logw_chain },
    Experiment { id: "structure", criterion: 7, about: "portal structure properties", run: structure },
    Experiment { id: "config-lp", criterion: 8, about: "configuration LP value and rounding rejections", run: config_lp },
    Experiment { id: "two-point", criterion: 9, about: "two-point instances and knapsack deadlines", run: two_point },
    Experiment { id: "cancel", criterion: 10, about: "cancellation LP and threshold search", run: cancel },
    Experiment { id: "orientkd", criterion: 11, about: "orienteering with knapsack deadlines", run: orientkd },
    Experiment { id: "determinism", criterion: 12, about: "seeded experiments reproduce byte for byte", run: determinism },
    Experiment { id: "simulate", criterion: 0, about: "Monte Carlo of the H=4 walking policy", run: simulate_walk },
];

pub fn find(id: &str) -> Option<&'static Experiment> {
    EXPERIMENTS.iter().find(|e| e.id == id)
}

fn wide_caps(ctx: &Ctx) -> OracleCaps {
    OracleCaps {
        max_vertices: ctx.caps.max_vertices.max(16),
        max_w: u64::MAX,
        max_states: ctx.caps.max_states.max(50_000_000),
    }
}

fn fr(x: &Rational) -> String {
    format_rational(x)
}

fn ff(x: f64) -> String {
    // Avoid printing -0.
    format!("{:.6}", x + 0.0)
}

/// Tracks the worst ratio `got / reference` over fixtures.
#[derive(Default)]
struct Worst {
    ratio: Option<f64>,
    at: u64,
    failures: Vec<u64>,
}

impl Worst {
    fn record(&mut self, seed: u64, got: f64, reference: f64, ok: bool) {
        if reference > 0.0 {
            let r = got / reference;
            if self.ratio.is_none_or(|w| r < w) {
                self.ratio = Some(r);
                self.at = seed;
            }
        }
        if !ok {
            self.failures.push(seed);
        }
    }

    fn detail(&self, n: usize) -> String {
        let worst = self.ratio.map_or("n/a".into(), |r| format!("{r:.4} (seed {})", self.at));
        if self.failures.is_empty() {
            format!("{n} fixtures, worst ratio {worst}")
        } else {
            format!("{} of {n} fixtures fail, seeds {:?}; worst ratio {worst}", self.failures.len(), self.failures)
        }
    }
}

fn walk_value(height: u32) -> Result<(CorrKOInstance, Rational)> {
    let inst = gen_adaptgap(AdaptGapParams { height })?;
    let v = eval_adaptive_exact(&inst, &adaptgap_policy(&inst)?)?;
    Ok((inst, v))
}

fn adaptivity_gap(_: &Ctx) -> Result<Report> {
    let mut r = Report::new("adaptivity gap, H = 4");
    let (inst, v) = walk_value(4)?;
    let bound = (int(1) - consts::inv_e_upper()) / int(4);
    r.field("vertices", inst.n());
    r.field("walking policy value", fr(&v));
    r.field("bound (1 - 1/e)/4, 1/e rounded up", fr(&bound));
    r.check("adaptive value >= (1 - 1/e)/4", v >= bound, format!("{} >= {}", ff(to_f64(&v)), ff(to_f64(&bound))));
    Ok(r)
}

fn nonadaptive_bound(ctx: &Ctx) -> Result<Report> {
    let mut r = Report::new("non-adaptive optimum, H = 4");
    let (inst, walk) = walk_value(4)?;
    let (opt, pol) = opt_nonadaptive(&inst, wide_caps(ctx))?;
    let checked = eval_nonadaptive_exact(&inst, &pol)?;
    r.field("non-adaptive optimum", fr(&opt));
    r.field("optimal sequence", format!("{:?}", pol.sequence));
    r.field("ratio walk / non-adaptive", ff(to_f64(&(&walk / &opt))));
    r.check("optimum <= 2/sqrt(4) = 1", opt <= int(1), fr(&opt));
    r.check("optimal sequence re-evaluates to the optimum", checked == opt, fr(&checked));
    Ok(r)
}

fn gap_growth(ctx: &Ctx) -> Result<Report> {
    let mut r = Report::new("gap growth, H = 4 to H = 9");
    r.columns(&["H", "walk value", "restricted non-adaptive", "ratio"]);
    let mut ratios = vec![];
    for h in [4u32, 9] {
        let (inst, walk) = walk_value(h)?;
        let levels = adaptgap_levels(&inst)?;
        let (na, _) = opt_nonadaptive_restricted(&inst, &levels, wide_caps(ctx).max_states)?;
        let ratio = &walk / &na;
        r.row(vec![h.to_string(), ff(to_f64(&walk)), ff(to_f64(&na)), ff(to_f64(&ratio))]);
        ratios.push(ratio);
    }
    let (inst4, walk4) = walk_value(4)?;
    let (opt4, _) = opt_nonadaptive(&inst4, wide_caps(ctx))?;
    let full4 = &walk4 / &opt4;
    r.field("H=4 ratio against the full optimum", ff(to_f64(&full4)));
    let target = ratios[0].clone().max(full4);
    r.check(
        "H=9 restricted ratio > H=4 ratio",
        ratios[1] > target,
        format!("{} > {}", ff(to_f64(&ratios[1])), ff(to_f64(&target))),
    );
    Ok(r)
}

fn appendix_a(_: &Ctx) -> Result<Report> {
    let mut r = Report::new("appendix A ordering instance");
    r.columns(&["n", "W", "forced-order optimum", "1/n", "reverse-order value", "1 - 1/e"]);
    let floor = int(1) - consts::inv_e_upper();
    for n in [2u32, 6] {
        let w = (1u64 << (n + 1)) + 1;
        let inst = gen_appendix_a(n, w)?;
        // Every subsequence of 1..n, in increasing order.
        let mut forced = Rational::zero();
        for mask in 0u32..(1 << n) {
            let mut seq = vec![0];
            seq.extend((1..=n as usize).filter(|i| mask >> (i - 1) & 1 == 1));
            forced = forced.max(eval_nonadaptive_exact(&inst, &NonAdaptivePolicy::new(seq))?);
        }
        let mut rev = vec![0];
        rev.extend((1..=n as usize).rev());
        let reverse = eval_nonadaptive_exact(&inst, &NonAdaptivePolicy::new(rev))?;
        let inv_n = ratio(1, n as i64);
        r.row(vec![n.to_string(), w.to_string(), fr(&forced), fr(&inv_n), fr(&reverse), ff(to_f64(&floor))]);
        r.check(format!("n={n}: forced order <= 1/n"), forced <= inv_n, fr(&forced));
        r.check(format!("n={n}: reverse order >= 1 - 1/e"), reverse >= floor, ff(to_f64(&reverse)));
    }
    Ok(r)
}

fn lagrangian(ctx: &Ctx) -> Result<Report> {
    let count = ctx.count(200);
    let mut r = Report::new("Lagrangian reduction, exact inner orienteering");
    let eps = ratio(1, 100);
    let factor = int(3) * (int(1) + &eps);
    let mut worst = Worst::default();
    let mut infeasible = 0;
    for i in 0..count {
        let seed = ctx.fixture_seed(i);
        let inst = gen_knap_orient(2 + i % 6, 9, seed)?;
        let opt = knap_orient_exact(&inst)?.reward;
        let got = lagrangian_knap_reduce(&ExactOrienteering, &inst, &eps)?;
        if check_knap_orient(&inst, &got.path).is_err() {
            infeasible += 1;
        }
        worst.record(seed, to_f64(&got.reward), to_f64(&opt), &got.reward * &factor >= opt);
    }
    r.field("fixtures", count);
    r.check("reward >= OPT/(3(1+eps)), eps = 0.01", worst.failures.is_empty(), worst.detail(count));
    r.check("every path feasible", infeasible == 0, format!("{infeasible} infeasible"));
    Ok(r)
}

fn kolp_rounding(ctx: &Ctx) -> Result<Report> {
    let count = ctx.count(100);
    let mut r = Report::new("KO-LP rounding");
    let mut worst = Worst::default();
    let mut lp_low = vec![];
    let mut infeasible = 0;
    for i in 0..count {
        let seed = ctx.fixture_seed(i);
        let inst = gen_knap_orient(3 + i % 6, 8, seed)?;
        let sol = solve_kolp(&inst)?;
        let exact = to_f64(&knap_orient_exact(&inst)?.reward);
        if sol.objective + 1e-6 < exact {
            lp_low.push(seed);
        }
        let got = round_kolp(&inst, &sol, &ExactOrienteering)?;
        if check_knap_orient(&inst, &got.path).is_err() {
            infeasible += 1;
        }
        let g = to_f64(&got.reward);
        worst.record(seed, g, sol.objective, g >= sol.objective / 5.0 - 1e-6);
    }
    r.field("fixtures", count);
    r.check("rounded reward >= LP/5 - 1e-6", worst.failures.is_empty(), worst.detail(count));
    r.check("LP >= exact optimum", lp_low.is_empty(), format!("failing seeds {lp_low:?}"));
    r.check("every path feasible", infeasible == 0, format!("{infeasible} infeasible"));
    Ok(r)
}

/// Random instance family for the CorrKO experiments.
fn corrko_fixture(i: usize, seed: u64) -> Result<CorrKOInstance> {
    Ok(gen_random(3 + i % 4, 4, 1 + (i % 8) as u64, 3, seed)?)
}

fn poly_logw_chain(ctx: &Ctx) -> Result<Report> {
    let count = ctx.count(50);
    let mut r = Report::new("O(log W) chain");
    r.columns(&["seed", "n", "W", "L", "OPT", "max LP", "policy value"]);
    let mut lp_fail = vec![];
    let mut pol_fail = vec![];
    for i in 0..count {
        let seed = ctx.fixture_seed(i);
        let inst = corrko_fixture(i, seed)?;
        let (opt, _) = opt_adaptive(&inst, ctx.caps)?;
        let run = poly_logw(&inst, PolyOptions { solver: KnapSolver::Lp, mode: PolyMode::Randomized })?;
        let l = ceil_log2(inst.w());
        let max_lp = run.max_lp_value().context("LP solver reports values")?;
        let value = run.value().clone();
        if max_lp * (l + 1) as f64 + 1e-6 < to_f64(&opt) {
            lp_fail.push(seed);
        }
        if &value * int(40 * (l as i64 + 1)) < opt {
            pol_fail.push(seed);
        }
        r.row(vec![
            seed.to_string(),
            inst.n().to_string(),
            inst.w().to_string(),
            l.to_string(),
            ff(to_f64(&opt)),
            ff(max_lp),
            ff(to_f64(&value)),
        ]);
    }
    r.check("max_j LP(j) >= OPT/(L+1)", lp_fail.is_empty(), format!("{count} fixtures, failing seeds {lp_fail:?}"));
    r.check("policy value >= OPT/(40(L+1))", pol_fail.is_empty(), format!("{count} fixtures, failing seeds {pol_fail:?}"));
    Ok(r)
}

/// Instances for the structural experiments: seven vertices with sizes in
/// `[0, W/2]` and rewards in `1..=3`, so that no single vertex tends to carry
/// a quarter of the optimum.
pub fn structure_fixture(seed: u64) -> Result<CorrKOInstance> {
    let (n, b, w) = (7usize, 8u64, 8u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let metric = random_metric(&mut rng, n, b / 2);
    let mut dists = vec![JointDistribution::zero()];
    for _ in 1..n {
        let k = rng.gen_range(1..=2);
        let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=3)).collect();
        let total: i64 = weights.iter().sum();
        let atoms = weights
            .iter()
            .map(|&p| Atom::new(rng.gen_range(0..=w / 2), int(rng.gen_range(1..=3)), ratio(p, total)))
            .collect();
        dists.push(JointDistribution::new(atoms)?);
    }
    Ok(CorrKOInstance::new(metric, b, BigUint::from(w), dists)?)
}

/// Up to `want` fixtures that pass the single-vertex filter, scanning at
/// most `20 * want` seeds. Returns `(seed, instance, opt, tree)` and the
/// number of seeds scanned.
#[allow(clippy::type_complexity)]
fn filtered_fixtures(
    ctx: &Ctx,
    want: usize,
) -> Result<(Vec<(u64, CorrKOInstance, Rational, corrko_core::AdaptivePolicyTree)>, usize)> {
    let mut out = vec![];
    let mut scanned = 0;
    while out.len() < want && scanned < 20 * want {
        let seed = ctx.fixture_seed(scanned);
        scanned += 1;
        let inst = structure_fixture(seed)?;
        let (opt, tree) = opt_adaptive(&inst, ctx.caps)?;
        if opt.is_zero() || !passes_single_vertex_filter(&inst, &opt) {
            continue;
        }
        out.push((seed, inst, opt, tree));
    }
    Ok((out, scanned))
}

fn structure(ctx: &Ctx) -> Result<Report> {
    let want = ctx.count(50);
    let mut r = Report::new("portal structure");
    let (fixtures, scanned) = filtered_fixtures(ctx, want)?;
    r.field("seeds scanned", scanned);
    r.field("fixtures passing the single-vertex filter", fixtures.len());
    r.columns(&["seed", "OPT", "top level", "pairs", "segment reward", "portal reward"]);
    let mut failures = vec![];
    for (seed, inst, _, tree) in &fixtures {
        let mut ps = extract_structure(inst, tree)?;
        if let Err(e) = verify_structure(inst, &mut ps) {
            failures.push(format!("seed {seed}: {e}"));
            continue;
        }
        let c = &ps.checks;
        r.row(vec![
            seed.to_string(),
            ff(to_f64(&c.opt)),
            ps.k().to_string(),
            ps.pairs.len().to_string(),
            ff(to_f64(&c.segment_reward)),
            ff(to_f64(&c.portal_reward)),
        ]);
    }
    r.check(format!("{want} filtered fixtures found"), fixtures.len() == want, format!("{} found", fixtures.len()));
    r.check("(a), (b), P1-P5 hold", failures.is_empty(), if failures.is_empty() { "all hold".into() } else { failures.join("; ") });
    Ok(r)
}

fn config_lp(ctx: &Ctx) -> Result<Report> {
    let want = ctx.count(20);
    let rounds: u64 = 10_000;
    let mut r = Report::new("configuration LP and rounding");
    let (fixtures, _) = filtered_fixtures(ctx, want)?;
    r.field("fixtures", fixtures.len());
    r.field("rounding seeds per fixture", rounds);
    r.columns(&["seed", "OPT", "configs", "LP", "LP/OPT", "rejections"]);
    let mut low = vec![];
    let mut bad_rows = vec![];
    let mut rejections = 0u64;
    for (seed, inst, opt, tree) in &fixtures {
        let mut ps = extract_structure(inst, tree)?;
        verify_structure(inst, &mut ps)?;
        let sol = solve_config_lp(inst, &ps)?;
        if config_lp_violation(inst, &ps, &sol) > CHECK_TOL {
            bad_rows.push(*seed);
        }
        let o = to_f64(opt);
        if sol.objective < o / 8.0 - 1e-6 {
            low.push(*seed);
        }
        let rej = (0..rounds).filter(|&s| csko_round(inst, &ps, &sol, s).rejected).count() as u64;
        rejections += rej;
        r.row(vec![
            seed.to_string(),
            ff(o),
            sol.num_configs().to_string(),
            ff(sol.objective),
            ff(sol.objective / o),
            rej.to_string(),
        ]);
    }
    r.check(format!("{want} fixtures"), fixtures.len() == want, format!("{} found", fixtures.len()));
    r.check("LP >= OPT/8 - 1e-6", low.is_empty(), format!("failing seeds {low:?}"));
    r.check("LP rows hold", bad_rows.is_empty(), format!("failing seeds {bad_rows:?}"));
    r.check("no rejection in step 2", rejections == 0, format!("{rejections} rejections"));
    Ok(r)
}

/// Every travel-feasible rooted sequence.
fn feasible_sequences(inst: &CorrKOInstance) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut stack = vec![(vec![inst.root()], 0u64)];
    while let Some((seq, len)) = stack.pop() {
        let last = *seq.last().expect("non-empty");
        for v in inst.non_root() {
            let l = len + inst.d(last, v);
            if !seq.contains(&v) && l <= inst.b() {
                let mut s = seq.clone();
                s.push(v);
                stack.push((s, l));
            }
        }
        out.push(seq);
    }
    out
}

fn two_point(ctx: &Ctx) -> Result<Report> {
    let count = ctx.count(50);
    let mut r = Report::new("two-point instances");
    r.columns(&["seed", "n", "W", "OPT", "OPT(J)", "policy value"]);
    let mut gap = vec![];
    let mut formula = vec![];
    let mut trip = vec![];
    let mut quarter = vec![];
    let mut okd_bound = vec![];
    let c = int(1) - consts::inv_sqrt_e_upper();
    for i in 0..count {
        let seed = ctx.fixture_seed(i);
        let inst = gen_2point(3 + i % 4, 4, 2 + (i % 7) as u64, seed)?;
        let (ad, _) = opt_adaptive(&inst, ctx.caps)?;
        let (na, _) = opt_nonadaptive(&inst, ctx.caps)?;
        if ad != na {
            gap.push(seed);
        }
        for seq in feasible_sequences(&inst) {
            if expreward_formula(&inst, &seq)? != eval_nonadaptive_exact(&inst, &NonAdaptivePolicy::new(seq.clone()))? {
                formula.push(seed);
                break;
            }
        }
        let j = tcsko_to_okd(&inst)?;
        if okd_to_tcsko(&j, Some(inst.w().clone()))? != inst {
            trip.push(seed);
        }
        let run = solve_two_point(&inst)?;
        if &run.value * path_factor() < run.solution.reward {
            quarter.push(seed);
        }
        let opt_j = knapokd_exact(&j)?.reward;
        if opt_j < &c * &ad {
            okd_bound.push(seed);
        }
        r.row(vec![
            seed.to_string(),
            inst.n().to_string(),
            inst.w().to_string(),
            ff(to_f64(&ad)),
            ff(to_f64(&opt_j)),
            ff(to_f64(&run.value)),
        ]);
    }
    r.field("fixtures", count);
    r.check("adaptive optimum = non-adaptive optimum", gap.is_empty(), format!("failing seeds {gap:?}"));
    r.check("reward formula = exact evaluation on every feasible path", formula.is_empty(), format!("failing seeds {formula:?}"));
    r.check("round trip is the identity", trip.is_empty(), format!("failing seeds {trip:?}"));
    r.check("policy value >= path reward / 4", quarter.is_empty(), format!("failing seeds {quarter:?}"));
    r.check("OPT(J) >= (1 - e^{-1/2}) OPT", okd_bound.is_empty(), format!("failing seeds {okd_bound:?}"));
    Ok(r)
}

fn cancel(ctx: &Ctx) -> Result<Report> {
    let count = ctx.count(20);
    let mut r = Report::new("cancellations");
    r.columns(&["seed", "n", "W", "brute force", "CKOC-LP", "pi(Q)", "LP thresholds", "best thresholds"]);
    let mut lp_low = vec![];
    let mut infeasible = vec![];
    let mut induced = vec![];
    let mut short = vec![];
    for i in 0..count {
        let seed = ctx.fixture_seed(i);
        let inst = gen_random(3 + i % 2, 4, 2 + (i % 5) as u64, 3, seed)?;
        let (_, small) = split_rewards(&inst);
        let lp = solve_ckoclp(&small)?;
        let (brute, _) = brute_force_cancellation(&small)?;
        if lp.objective + 1e-6 < to_f64(&brute) {
            lp_low.push(seed);
        }
        let b = cancel_branch(&small)?;
        if b.ck_violation > CHECK_TOL {
            infeasible.push(seed);
        }
        if (b.induced_value - b.lp.objective).abs() > 1e-6 || b.induced_violation > CHECK_TOL {
            induced.push(seed);
        }
        let (best, _) = b.search(&small)?;
        if to_f64(&best) < b.q_reward / 8.0 - 1e-9 {
            short.push(seed);
        }
        r.row(vec![
            seed.to_string(),
            inst.n().to_string(),
            inst.w().to_string(),
            ff(to_f64(&brute)),
            ff(lp.objective),
            ff(b.q_reward),
            ff(to_f64(&b.value)),
            ff(to_f64(&best)),
        ]);
    }
    r.field("fixtures", count);
    r.check("CKOC-LP >= brute-force cancellation optimum", lp_low.is_empty(), format!("failing seeds {lp_low:?}"));
    r.check("restricted point is CK-LP feasible", infeasible.is_empty(), format!("failing seeds {infeasible:?}"));
    r.check("induced KO-LP point keeps the LP value", induced.is_empty(), format!("failing seeds {induced:?}"));
    r.check("some thresholds reach pi(Q)/8", short.is_empty(), format!("failing seeds {short:?}"));
    Ok(r)
}

/// Best reward over all rooted simple paths, checked by the deadline rule.
fn okd_brute(inst: &OrientKdInstance) -> Rational {
    let n = inst.n();
    let root = inst.terminals.start;
    let mut best = Rational::zero();
    let mut stack = vec![vec![root]];
    while let Some(p) = stack.pop() {
        if check_orientkd(inst, &p).is_ok() {
            let r: Rational = p.iter().map(|&v| &inst.rewards[v]).sum();
            best = best.max(r);
        }
        for v in 0..n {
            if !p.contains(&v) {
                let mut q = p.clone();
                q.push(v);
                stack.push(q);
            }
        }
    }
    best
}

fn orientkd(ctx: &Ctx) -> Result<Report> {
    let count = ctx.count(60);
    let mut r = Report::new("orienteering with knapsack deadlines");
    let mut exact_fail = vec![];
    let mut bucket = Worst::default();
    let mut portal = Worst::default();
    let mut z_infeasible = vec![];
    for i in 0..count {
        let seed = ctx.fixture_seed(i);
        let small = gen_orientkd(6, 8, seed)?;
        if orientkd_exact(&small)?.reward != okd_brute(&small) {
            exact_fail.push(seed);
        }
        let inst = gen_orientkd(7, 9, seed)?;
        let opt = orientkd_exact(&inst)?;
        let run = orientkd_bucketing(&inst, &ExactKnapOrient)?;
        let n_top = run.top_bucket.map_or(0, i64::from);
        let ok = check_orientkd(&inst, &run.best.path).is_ok() && &run.best.reward * int(3 * (n_top + 2)) >= opt.reward;
        bucket.record(seed, to_f64(&run.best.reward), to_f64(&opt.reward), ok);
        let s = extract_okd_portals(&inst, &opt.path, &default_zeta())?;
        let p = orientkd_portal_alg(&inst, &s, &ExactKnapOrient)?;
        if !p.z_paths.iter().all(|(_, f)| *f) || !p.portal_path.1 {
            z_infeasible.push(seed);
        }
        portal.record(seed, to_f64(&p.best.reward), to_f64(&opt.reward), &p.best.reward * int(8) >= opt.reward);
    }
    r.field("fixtures", count);
    r.check("exact solver = permutation search (n = 6)", exact_fail.is_empty(), format!("failing seeds {exact_fail:?}"));
    r.check("bucketing >= OPT/(3(N+2))", bucket.failures.is_empty(), bucket.detail(count));
    r.check("portal algorithm >= OPT/8", portal.failures.is_empty(), portal.detail(count));
    r.check("every Z path feasible", z_infeasible.is_empty(), format!("failing seeds {z_infeasible:?}"));
    Ok(r)
}

fn simulate_walk(ctx: &Ctx) -> Result<Report> {
    let trials = 20_000;
    let (inst, exact) = walk_value(4)?;
    let tree = adaptgap_policy(&inst)?;
    let s = simulate(&inst, PolicyRef::Adaptive(&tree), trials, ctx.seed)?;
    let mut r = Report::new("Monte Carlo, H = 4 walking policy");
    r.field("seed", ctx.seed);
    r.field("trials", trials);
    r.field("exact", ff(to_f64(&exact)));
    r.field("mean", ff(s.mean));
    r.field("95% interval", format!("[{}, {}]", ff(s.ci_low), ff(s.ci_high)));
    Ok(r)
}

/// Seeded pieces whose output must not change between runs: the Monte
/// Carlo report, the instance generators and the rounding samples.
fn determinism_payload(ctx: &Ctx) -> Result<String> {
    let mut out = simulate_walk(ctx)?.render(Format::Rows);
    out.push_str(&corrko_core::format::write_instance(&gen_random(6, 5, 8, 3, ctx.seed)?));
    out.push_str(&corrko_core::format::write_instance(&gen_2point(5, 5, 8, ctx.seed)?));
    let (fixtures, _) = filtered_fixtures(ctx, 1)?;
    if let Some((_, inst, _, tree)) = fixtures.first() {
        let mut ps = extract_structure(inst, tree)?;
        verify_structure(inst, &mut ps)?;
        let sol = solve_config_lp(inst, &ps)?;
        for s in 0..20 {
            let o = csko_round(inst, &ps, &sol, ctx.seed.wrapping_add(s));
            out.push_str(&format!("{:?} {:?}\n", o.picked, o.policy.sequence));
        }
    }
    let inst = corrko_fixture(5, ctx.seed)?;
    let run = poly_logw(&inst, PolyOptions::default())?;
    out.push_str(&format!("{} {:?}\n", fr(run.value()), run.policy()));
    Ok(out)
}

fn determinism(ctx: &Ctx) -> Result<Report> {
    let mut r = Report::new("determinism");
    let a = determinism_payload(ctx)?;
    let b = determinism_payload(ctx)?;
    let other = determinism_payload(&Ctx { seed: ctx.seed.wrapping_add(1), ..*ctx })?;
    r.field("payload bytes", a.len());
    r.check("same seed, identical output", a == b, format!("{} vs {} bytes", a.len(), b.len()));
    r.check("different seed, different output", a != other, "seed + 1");
    Ok(r)
}

/// Runs one experiment and tags errors with its id.
pub fn run_experiment(e: &Experiment, ctx: &Ctx) -> Result<Report> {
    (e.run)(ctx).with_context(|| format!("experiment {}", e.id))
}

pub fn by_criterion(c: u32) -> Vec<&'static Experiment> {
    EXPERIMENTS.iter().filter(|e| e.criterion == c).collect()
}

pub fn check_criterion(c: u32) -> Result<()> {
    if !(1..=12).contains(&c) {
        bail!("criterion {c} out of range 1-12");
    }
    Ok(())
}
