//! Subcommand implementations. Each returns the text to print and whether
//! every check passed; `main` maps that to the exit code.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use corrko_core::adversarial::{
    gen_2point, gen_adaptgap, gen_appendix_a, gen_bernoulli, gen_random, AdaptGapParams,
};
use corrko_core::format::{parse_instance, write_instance};
use corrko_core::policy::format::{parse_policy, write_policy, PolicyFile};
use corrko_core::policy::{
    eval_adaptive_exact, eval_cancellation_exact, eval_nonadaptive_exact, simulate, AdaptivePolicyTree,
    CancellationPolicy, PolicyRef,
};
use corrko_core::rational::{ceil_log2, format_rational, int, parse_rational, to_f64, Rational};
use corrko_core::{adaptivity_gap, opt_adaptive, opt_nonadaptive, CoreError, CorrKOInstance, OracleCaps};
use corrko_csko::decompose::{decompose_difficult, mix_parts, solve_heavy, solve_small, PartRun};
use corrko_csko::{
    bernoulli_csko, cancel_pipeline, csko_round, extract_structure, poly_logw, solve_config_lp, solve_two_point,
    verify_structure, KnapSolver, PolyMode, PolyOptions,
};
use corrko_detsolve::generate::{gen_knap_orient, gen_orientkd};
use corrko_detsolve::{
    check_knap_orient, check_orientkd, knap_orient_exact, lagrangian_knap_reduce, orientkd_bucketing,
    orientkd_exact, parse_det_instance, write_det_instance, DetInstance, ExactKnapOrient, ExactOrienteering,
};
use corrko_lp::{round_kolp, solve_kolp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::acceptance::{run_suite, ALL_CRITERIA};
use crate::caps::resolve_caps;
use crate::experiments::{check_criterion, find, run_experiment, Ctx, EXPERIMENTS};
use crate::report::{Format, Report};

#[derive(Debug, Parser)]
#[command(name = "corrko", version, about = "Correlated knapsack orienteering: solvers, oracles and experiments")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Oracle caps, e.g. `vertices=8,w=64,states=2000000`. Overrides the
    /// CORRKO_MAX_VERTICES / CORRKO_MAX_W / CORRKO_MAX_STATES variables.
    #[arg(long, global = true)]
    pub caps: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Solve a deterministic routing instance.
    Solve(SolveArgs),
    /// Exact and Monte Carlo value of a policy file.
    Simulate(SimulateArgs),
    /// Brute-force optima of a CorrKO instance.
    Oracle(OracleArgs),
    /// Run one of the approximation algorithms.
    Csko(CskoArgs),
    /// Run the acceptance suite.
    Acceptance(AcceptanceArgs),
    /// Run one experiment and print its report.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Family {
    Adaptgap,
    AppendixA,
    Random,
    TwoPoint,
    Bernoulli,
    KnapOrient,
    OrientKd,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub family: Family,
    /// Tree height (adaptgap).
    #[arg(long, default_value_t = 4)]
    pub height: u32,
    /// Vertex count, root included (item count for appendix-a).
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Travel budget.
    #[arg(long, default_value_t = 5)]
    pub b: u64,
    /// Processing budget.
    #[arg(long, default_value_t = 8)]
    pub w: u64,
    /// Largest number of outcomes per vertex (random).
    #[arg(long, default_value_t = 3)]
    pub atoms: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DetAlgo {
    Exact,
    Lagrangian,
    Kolp,
    Bucketing,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = DetAlgo::Exact)]
    pub algo: DetAlgo,
    /// Accuracy of the Lagrangian reduction.
    #[arg(long, default_value = "1/100")]
    pub eps: String,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub instance: PathBuf,
    pub policy: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OracleKind {
    Adaptive,
    Nonadaptive,
    Gap,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = OracleKind::Gap)]
    pub kind: OracleKind,
    /// Write the optimal policy here.
    #[arg(long)]
    pub policy_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CskoAlgo {
    PolyLogw,
    ConfigLp,
    Bernoulli,
    TwoPoint,
    Cancel,
    Decompose,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SolverArg {
    Lp,
    Exact,
}

impl From<SolverArg> for KnapSolver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Lp => KnapSolver::Lp,
            SolverArg::Exact => KnapSolver::Exact,
        }
    }
}

#[derive(Debug, Args)]
pub struct CskoArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub algo: CskoAlgo,
    /// Knapsack-orienteering solver used inside the reductions.
    #[arg(long, value_enum, default_value_t = SolverArg::Lp)]
    pub solver: SolverArg,
    /// Best sub-sequence instead of random thinning (poly-logw).
    #[arg(long)]
    pub derandomize: bool,
    /// Write one seeded draw of the policy here.
    #[arg(long)]
    pub policy_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AcceptanceArgs {
    /// Run only these criteria (repeatable).
    #[arg(long = "criterion", short = 'c')]
    pub criteria: Vec<u32>,
    /// Worker threads; criteria run concurrently.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Print every experiment report after the summary.
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Experiment id; see `--list`.
    #[arg(required_unless_present = "list")]
    pub experiment: Option<String>,
    #[arg(long)]
    pub list: bool,
    /// Override the fixture count.
    #[arg(long)]
    pub fixtures: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub struct Outcome {
    pub text: String,
    pub pass: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, pass: true }
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let caps = resolve_caps(cli.caps.as_deref())?;
    let g = Global {
        seed: cli.seed,
        caps,
        format: cli.format,
    };
    match cli.command {
        Command::Gen(a) => gen(&g, a),
        Command::Solve(a) => solve(&g, a),
        Command::Simulate(a) => simulate_cmd(&g, a),
        Command::Oracle(a) => oracle(&g, a),
        Command::Csko(a) => csko(&g, a),
        Command::Acceptance(a) => acceptance(&g, a),
        Command::Report(a) => report(&g, a),
    }
}

struct Global {
    seed: u64,
    caps: OracleCaps,
    format: Format,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}; check the path", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_instance(path: &Path) -> Result<CorrKOInstance> {
    parse_instance(&read(path)?).with_context(|| format!("{} is not a CorrKO instance file", path.display()))
}

fn fr(x: &Rational) -> String {
    format_rational(x)
}

fn gen(g: &Global, a: GenArgs) -> Result<Outcome> {
    let text = match a.family {
        Family::Adaptgap => write_instance(&gen_adaptgap(AdaptGapParams { height: a.height })?),
        Family::AppendixA => write_instance(&gen_appendix_a(a.n as u32, a.w)?),
        Family::Random => write_instance(&gen_random(a.n, a.b, a.w, a.atoms, g.seed)?),
        Family::TwoPoint => write_instance(&gen_2point(a.n, a.b, a.w, g.seed)?),
        Family::Bernoulli => write_instance(&gen_bernoulli(a.n, a.b, a.w, g.seed)?),
        Family::KnapOrient => write_det_instance(&DetInstance::KnapOrient(gen_knap_orient(a.n, a.b, g.seed)?)),
        Family::OrientKd => write_det_instance(&DetInstance::OrientKd(gen_orientkd(a.n, a.b, g.seed)?)),
    };
    match a.out {
        Some(p) => {
            write(&p, &text)?;
            Ok(Outcome::ok(format!("wrote {}\n", p.display())))
        }
        None => Ok(Outcome::ok(text)),
    }
}

fn solve(g: &Global, a: SolveArgs) -> Result<Outcome> {
    let inst = parse_det_instance(&read(&a.instance)?)
        .with_context(|| format!("{} is not a routing instance file", a.instance.display()))?;
    let mut r = Report::new(format!("solve {:?}", a.algo).to_lowercase());
    match (&inst, a.algo) {
        (DetInstance::KnapOrient(k), algo) => {
            let sol = match algo {
                DetAlgo::Exact => knap_orient_exact(k)?,
                DetAlgo::Lagrangian => {
                    let eps = parse_rational(&a.eps).ok_or_else(|| anyhow!("--eps `{}` is not a rational", a.eps))?;
                    lagrangian_knap_reduce(&ExactOrienteering, k, &eps)?
                }
                DetAlgo::Kolp => {
                    let lp = solve_kolp(k)?;
                    r.field("LP value", format!("{:.6}", lp.objective));
                    round_kolp(k, &lp, &ExactOrienteering)?
                }
                DetAlgo::Bucketing => bail!("bucketing needs an orient-kd instance"),
            };
            r.field("path", format!("{:?}", sol.path));
            r.field("reward", fr(&sol.reward));
            let check = check_knap_orient(k, &sol.path);
            r.check("feasible", check.is_ok(), check.err().map_or("ok".into(), |e| e.to_string()));
        }
        (DetInstance::OrientKd(o), algo) => {
            let sol = match algo {
                DetAlgo::Exact => orientkd_exact(o)?,
                DetAlgo::Bucketing => orientkd_bucketing(o, &ExactKnapOrient)?.best,
                _ => bail!("orient-kd instances take --algo exact or bucketing"),
            };
            r.field("path", format!("{:?}", sol.path));
            r.field("reward", fr(&sol.reward));
            let check = check_orientkd(o, &sol.path);
            r.check("feasible", check.is_ok(), check.err().map_or("ok".into(), |e| e.to_string()));
        }
    }
    Ok(Outcome {
        pass: r.passed(),
        text: r.render(g.format),
    })
}

fn simulate_cmd(g: &Global, a: SimulateArgs) -> Result<Outcome> {
    let inst = load_instance(&a.instance)?;
    let pol = parse_policy(&read(&a.policy)?).with_context(|| format!("{} is not a policy file", a.policy.display()))?;
    let mut r = Report::new("simulate");
    let tree;
    let (exact, pref) = match &pol {
        PolicyFile::NonAdaptive(p) => (eval_nonadaptive_exact(&inst, p)?, PolicyRef::NonAdaptive(p)),
        PolicyFile::Cancellation(p) => (eval_cancellation_exact(&inst, p)?, PolicyRef::Cancellation(p)),
        PolicyFile::Adaptive(shape) => {
            tree = AdaptivePolicyTree::from_shape(&inst, shape)?;
            (eval_adaptive_exact(&inst, &tree)?, PolicyRef::Adaptive(&tree))
        }
    };
    let s = simulate(&inst, pref, a.trials, g.seed)?;
    r.field("seed", g.seed);
    r.field("trials", a.trials);
    r.field("exact value", fr(&exact));
    r.field("exact value (float)", format!("{:.6}", to_f64(&exact)));
    r.field("Monte Carlo mean", format!("{:.6}", s.mean));
    r.field("standard deviation", format!("{:.6}", s.stdev));
    r.field("95% interval", format!("[{:.6}, {:.6}]", s.ci_low, s.ci_high));
    Ok(Outcome::ok(r.render(g.format)))
}

fn oracle(g: &Global, a: OracleArgs) -> Result<Outcome> {
    let inst = load_instance(&a.instance)?;
    let mut r = Report::new("oracle");
    r.field("vertices", inst.n());
    r.field("W", inst.w());
    r.field("B", inst.b());
    let policy = match a.kind {
        OracleKind::Adaptive => {
            let (v, tree) = opt_adaptive(&inst, g.caps)?;
            r.field("adaptive optimum", fr(&v));
            let again = eval_adaptive_exact(&inst, &tree)?;
            r.check("tree re-evaluates to the optimum", again == v, fr(&again));
            PolicyFile::Adaptive(tree.shape())
        }
        OracleKind::Nonadaptive => {
            let (v, pol) = opt_nonadaptive(&inst, g.caps)?;
            r.field("non-adaptive optimum", fr(&v));
            r.field("sequence", format!("{:?}", pol.sequence));
            let again = eval_nonadaptive_exact(&inst, &pol)?;
            r.check("sequence re-evaluates to the optimum", again == v, fr(&again));
            PolicyFile::NonAdaptive(pol)
        }
        OracleKind::Gap => {
            let gap = adaptivity_gap(&inst, g.caps)?;
            r.field("adaptive optimum", fr(&gap.adaptive));
            r.field("non-adaptive optimum", fr(&gap.nonadaptive));
            r.field("adaptivity gap", gap.gap.to_string());
            let (_, pol) = opt_nonadaptive(&inst, g.caps)?;
            PolicyFile::NonAdaptive(pol)
        }
    };
    if let Some(p) = &a.policy_out {
        write(p, &write_policy(&policy))?;
        r.field("policy file", p.display());
    }
    Ok(Outcome {
        pass: r.passed(),
        text: r.render(g.format),
    })
}

/// Re-validates a drawn policy and reports its exact value.
fn emit_policy(r: &mut Report, inst: &CorrKOInstance, pol: &PolicyFile, out: Option<&Path>) -> Result<()> {
    let value = match pol {
        PolicyFile::NonAdaptive(p) => {
            p.check(inst)?;
            eval_nonadaptive_exact(inst, p)?
        }
        PolicyFile::Cancellation(p) => {
            p.check(inst)?;
            eval_cancellation_exact(inst, p)?
        }
        PolicyFile::Adaptive(s) => eval_adaptive_exact(inst, &AdaptivePolicyTree::from_shape(inst, s)?)?,
    };
    r.field("drawn policy value", fr(&value));
    if let Some(p) = out {
        write(p, &write_policy(pol))?;
        r.field("policy file", p.display());
    }
    Ok(())
}

/// Oracle value when the caps allow it.
fn try_opt(inst: &CorrKOInstance, caps: OracleCaps) -> Result<Option<(Rational, AdaptivePolicyTree)>> {
    match opt_adaptive(inst, caps) {
        Ok(x) => Ok(Some(x)),
        Err(CoreError::CapExceeded { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn guarantee_rows(r: &mut Report, achieved: &Rational, opt: Option<&Rational>, factor: Option<Rational>) {
    r.field("achieved value", format!("{} ({:.6})", fr(achieved), to_f64(achieved)));
    match opt {
        Some(o) => {
            r.field("adaptive optimum", format!("{} ({:.6})", fr(o), to_f64(o)));
            if achieved > &Rational::from_integer(0.into()) {
                r.field("realized factor", format!("{:.4}", to_f64(&(o / achieved))));
            }
            if let Some(f) = factor {
                r.field("guaranteed factor", format!("{:.4}", to_f64(&f)));
                r.check("achieved >= OPT / factor", achieved * &f >= *o, format!("factor {:.4}", to_f64(&f)));
            }
        }
        None => {
            r.field("adaptive optimum", "n/a (oracle caps)");
            if let Some(f) = factor {
                r.field("guaranteed factor", format!("{:.4}", to_f64(&f)));
            }
        }
    }
}

fn csko(g: &Global, a: CskoArgs) -> Result<Outcome> {
    let inst = load_instance(&a.instance)?;
    let solver: KnapSolver = a.solver.into();
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let mut r = Report::new(format!("csko {:?}", a.algo).to_lowercase());
    r.field("seed", g.seed);
    let opt = try_opt(&inst, g.caps)?;
    let opt_value = opt.as_ref().map(|(v, _)| v);
    let out = a.policy_out.as_deref();
    let l = ceil_log2(inst.w()) as i64;
    match a.algo {
        CskoAlgo::PolyLogw => {
            let mode = if a.derandomize { PolyMode::Derandomized } else { PolyMode::Randomized };
            let run = poly_logw(&inst, PolyOptions { solver, mode })?;
            r.columns(&["j", "LP value", "path", "value"]);
            for lv in &run.levels {
                r.row(vec![
                    lv.j.to_string(),
                    lv.lp_value.map_or("-".into(), |v| format!("{v:.6}")),
                    format!("{:?}", lv.path),
                    format!("{:.6}", to_f64(&lv.value)),
                ]);
            }
            r.field("best level", run.levels[run.best].j);
            let factor = int(8) * solver.alpha() * int(l + 1);
            guarantee_rows(&mut r, run.value(), opt_value, Some(factor));
            emit_policy(&mut r, &inst, &PolicyFile::NonAdaptive(run.policy().sample(&mut rng)), out)?;
        }
        CskoAlgo::ConfigLp => {
            let (_, tree) = opt.as_ref().ok_or_else(|| {
                anyhow!("config-lp takes its portals from the adaptive oracle, which exceeds the caps; raise --caps")
            })?;
            let mut ps = extract_structure(&inst, tree)?;
            verify_structure(&inst, &mut ps)?;
            let sol = solve_config_lp(&inst, &ps)?;
            r.field("portal pairs", ps.pairs.len());
            r.field("configurations", sol.num_configs());
            r.field("LP value", format!("{:.6}", sol.objective));
            let round = csko_round(&inst, &ps, &sol, g.seed);
            r.field("rejected", round.rejected);
            r.field("concatenation", format!("{:?}", round.concatenated));
            let value = eval_nonadaptive_exact(&inst, &round.policy)?;
            guarantee_rows(&mut r, &value, opt_value, None);
            emit_policy(&mut r, &inst, &PolicyFile::NonAdaptive(round.policy), out)?;
        }
        CskoAlgo::Bernoulli => {
            let run = bernoulli_csko(&inst, solver)?;
            part_rows(&mut r, &run.run.small, &run.run.rare_large, &run.run.heavy);
            guarantee_rows(&mut r, &run.run.value, opt_value, Some(run.run.factor.clone()));
            emit_policy(&mut r, &inst, &PolicyFile::NonAdaptive(run.run.policy.sample(&mut rng)), out)?;
        }
        CskoAlgo::TwoPoint => {
            let run = solve_two_point(&inst)?;
            r.field("knapsack-deadline path", format!("{:?}", run.solution.path));
            r.field("knapsack-deadline reward", fr(&run.solution.reward));
            let factor = int(4) / (int(1) - corrko_core::rational::consts::inv_sqrt_e_upper());
            guarantee_rows(&mut r, &run.value, opt_value, Some(factor));
            emit_policy(&mut r, &inst, &PolicyFile::NonAdaptive(run.policy), out)?;
        }
        CskoAlgo::Cancel => {
            let run = cancel_pipeline(&inst, PolyOptions { solver, mode: PolyMode::Randomized })?;
            r.field("no-cancel branch value", format!("{:.6}", to_f64(&run.large_value)));
            r.field("cancel branch value", format!("{:.6}", to_f64(&run.cancel_value)));
            r.field("CKOC-LP value", format!("{:.6}", run.cancel.lp.objective));
            r.field("path Q", format!("{:?}", run.cancel.q));
            r.field("pi(Q)", format!("{:.6}", run.cancel.q_reward));
            r.field("achieved value", format!("{} ({:.6})", fr(&run.value), to_f64(&run.value)));
            if let Some(o) = opt_value {
                r.field("adaptive optimum without cancelling", format!("{:.6}", to_f64(o)));
            }
            let pol = if rng.gen_bool(0.5) {
                CancellationPolicy::without_cancellation(&run.no_cancel_policy().sample(&mut rng))
            } else {
                run.cancel.policy.clone()
            };
            emit_policy(&mut r, &inst, &PolicyFile::Cancellation(pol), out)?;
        }
        CskoAlgo::Decompose => {
            let parts = decompose_difficult(&inst);
            r.field("rarely large vertices", format!("{:?}", &parts.rare_large.ids[1..]));
            r.field("usually large vertices", format!("{:?}", &parts.heavy.ids[1..]));
            let small = solve_small(&parts.small, solver)?.part;
            let heavy = solve_heavy(&parts.heavy)?;
            let sub = &parts.rare_large;
            let lr = ceil_log2(sub.inst.w()) as i64;
            let run = poly_logw(&sub.inst, PolyOptions { solver, mode: PolyMode::Randomized })?;
            let rare = PartRun {
                policy: run.policy().map_vertices(&sub.ids),
                beta: int(8) * solver.alpha() * int(lr + 1),
                value: run.value().clone(),
            };
            part_rows(&mut r, &small, &rare, &heavy);
            let mixed = mix_parts(&inst, small, rare, heavy)?;
            guarantee_rows(&mut r, &mixed.value, opt_value, Some(mixed.factor.clone()));
            emit_policy(&mut r, &inst, &PolicyFile::NonAdaptive(mixed.policy.sample(&mut rng)), out)?;
        }
    }
    Ok(Outcome {
        pass: r.passed(),
        text: r.render(g.format),
    })
}

fn part_rows(r: &mut Report, small: &PartRun, rare: &PartRun, heavy: &PartRun) {
    r.columns(&["part", "factor", "value on part"]);
    for (name, p) in [("small", small), ("rarely large", rare), ("usually large", heavy)] {
        r.row(vec![name.into(), format!("{:.4}", to_f64(&p.beta)), format!("{:.6}", to_f64(&p.value))]);
    }
}

fn acceptance(g: &Global, a: AcceptanceArgs) -> Result<Outcome> {
    let criteria = if a.criteria.is_empty() { ALL_CRITERIA.to_vec() } else { a.criteria.clone() };
    for &c in &criteria {
        check_criterion(c)?;
    }
    let ctx = Ctx {
        seed: g.seed,
        caps: g.caps,
        fixtures: None,
    };
    let workers = a
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let results = run_suite(&criteria, &ctx, workers);
    let mut text = String::new();
    for res in &results {
        text.push_str(&res.line());
        text.push('\n');
    }
    let passed = results.iter().filter(|r| r.pass).count();
    text.push_str(&format!("{passed}/{} criteria pass\n", results.len()));
    if a.verbose {
        for res in &results {
            for rep in &res.reports {
                text.push('\n');
                text.push_str(&rep.render(g.format));
            }
        }
    }
    Ok(Outcome {
        pass: passed == results.len(),
        text,
    })
}

fn report(g: &Global, a: ReportArgs) -> Result<Outcome> {
    if a.list {
        let mut text = String::new();
        for e in EXPERIMENTS {
            let c = if e.criterion == 0 { "-".to_string() } else { e.criterion.to_string() };
            text.push_str(&format!("{:<18} {:>2}  {}\n", e.id, c, e.about));
        }
        return Ok(Outcome::ok(text));
    }
    let id = a.experiment.expect("required unless --list");
    let e = find(&id).ok_or_else(|| anyhow!("unknown experiment `{id}`; see `corrko report --list`"))?;
    let ctx = Ctx {
        seed: g.seed,
        caps: g.caps,
        fixtures: a.fixtures,
    };
    let r = run_experiment(e, &ctx)?;
    let text = r.render(g.format);
    let pass = r.passed();
    match a.out {
        Some(p) => {
            write(&p, &text)?;
            Ok(Outcome {
                text: format!("wrote {}\n", p.display()),
                pass,
            })
        }
        None => Ok(Outcome { text, pass }),
    }
}
