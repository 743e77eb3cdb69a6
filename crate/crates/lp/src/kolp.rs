//! The knapsack-orienteering LP: per "furthest vertex" `v`, a rooted
//! preflow `x^v` and visit variables `z^v_u`, with subtour (cut) rows added
//! lazily by max-flow separation.

use corrko_core::rational::{from_f64, int, to_f64};
use corrko_core::FiniteMetric;
use corrko_detsolve::lagrangian::{prepare, reduce_with_guess, OrienteeringSolver};
use corrko_detsolve::{check_knap_orient, DetError, KnapOrientInstance, Path, Solution};
use num::traits::Signed;

use crate::error::{LpError, Result};
use crate::maxflow::{min_cut, scale_capacity};
use crate::simplex::{simplex_solve, LinearProgram, LpSolution, LpStatus, Objective, RowSense};

pub const KOLP_MAX_VERTICES: usize = 10;
pub const MAX_CUT_ROUNDS: usize = 200;
/// Slack for every inequality checked on a returned LP solution.
pub const CHECK_TOL: f64 = 1e-7;
const SEP_TOL: f64 = 1e-8;

/// Variable layout of the orienteering rows shared by the KO-LP and the
/// cancellation LP.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientLayout {
    pub n: usize,
    pub root: usize,
    /// Arcs `(a, b)` with `a != b` and `b` not the root.
    pub arcs: Vec<(usize, usize)>,
    /// `x[v][arc]`, present for active `v`.
    pub x: Vec<Option<Vec<usize>>>,
    /// `z[v][u]`; `z[v][root]` aliases `z[v][v]`.
    pub z: Vec<Vec<Option<usize>>>,
}

impl OrientLayout {
    pub fn active(&self, v: usize) -> bool {
        self.x[v].is_some()
    }

    fn arcs_into(&self, s: &[bool]) -> impl Iterator<Item = usize> + '_ {
        let s = s.to_vec();
        self.arcs
            .iter()
            .enumerate()
            .filter(move |(_, &(a, b))| !s[a] && s[b])
            .map(|(i, _)| i)
    }

    /// Merged `(var, coefficient)` terms of `sum_{v,u} f(u) z^v_u`.
    pub fn z_terms(&self, f: impl Fn(usize) -> f64) -> Vec<(usize, f64)> {
        let mut terms: Vec<(usize, f64)> = vec![];
        for v in 0..self.n {
            for u in 0..self.n {
                let Some(var) = self.z[v][u] else { continue };
                let c = f(u);
                if c != 0.0 {
                    terms.push((var, c));
                }
            }
        }
        terms.sort_by_key(|t| t.0);
        let mut merged: Vec<(usize, f64)> = vec![];
        for (var, c) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == var => last.1 += c,
                _ => merged.push((var, c)),
            }
        }
        merged
    }

    /// Splits a primal vector into dense `x[v][arc]` and `z[v][u]`.
    pub fn point(&self, sol: &[f64]) -> KoLpPoint {
        let x = (0..self.n)
            .map(|v| match &self.x[v] {
                Some(idx) => idx.iter().map(|&i| sol[i]).collect(),
                None => vec![0.0; self.arcs.len()],
            })
            .collect();
        let z = (0..self.n)
            .map(|v| (0..self.n).map(|u| self.z[v][u].map_or(0.0, |i| sol[i])).collect())
            .collect();
        KoLpPoint { x, z }
    }
}

pub fn all_arcs(n: usize, root: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && b != root)
        .collect()
}

/// Adds the orienteering variables and rows to `lp`. `allowed(u)` filters
/// which non-root vertices may be visited; `reward[u]` is the objective
/// coefficient of every `z^v_u`.
pub fn add_orienteering_rows(
    lp: &mut LinearProgram,
    metric: &FiniteMetric,
    budget: u64,
    allowed: &[bool],
    reward: &[f64],
) -> OrientLayout {
    let n = metric.n();
    let root = metric.root();
    let arcs = all_arcs(n, root);
    let dr = |u: usize| metric.d(root, u);
    let active: Vec<bool> = (0..n).map(|v| v == root || (allowed[v] && dr(v) <= budget)).collect();
    let mut x = vec![None; n];
    let mut z = vec![vec![None; n]; n];
    for v in (0..n).filter(|&v| active[v]) {
        x[v] = Some(
            arcs.iter()
                .map(|&(a, b)| lp.add_var(format!("x_{v}_{a}_{b}"), 0.0))
                .collect::<Vec<_>>(),
        );
        for u in 0..n {
            if u != root && (u == v || (allowed[u] && dr(u) <= dr(v))) {
                z[v][u] = Some(lp.add_var(format!("z_{v}_{u}"), 0.0));
            }
        }
        if v != root {
            z[v][root] = z[v][v];
        } else {
            z[v][root] = Some(lp.add_var(format!("z_{v}_{v}"), 0.0));
        }
    }
    let layout = OrientLayout { n, root, arcs, x, z };
    for (var, c) in layout.z_terms(|u| reward[u]) {
        lp.costs[var] += c;
    }
    for v in (0..n).filter(|&v| active[v]) {
        let xv = layout.x[v].as_ref().expect("active");
        let zvv = layout.z[v][v].expect("active");
        for u in (0..n).filter(|&u| u != root) {
            let mut row = vec![];
            for (i, &(a, b)) in layout.arcs.iter().enumerate() {
                if b == u {
                    row.push((xv[i], 1.0));
                } else if a == u {
                    row.push((xv[i], -1.0));
                }
            }
            lp.add_row(format!("O1_{v}_{u}"), row, RowSense::Ge, 0.0);
        }
        let length: Vec<(usize, f64)> = layout
            .arcs
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| metric.d(a, b) > 0)
            .map(|(i, &(a, b))| (xv[i], metric.d(a, b) as f64))
            .chain(std::iter::once((zvv, -(budget as f64))))
            .collect();
        lp.add_row(format!("O4len_{v}"), length, RowSense::Le, 0.0);
        let out: Vec<(usize, f64)> = layout
            .arcs
            .iter()
            .enumerate()
            .filter(|(_, &(a, _))| a == root)
            .map(|(i, _)| (xv[i], 1.0))
            .chain(std::iter::once((zvv, -1.0)))
            .collect();
        // With the root furthest, the trivial path sends no flow.
        let sense = if v == root { RowSense::Le } else { RowSense::Eq };
        lp.add_row(format!("O4out_{v}"), out, sense, 0.0);
        // Starting cuts: singletons and the whole non-root set.
        for u in (0..n).filter(|&u| u != root) {
            let Some(zvu) = layout.z[v][u] else { continue };
            let mut single = vec![false; n];
            single[u] = true;
            let mut row: Vec<(usize, f64)> = layout.arcs_into(&single).map(|i| (xv[i], 1.0)).collect();
            row.push((zvu, -1.0));
            lp.add_row(format!("O2_{v}_{u}_single"), row, RowSense::Ge, 0.0);
            if u != v {
                lp.add_row(format!("O2_{v}_{u}_all"), vec![(zvv, 1.0), (zvu, -1.0)], RowSense::Ge, 0.0);
            }
        }
    }
    let unit: Vec<(usize, f64)> = (0..n).filter_map(|v| layout.z[v][v].map(|i| (i, 1.0))).collect();
    lp.add_row("O5", unit, RowSense::Eq, 1.0);
    layout
}

/// Dense per-`v` values of the orienteering variables.
#[derive(Debug, Clone, PartialEq)]
pub struct KoLpPoint {
    /// `x[v][arc]`, indexed like [`OrientLayout::arcs`].
    pub x: Vec<Vec<f64>>,
    /// `z[v][u]`, with `z[v][root] = z[v][v]`.
    pub z: Vec<Vec<f64>>,
}

impl KoLpPoint {
    /// Total visit mass `sum_v z^v_u` of each vertex.
    pub fn visits(&self) -> Vec<f64> {
        let n = self.z.len();
        (0..n).map(|u| (0..n).map(|v| self.z[v][u]).sum()).collect()
    }

    /// The point induced by a probability distribution over rooted paths,
    /// each charged to its furthest vertex (smallest id on ties).
    pub fn from_paths(metric: &FiniteMetric, paths: &[(f64, Path)]) -> Self {
        let n = metric.n();
        let root = metric.root();
        let arcs = all_arcs(n, root);
        let mut x = vec![vec![0.0; arcs.len()]; n];
        let mut z = vec![vec![0.0; n]; n];
        for (p, path) in paths {
            let v = *path
                .iter()
                .max_by_key(|&&u| (metric.d(root, u), std::cmp::Reverse(u)))
                .expect("non-empty path");
            for &u in path {
                z[v][u] += p;
            }
            for w in path.windows(2) {
                let i = arcs.iter().position(|&a| a == (w[0], w[1])).expect("arc exists");
                x[v][i] += p;
            }
        }
        Self { x, z }
    }
}

/// Largest violation of the subtour rows, found by max-flow for each
/// `(v, u)`; returns the violation and a violated cut's sink side.
pub fn separate(metric: &FiniteMetric, point: &KoLpPoint, v: usize, u: usize) -> (f64, Vec<bool>) {
    let n = metric.n();
    let root = metric.root();
    let arcs = all_arcs(n, root);
    let mut cap = vec![vec![0u64; n]; n];
    for (i, &(a, b)) in arcs.iter().enumerate() {
        cap[a][b] = scale_capacity(point.x[v][i]);
    }
    let cut = min_cut(&cap, root, u);
    let sink: Vec<bool> = cut.source_side.iter().map(|s| !s).collect();
    let value: f64 = arcs
        .iter()
        .enumerate()
        .filter(|(_, &(a, b))| !sink[a] && sink[b])
        .map(|(i, _)| point.x[v][i])
        .sum();
    (point.z[v][u] - value, sink)
}

/// Subtour violation by enumerating every `S` of non-root vertices.
pub fn o2_violation_enum(metric: &FiniteMetric, point: &KoLpPoint) -> f64 {
    let n = metric.n();
    let root = metric.root();
    let arcs = all_arcs(n, root);
    let others: Vec<usize> = (0..n).filter(|&u| u != root).collect();
    let mut worst: f64 = 0.0;
    for mask in 1u32..1 << others.len() {
        let mut s = vec![false; n];
        for (k, &u) in others.iter().enumerate() {
            s[u] = mask >> k & 1 == 1;
        }
        for v in 0..n {
            let inflow: f64 = arcs
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| !s[a] && s[b])
                .map(|(i, _)| point.x[v][i])
                .sum();
            for &u in others.iter().filter(|&&u| s[u]) {
                worst = worst.max(point.z[v][u] - inflow);
            }
        }
    }
    worst
}

/// Largest violation of the orienteering rows (preflow, subtour, distance
/// bound, length budget, unit mass, non-negativity) by `point`.
pub fn orienteering_violation(metric: &FiniteMetric, budget: u64, point: &KoLpPoint) -> f64 {
    let n = metric.n();
    let root = metric.root();
    let arcs = all_arcs(n, root);
    let mut worst: f64 = 0.0;
    for v in 0..n {
        for &val in point.x[v].iter().chain(&point.z[v]) {
            worst = worst.max(-val);
        }
        for u in (0..n).filter(|&u| u != root) {
            let inflow: f64 = arcs.iter().enumerate().filter(|(_, &(_, b))| b == u).map(|(i, _)| point.x[v][i]).sum();
            let outflow: f64 = arcs.iter().enumerate().filter(|(_, &(a, _))| a == u).map(|(i, _)| point.x[v][i]).sum();
            worst = worst.max(outflow - inflow);
            if metric.d(root, u) > metric.d(root, v) {
                worst = worst.max(point.z[v][u].abs());
            }
            worst = worst.max(separate(metric, point, v, u).0);
        }
        let len: f64 = arcs.iter().enumerate().map(|(i, &(a, b))| metric.d(a, b) as f64 * point.x[v][i]).sum();
        worst = worst.max(len - budget as f64 * point.z[v][v]);
        let out: f64 = arcs.iter().enumerate().filter(|(_, &(a, _))| a == root).map(|(i, _)| point.x[v][i]).sum();
        worst = worst.max(if v == root { out - point.z[v][v] } else { (out - point.z[v][v]).abs() });
        if v != root {
            worst = worst.max((point.z[v][root] - point.z[v][v]).abs());
        }
    }
    let unit: f64 = (0..n).map(|v| point.z[v][v]).sum();
    worst.max((unit - 1.0).abs())
}

#[derive(Debug, Clone)]
pub struct CutLoop {
    pub lp: LinearProgram,
    pub solution: LpSolution,
    pub rounds: usize,
    pub cuts: usize,
}

/// Solves `lp`, adding violated subtour rows until none remain.
pub fn solve_with_cuts(mut lp: LinearProgram, metric: &FiniteMetric, layout: &OrientLayout) -> Result<CutLoop> {
    let n = layout.n;
    let mut cuts = 0;
    for round in 1..=MAX_CUT_ROUNDS {
        let sol = simplex_solve(&lp)?;
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Err(LpError::Status("infeasible")),
            LpStatus::Unbounded => return Err(LpError::Status("unbounded")),
        }
        let point = layout.point(&sol.x);
        let mut added = 0;
        for v in (0..n).filter(|&v| layout.active(v)) {
            let xv = layout.x[v].as_ref().expect("active");
            for u in (0..n).filter(|&u| u != layout.root) {
                let Some(zvu) = layout.z[v][u] else { continue };
                if point.z[v][u] <= SEP_TOL {
                    continue;
                }
                let (viol, sink) = separate(metric, &point, v, u);
                if viol > SEP_TOL {
                    let mut row: Vec<(usize, f64)> = layout.arcs_into(&sink).map(|i| (xv[i], 1.0)).collect();
                    row.push((zvu, -1.0));
                    let tag: String = sink.iter().map(|&s| if s { '1' } else { '0' }).collect();
                    lp.add_row(format!("O2_{v}_{u}_{tag}"), row, RowSense::Ge, 0.0);
                    added += 1;
                }
            }
        }
        if added == 0 {
            return Ok(CutLoop {
                lp,
                solution: sol,
                rounds: round,
                cuts,
            });
        }
        cuts += added;
    }
    Err(LpError::SeparationLimit(MAX_CUT_ROUNDS))
}

#[derive(Debug, Clone)]
pub struct KoLpSolution {
    pub layout: OrientLayout,
    pub point: KoLpPoint,
    pub objective: f64,
    pub rounds: usize,
    pub cuts: usize,
    /// The final LP including every separated cut, and its primal vector.
    pub lp: LinearProgram,
    pub x: Vec<f64>,
}

fn rooted(inst: &KnapOrientInstance) -> Result<()> {
    if inst.terminals.end.is_some() || inst.terminals.start != inst.metric.root() {
        return Err(LpError::Invalid("KO-LP needs a rooted instance at the metric root".into()));
    }
    if inst.n() > KOLP_MAX_VERTICES {
        return Err(LpError::TooLarge {
            n: inst.n(),
            cap: KOLP_MAX_VERTICES,
        });
    }
    Ok(())
}

/// Builds the KO-LP without subtour cuts beyond the starting ones. Vertices
/// heavier than the budget left after the root are excluded.
pub fn build_kolp(inst: &KnapOrientInstance) -> Result<(LinearProgram, OrientLayout)> {
    rooted(inst)?;
    let n = inst.n();
    let root = inst.terminals.start;
    let weights: Vec<f64> = inst.weights.iter().map(to_f64).collect();
    let residual = inst.knap_budget.as_ref().map(|w| w - &inst.weights[root]);
    if residual.as_ref().is_some_and(|r| r.is_negative()) {
        return Err(LpError::Det(DetError::NoFeasiblePath));
    }
    let allowed: Vec<bool> = (0..n)
        .map(|u| u != root && residual.as_ref().is_none_or(|r| &inst.weights[u] <= r))
        .collect();
    let rewards: Vec<f64> = inst.rewards.iter().map(to_f64).collect();
    let mut lp = LinearProgram::new(Objective::Maximize);
    let layout = add_orienteering_rows(&mut lp, &inst.metric, inst.length_budget, &allowed, &rewards);
    if let Some(w) = &inst.knap_budget {
        lp.add_row("KN", layout.z_terms(|u| weights[u]), RowSense::Le, to_f64(w));
    }
    Ok((lp, layout))
}

pub fn solve_kolp(inst: &KnapOrientInstance) -> Result<KoLpSolution> {
    let (lp, layout) = build_kolp(inst)?;
    let run = solve_with_cuts(lp, &inst.metric, &layout)?;
    let point = layout.point(&run.solution.x);
    let sol = KoLpSolution {
        layout,
        point,
        objective: run.solution.objective,
        rounds: run.rounds,
        cuts: run.cuts,
        lp: run.lp,
        x: run.solution.x,
    };
    let viol = kolp_violation(inst, &sol.point);
    if viol > CHECK_TOL {
        return Err(LpError::Invalid(format!("KO-LP solution violates a row by {viol:e}")));
    }
    Ok(sol)
}

/// Largest violation of any KO-LP constraint, including the knapsack row.
pub fn kolp_violation(inst: &KnapOrientInstance, point: &KoLpPoint) -> f64 {
    let mut worst = orienteering_violation(&inst.metric, inst.length_budget, point);
    if let Some(w) = &inst.knap_budget {
        let n = inst.n();
        let load: f64 = (0..n)
            .flat_map(|v| (0..n).map(move |u| (v, u)))
            .map(|(v, u)| point.z[v][u] * to_f64(&inst.weights[u]))
            .sum();
        worst = worst.max(load - to_f64(w));
    }
    worst
}

/// Objective value `sum_{v,u} z^v_u pi_u` of a point.
pub fn kolp_value(inst: &KnapOrientInstance, point: &KoLpPoint) -> f64 {
    let n = inst.n();
    (0..n)
        .flat_map(|v| (0..n).map(move |u| (v, u)))
        .map(|(v, u)| point.z[v][u] * to_f64(&inst.rewards[u]))
        .sum()
}

/// The path encoded by a 0/1 solution, if it is one.
pub fn decode_integral(inst: &KnapOrientInstance, point: &KoLpPoint) -> Option<Path> {
    let n = inst.n();
    let root = inst.terminals.start;
    let arcs = all_arcs(n, root);
    let near = |a: f64, b: f64| (a - b).abs() <= 1e-9;
    let binary = |x: f64| near(x, 0.0) || near(x, 1.0);
    if !point.x.iter().chain(&point.z).flatten().all(|&x| binary(x)) {
        return None;
    }
    let v = (0..n).find(|&v| near(point.z[v][v], 1.0))?;
    let mut path = vec![root];
    let mut cur = root;
    while let Some(i) = (0..arcs.len()).find(|&i| arcs[i].0 == cur && near(point.x[v][i], 1.0)) {
        cur = arcs[i].1;
        if path.contains(&cur) {
            return None;
        }
        path.push(cur);
    }
    let mut on_path: Vec<usize> = path.clone();
    on_path.sort_unstable();
    let mut visited: Vec<usize> = (0..n).filter(|&u| near(point.z[v][u], 1.0)).collect();
    if !visited.contains(&root) {
        visited.push(root);
        visited.sort_unstable();
    }
    (on_path == visited && check_knap_orient(inst, &path).is_ok()).then_some(path)
}

/// Rounds a KO-LP solution to a feasible path with reward at least a fifth
/// of the LP value: one pass of the Lagrangian reduction with `LB` set to
/// the LP objective and factor 3 for the inner solver.
pub fn round_kolp(inst: &KnapOrientInstance, sol: &KoLpSolution, base: &dyn OrienteeringSolver) -> Result<Solution> {
    rooted(inst)?;
    if let Some(path) = decode_integral(inst, &sol.point) {
        return Ok(Solution {
            reward: inst.reward(&path),
            path,
        });
    }
    let trivial = vec![inst.terminals.start];
    let lb = from_f64(sol.objective.max(0.0));
    if !lb.is_positive() || inst.knap_budget.is_none() {
        let path = if lb.is_positive() { base.solve(inst)?.path } else { trivial };
        check_knap_orient(inst, &path).map_err(DetError::Infeasible)?;
        return Ok(Solution {
            reward: inst.reward(&path),
            path,
        });
    }
    let prep = prepare(inst)?;
    let path = reduce_with_guess(base, &prep, &lb, &int(3))?;
    check_knap_orient(inst, &path).map_err(DetError::Infeasible)?;
    Ok(Solution {
        reward: inst.reward(&path),
        path,
    })
}
