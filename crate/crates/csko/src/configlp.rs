//! Configuration LP over portal pairs: one column per `a`-`next(a)` path
//! within the pair's length bound and size cap.

use corrko_core::rational::{pow2, pow2_rat, to_f64, Rational};
use corrko_core::{truncated_mean, CorrKOInstance};
use corrko_detsolve::Path;
use corrko_lp::{simplex_solve, LinearProgram, LpError, LpStatus, Objective, RowSense};

use crate::error::{CskoError, Result};
use crate::structure::{PortalPair, PortalStructure};

pub const CONFIG_MAX_VERTICES: usize = 7;
pub const MAX_CONFIGS: usize = 20_000;

#[derive(Debug, Clone)]
pub struct PairConfigs {
    pub configs: Vec<Path>,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ConfigLpSolution {
    pub pairs: Vec<PairConfigs>,
    pub objective: f64,
    pub lp: LinearProgram,
    pub lp_x: Vec<f64>,
}

impl ConfigLpSolution {
    pub fn num_configs(&self) -> usize {
        self.pairs.iter().map(|p| p.configs.len()).sum()
    }
}

/// All simple `a`-`b` paths of length at most `D_a` whose vertices other
/// than `b` have `μ^j`-weight at most `2^j`. The root is never an interior
/// vertex.
pub fn enumerate_configs(inst: &CorrKOInstance, pair: &PortalPair, cap: usize) -> Result<Vec<Path>> {
    let j = pair.level;
    let mu: Vec<Rational> = inst.dists().iter().map(|d| truncated_mean(d, j)).collect();
    let size_cap = pow2_rat(j);
    let mut out = vec![];
    let mut path = vec![pair.a];
    let mut on = vec![false; inst.n()];
    on[pair.a] = true;
    on[pair.b] = true;
    fn go(
        inst: &CorrKOInstance,
        pair: &PortalPair,
        mu: &[Rational],
        size_cap: &Rational,
        cap: usize,
        path: &mut Path,
        on: &mut [bool],
        len: u64,
        size: Rational,
        out: &mut Vec<Path>,
    ) -> Result<()> {
        let cur = *path.last().expect("non-empty");
        if len + inst.d(cur, pair.b) <= pair.bound {
            let mut p = path.clone();
            p.push(pair.b);
            out.push(p);
            if out.len() > cap {
                return Err(CskoError::TooLarge {
                    what: "configuration set",
                    size: out.len(),
                    cap,
                });
            }
        }
        for v in 0..inst.n() {
            if on[v] || v == inst.root() {
                continue;
            }
            let l = len + inst.d(cur, v);
            if l + inst.d(v, pair.b) > pair.bound {
                continue;
            }
            let s = &size + &mu[v];
            if s > *size_cap {
                continue;
            }
            on[v] = true;
            path.push(v);
            go(inst, pair, mu, size_cap, cap, path, on, l, s, out)?;
            path.pop();
            on[v] = false;
        }
        Ok(())
    }
    let start_size = mu[pair.a].clone();
    go(inst, pair, &mu, &size_cap, cap, &mut path, &mut on, 0, start_size, &mut out)?;
    Ok(out)
}

fn body_mu(inst: &CorrKOInstance, tau: &[usize], j: u64) -> f64 {
    to_f64(&tau[..tau.len() - 1].iter().map(|&v| truncated_mean(inst.dist(v), j)).sum::<Rational>())
}

fn body_reward(inst: &CorrKOInstance, tau: &[usize], j: u64) -> f64 {
    let t = pow2(j) - 1u32;
    to_f64(&tau[..tau.len() - 1].iter().map(|&v| inst.pi(v, &t)).sum::<Rational>())
}

pub fn solve_config_lp(inst: &CorrKOInstance, ps: &PortalStructure) -> Result<ConfigLpSolution> {
    if inst.n() > CONFIG_MAX_VERTICES {
        return Err(CskoError::TooLarge {
            what: "instance for the configuration LP",
            size: inst.n(),
            cap: CONFIG_MAX_VERTICES,
        });
    }
    let mut budget = MAX_CONFIGS;
    let mut sets = Vec::with_capacity(ps.pairs.len());
    for pair in &ps.pairs {
        let c = enumerate_configs(inst, pair, budget)?;
        budget -= c.len();
        sets.push(c);
    }
    let mut lp = LinearProgram::new(Objective::Maximize);
    let mut cols: Vec<Vec<usize>> = vec![];
    let mut cover: Vec<Vec<(usize, f64)>> = vec![vec![]; inst.n()];
    let mut prefix: Vec<Vec<(usize, f64)>> = vec![vec![]; ps.k() as usize + 1];
    for (pi, (pair, configs)) in ps.pairs.iter().zip(&sets).enumerate() {
        let mut ids = vec![];
        for (ti, tau) in configs.iter().enumerate() {
            let id = lp.add_var(format!("x_{pi}_{ti}"), body_reward(inst, tau, pair.level));
            for &v in &tau[..tau.len() - 1] {
                cover[v].push((id, 1.0));
            }
            for (j, row) in prefix.iter_mut().enumerate().skip(pair.level as usize) {
                let m = body_mu(inst, tau, j as u64);
                if m != 0.0 {
                    row.push((id, m));
                }
            }
            ids.push(id);
        }
        lp.add_row(format!("pair_{pi}"), ids.iter().map(|&i| (i, 1.0)).collect(), RowSense::Eq, 1.0);
        cols.push(ids);
    }
    for (v, row) in cover.into_iter().enumerate() {
        if !row.is_empty() {
            lp.add_row(format!("cover_{v}"), row, RowSense::Le, 1.0);
        }
    }
    for (j, row) in prefix.into_iter().enumerate() {
        lp.add_row(format!("prefix_{j}"), row, RowSense::Le, to_f64(&ps.params.prefix_cap(j as u64)));
    }
    let sol = simplex_solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(LpError::Status(if sol.status == LpStatus::Infeasible { "infeasible" } else { "unbounded" }).into());
    }
    let pairs = sets
        .into_iter()
        .zip(&cols)
        .map(|(configs, ids)| PairConfigs {
            configs,
            x: ids.iter().map(|&i| sol.x[i].max(0.0)).collect(),
        })
        .collect();
    Ok(ConfigLpSolution {
        pairs,
        objective: sol.objective,
        lp,
        lp_x: sol.x,
    })
}

/// Largest violation of the configuration rows, recomputed from the
/// columns rather than from the LP matrix.
pub fn config_lp_violation(inst: &CorrKOInstance, ps: &PortalStructure, sol: &ConfigLpSolution) -> f64 {
    let mut worst = 0.0f64;
    let mut cover = vec![0.0; inst.n()];
    let mut prefix = vec![0.0; ps.k() as usize + 1];
    for (pair, pc) in ps.pairs.iter().zip(&sol.pairs) {
        let total: f64 = pc.x.iter().sum();
        worst = worst.max((total - 1.0).abs());
        for (tau, &x) in pc.configs.iter().zip(&pc.x) {
            worst = worst.max(-x);
            for &v in &tau[..tau.len() - 1] {
                cover[v] += x;
            }
            for (j, p) in prefix.iter_mut().enumerate().skip(pair.level as usize) {
                *p += x * body_mu(inst, tau, j as u64);
            }
        }
    }
    for c in cover {
        worst = worst.max(c - 1.0);
    }
    for (j, p) in prefix.into_iter().enumerate() {
        worst = worst.max(p - to_f64(&ps.params.prefix_cap(j as u64)));
    }
    worst
}

/// The integral point that picks each pair's witness path `Q*_{a,b}`, when
/// every witness is among the enumerated columns.
pub fn witness_objective(inst: &CorrKOInstance, ps: &PortalStructure, sol: &ConfigLpSolution) -> Option<f64> {
    let mut total = 0.0;
    for (pair, pc) in ps.pairs.iter().zip(&sol.pairs) {
        if !pc.configs.contains(&pair.path) {
            return None;
        }
        total += body_reward(inst, &pair.path, pair.level);
    }
    Some(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use corrko_core::rational::int;
    use corrko_core::{FiniteMetric, JointDistribution};
    use num::bigint::BigUint;

    #[test]
    fn tight_bound_leaves_only_the_direct_path() {
        let d = vec![vec![0, 2, 1], vec![2, 0, 1], vec![1, 1, 0]];
        let metric = FiniteMetric::new(d, 0).unwrap();
        let dists = vec![
            JointDistribution::zero(),
            JointDistribution::point(0u32, int(1)),
            JointDistribution::point(0u32, int(1)),
        ];
        let inst = CorrKOInstance::new(metric, 2, BigUint::from(1u32), dists).unwrap();
        let pair = PortalPair {
            level: 0,
            a: 0,
            b: 1,
            midpoint: 0,
            gamma: 0,
            bound: 2,
            path: vec![0, 1],
        };
        let configs = enumerate_configs(&inst, &pair, 100).unwrap();
        // 0 -> 2 -> 1 also has length 2.
        assert_eq!(configs, vec![vec![0, 1], vec![0, 2, 1]]);
        let tight = PortalPair { bound: 1, ..pair };
        assert!(enumerate_configs(&inst, &tight, 100).unwrap().is_empty());
    }
}
