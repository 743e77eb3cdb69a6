//! The cancellation LP: orienteering rows linked to per-vertex processing
//! variables `z_{u,t}` (run for at least `t` steps) and `s_{u,t}` (stopped
//! after exactly `t` steps).

use corrko_core::rational::{to_f64, Rational};
use corrko_core::{CorrKOInstance, JointDistribution};
use num::bigint::BigUint;
use num::traits::Zero;

use crate::error::{LpError, Result};
use crate::kolp::{add_orienteering_rows, orienteering_violation, solve_with_cuts, KoLpPoint, OrientLayout, CHECK_TOL};
use crate::simplex::{LinearProgram, Objective, RowSense};

/// Largest processing budget the pseudo-polynomial LP accepts.
pub const CKOC_MAX_W: u64 = 64;

/// `Pr[S = t | S >= t]`, zero when `Pr[S >= t] = 0`.
pub fn hazard(dist: &JointDistribution, t: u64) -> Rational {
    let t = BigUint::from(t);
    let tail = dist.prob_size_ge(&t);
    if tail.is_zero() {
        Rational::zero()
    } else {
        dist.prob_size_eq(&t) / tail
    }
}

/// `Pr[S = t | S >= t] * E[R | S = t]`, the objective coefficient of `z_{u,t}`.
pub fn hazard_reward(dist: &JointDistribution, t: u64) -> Rational {
    let t = BigUint::from(t);
    let tail = dist.prob_size_ge(&t);
    if tail.is_zero() {
        Rational::zero()
    } else {
        dist.reward_mass_at(&t) / tail
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CkocLayout {
    pub orient: OrientLayout,
    pub w: u64,
    /// `zt[u][t]` for `t` in `0..=W`.
    pub zt: Vec<Vec<usize>>,
    /// `s[u][t]` for `t` in `0..=W`.
    pub s: Vec<Vec<usize>>,
}

fn budget_of(inst: &CorrKOInstance) -> Result<u64> {
    match inst.w_u64() {
        Some(w) if w <= CKOC_MAX_W => Ok(w),
        _ => Err(LpError::Invalid(format!("processing budget above {CKOC_MAX_W}"))),
    }
}

/// Builds the LP with starting cuts only. Every atom larger than `W/2` must
/// carry zero reward.
pub fn build_ckoclp(inst: &CorrKOInstance) -> Result<(LinearProgram, CkocLayout)> {
    let w = budget_of(inst)?;
    let half = inst.half_w();
    if inst
        .dists()
        .iter()
        .any(|d| d.atoms().iter().any(|a| a.size > half && !a.reward.is_zero()))
    {
        return Err(LpError::Invalid("an atom larger than W/2 carries reward".into()));
    }
    let n = inst.n();
    let mut lp = LinearProgram::new(Objective::Maximize);
    let allowed: Vec<bool> = (0..n).map(|u| u != inst.root()).collect();
    let orient = add_orienteering_rows(&mut lp, inst.metric(), inst.b(), &allowed, &vec![0.0; n]);
    let mut zt = vec![];
    let mut s = vec![];
    for u in 0..n {
        let d = inst.dist(u);
        zt.push(
            (0..=w)
                .map(|t| lp.add_var(format!("zt_{u}_{t}"), to_f64(&hazard_reward(d, t))))
                .collect::<Vec<_>>(),
        );
        s.push((0..=w).map(|t| lp.add_var(format!("s_{u}_{t}"), 0.0)).collect::<Vec<_>>());
    }
    for u in 0..n {
        let mut link: Vec<(usize, f64)> = (0..n)
            .filter_map(|v| orient.z[v][u].map(|i| (i, 1.0)))
            .collect();
        link.push((zt[u][0], -1.0));
        lp.add_row(format!("link_{u}"), link, RowSense::Eq, 0.0);
        for t in 0..=w as usize {
            let mut ck1 = vec![(zt[u][t], 1.0), (s[u][t], -1.0)];
            if t < w as usize {
                ck1.push((zt[u][t + 1], -1.0));
            }
            lp.add_row(format!("CK1_{u}_{t}"), ck1, RowSense::Eq, 0.0);
            let h = to_f64(&hazard(inst.dist(u), t as u64));
            lp.add_row(format!("CK2_{u}_{t}"), vec![(s[u][t], 1.0), (zt[u][t], -h)], RowSense::Ge, 0.0);
        }
    }
    let ck3: Vec<(usize, f64)> = (0..n)
        .flat_map(|u| (1..=w as usize).map(move |t| (u, t)))
        .map(|(u, t)| (s[u][t], t as f64))
        .collect();
    lp.add_row("CK3", ck3, RowSense::Le, w as f64);
    Ok((lp, CkocLayout { orient, w, zt, s }))
}

#[derive(Debug, Clone)]
pub struct CkocLpSolution {
    pub layout: CkocLayout,
    pub point: KoLpPoint,
    /// `zt[u][t]` values.
    pub zt: Vec<Vec<f64>>,
    pub s: Vec<Vec<f64>>,
    pub objective: f64,
    pub rounds: usize,
    pub cuts: usize,
    pub lp: LinearProgram,
}

impl CkocLpSolution {
    /// `sum_t t * s_{u,t}`.
    pub fn expected_load(&self, u: usize) -> f64 {
        self.s[u].iter().enumerate().map(|(t, s)| t as f64 * s).sum()
    }
}

pub fn solve_ckoclp(inst: &CorrKOInstance) -> Result<CkocLpSolution> {
    let (lp, layout) = build_ckoclp(inst)?;
    let run = solve_with_cuts(lp, inst.metric(), &layout.orient)?;
    let x = &run.solution.x;
    let sol = CkocLpSolution {
        point: layout.orient.point(x),
        zt: layout.zt.iter().map(|r| r.iter().map(|&i| x[i]).collect()).collect(),
        s: layout.s.iter().map(|r| r.iter().map(|&i| x[i]).collect()).collect(),
        objective: run.solution.objective,
        rounds: run.rounds,
        cuts: run.cuts,
        lp: run.lp,
        layout,
    };
    let viol = ckoclp_violation(inst, &sol.point, &sol.zt, &sol.s);
    if viol > CHECK_TOL {
        return Err(LpError::Invalid(format!("CKOC-LP solution violates a row by {viol:e}")));
    }
    Ok(sol)
}

/// Largest violation of any row of the cancellation LP.
pub fn ckoclp_violation(inst: &CorrKOInstance, point: &KoLpPoint, zt: &[Vec<f64>], s: &[Vec<f64>]) -> f64 {
    let Ok(w) = budget_of(inst) else {
        return f64::INFINITY;
    };
    let w = w as usize;
    let mut worst = orienteering_violation(inst.metric(), inst.b(), point);
    let visits = point.visits();
    let mut load = 0.0;
    for u in 0..inst.n() {
        worst = worst.max((visits[u] - zt[u][0]).abs());
        for t in 0..=w {
            let next = if t < w { zt[u][t + 1] } else { 0.0 };
            worst = worst.max((zt[u][t] - s[u][t] - next).abs());
            let h = to_f64(&hazard(inst.dist(u), t as u64));
            worst = worst.max(h * zt[u][t] - s[u][t]);
            worst = worst.max(-zt[u][t]).max(-s[u][t]);
            load += t as f64 * s[u][t];
        }
    }
    worst.max(load - w as f64)
}

/// Objective value of a point of the cancellation LP.
pub fn ckoclp_value(inst: &CorrKOInstance, zt: &[Vec<f64>]) -> f64 {
    (0..inst.n())
        .flat_map(|u| zt[u].iter().enumerate().map(move |(t, z)| (u, t, z)))
        .map(|(u, t, z)| z * to_f64(&hazard_reward(inst.dist(u), t as u64)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use corrko_core::rational::int;
    use corrko_core::{Atom, FiniteMetric};

    fn inst(dists: Vec<JointDistribution>, w: u64) -> CorrKOInstance {
        let n = dists.len();
        CorrKOInstance::new(FiniteMetric::single_location(n), 0, BigUint::from(w), dists).unwrap()
    }

    #[test]
    fn hazard_values() {
        let d = JointDistribution::new(vec![
            Atom::new(1u32, int(2), corrko_core::rational::ratio(1, 2)),
            Atom::new(3u32, int(0), corrko_core::rational::ratio(1, 2)),
        ])
        .unwrap();
        assert_eq!(hazard(&d, 0), int(0));
        assert_eq!(hazard(&d, 1), corrko_core::rational::ratio(1, 2));
        assert_eq!(hazard(&d, 3), int(1));
        assert_eq!(hazard(&d, 4), int(0));
        assert_eq!(hazard_reward(&d, 1), int(1));
    }

    #[test]
    fn point_mass_forces_stopping_at_its_size() {
        let lp = inst(vec![JointDistribution::zero(), JointDistribution::point(2u32, int(3))], 4);
        let sol = solve_ckoclp(&lp).unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-9);
        assert!((sol.s[1][2] - sol.zt[1][2]).abs() < 1e-9);
        assert!((sol.zt[1][3]).abs() < 1e-9);
    }

    #[test]
    fn knapsack_row_limits_total_processing() {
        // Three deterministic unit-size jobs under W = 2; two fit.
        let lp = inst(
            vec![
                JointDistribution::zero(),
                JointDistribution::point(1u32, int(1)),
                JointDistribution::point(1u32, int(1)),
                JointDistribution::point(1u32, int(1)),
            ],
            2,
        );
        let sol = solve_ckoclp(&lp).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-9);
        assert!((0..4).map(|u| sol.expected_load(u)).sum::<f64>() <= 2.0 + 1e-9);
    }

    #[test]
    fn large_rewarded_atoms_are_rejected() {
        let lp = inst(vec![JointDistribution::zero(), JointDistribution::point(3u32, int(1))], 4);
        assert!(matches!(build_ckoclp(&lp), Err(LpError::Invalid(_))));
    }
}
