//! Held-Karp style dynamic program over (visited subset, last vertex).

use corrko_core::{validate_metric, FiniteMetric, Rational};
use num::traits::{Signed, Zero};

use crate::error::{DetError, Result};
use crate::instance::{Solution, Terminals};

/// Largest vertex count the subset DP accepts.
pub const EXACT_CAP: usize = 14;

pub(crate) fn check_cap(n: usize) -> Result<()> {
    if n > EXACT_CAP {
        return Err(DetError::TooLarge { n, cap: EXACT_CAP });
    }
    Ok(())
}

/// Vertices worth considering: terminals plus positive-reward vertices. In a
/// true metric every other vertex can be shortcut away without loss; if the
/// triangle inequality fails all vertices are kept.
pub(crate) fn useful_vertices(metric: &FiniteMetric, terminals: Terminals, rewards: &[Rational]) -> Vec<usize> {
    let metric_ok = validate_metric(metric).is_ok();
    let mut vs = vec![terminals.start];
    if let Some(e) = terminals.end {
        if e != terminals.start {
            vs.push(e);
        }
    }
    for v in 0..metric.n() {
        if !terminals.contains(v) && (!metric_ok || rewards[v].is_positive()) {
            vs.push(v);
        }
    }
    vs
}

/// Table of `f` summed over each subset of `vertices`.
pub(crate) fn subset_sums(vertices: &[usize], f: &[Rational]) -> Vec<Rational> {
    let k = vertices.len();
    let mut out = vec![Rational::zero(); 1 << k];
    for mask in 1usize..1 << k {
        let low = mask.trailing_zeros() as usize;
        out[mask] = &out[mask & (mask - 1)] + &f[vertices[low]];
    }
    out
}

pub(crate) struct SubsetDp<'a> {
    pub metric: &'a FiniteMetric,
    pub terminals: Terminals,
    pub budget: u64,
    pub rewards: &'a [Rational],
    /// Candidate vertices; index 0 is the start, index 1 the end if distinct.
    pub vertices: Vec<usize>,
}

impl SubsetDp<'_> {
    /// Maximum-reward path. `admissible[mask]` filters visited sets and
    /// `enter(mask, i)` gates appending local vertex `i` to reach `mask`.
    /// Ties go to the smallest subset, then the smallest last vertex.
    pub fn solve(&self, admissible: &[bool], enter: impl Fn(usize, usize) -> bool) -> Result<Solution> {
        let k = self.vertices.len();
        debug_assert!(k <= EXACT_CAP + 1);
        let end_local = match self.terminals.end {
            Some(e) if e == self.terminals.start => Some(0),
            Some(_) => Some(1),
            None => None,
        };
        let full = 1usize << k;
        let idx = |mask: usize, v: usize| mask * k + v;
        let mut len = vec![u64::MAX; full * k];
        let mut parent = vec![u8::MAX; full * k];
        if admissible[1] && enter(1, 0) {
            len[idx(1, 0)] = 0;
        }
        let d = |a: usize, b: usize| self.metric.d(self.vertices[a], self.vertices[b]);
        for mask in (1..full).step_by(2) {
            for v in 0..k {
                let cur = len[idx(mask, v)];
                if cur == u64::MAX || end_local == Some(v) {
                    continue;
                }
                for u in 1..k {
                    let nm = mask | 1 << u;
                    if nm == mask {
                        continue;
                    }
                    let nl = cur.saturating_add(d(v, u));
                    if nl > self.budget || !admissible[nm] || nl >= len[idx(nm, u)] || !enter(nm, u) {
                        continue;
                    }
                    len[idx(nm, u)] = nl;
                    parent[idx(nm, u)] = v as u8;
                }
            }
        }
        let rewards = subset_sums(&self.vertices, self.rewards);
        let mut best: Option<(usize, usize)> = None;
        for mask in (1..full).step_by(2) {
            for v in 0..k {
                if len[idx(mask, v)] == u64::MAX || end_local.is_some_and(|e| e != v) {
                    continue;
                }
                if best.is_none_or(|(bm, _)| rewards[mask] > rewards[bm]) {
                    best = Some((mask, v));
                }
            }
        }
        let (mask, last) = best.ok_or(DetError::NoFeasiblePath)?;
        let mut path = Vec::new();
        let (mut m, mut v) = (mask, last);
        loop {
            path.push(self.vertices[v]);
            if m == 1 {
                break;
            }
            let p = parent[idx(m, v)] as usize;
            m &= !(1 << v);
            v = p;
        }
        path.reverse();
        Ok(Solution {
            reward: rewards[mask].clone(),
            path,
        })
    }
}
