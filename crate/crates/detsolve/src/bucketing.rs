//! Polynomial-time OrientKD by bucketing vertices on their deadlines.

use corrko_core::rational::int;
use corrko_core::Rational;
use num::traits::{Signed, Zero};

use crate::check::check_orientkd;
use crate::error::{DetError, Result};
use crate::instance::{KnapOrientInstance, OrientKdInstance, Path, Solution};
use crate::lagrangian::KnapOrientSolver;

#[derive(Debug, Clone)]
pub struct BucketRun {
    pub best: Solution,
    /// `N = floor(log2(max KD / min positive KD))`, or `None` when every
    /// usable deadline is zero.
    pub top_bucket: Option<u32>,
    /// Every candidate that was produced, with its bucket index (`-1` for
    /// zero deadlines).
    pub candidates: Vec<(i64, Solution)>,
}

/// Largest `j` with `2^j <= x`, for `x >= 1`.
fn floor_log2(x: &Rational) -> u32 {
    let mut j = 0;
    let mut p = int(2);
    while &p <= x {
        p *= int(2);
        j += 1;
    }
    j
}

/// Splits `q` (without its root) into a prefix of weight at most `cap`, the
/// next single vertex, and the remainder; empty pieces are dropped.
pub fn split_three(weights: &[Rational], q: &[usize], cap: &Rational) -> Vec<Vec<usize>> {
    let mut acc = Rational::zero();
    let mut i = 0;
    while i < q.len() && &acc + &weights[q[i]] <= *cap {
        acc += &weights[q[i]];
        i += 1;
    }
    let mut pieces = vec![q[..i].to_vec()];
    if i < q.len() {
        pieces.push(vec![q[i]]);
        pieces.push(q[i + 1..].to_vec());
    }
    pieces.retain(|p| !p.is_empty());
    pieces
}

pub fn orientkd_bucketing(inst: &OrientKdInstance, knap: &dyn KnapOrientSolver) -> Result<BucketRun> {
    let work = inst.normalized()?;
    let root = work.root();
    let usable: Vec<usize> = (0..work.n()).filter(|&v| v != root && work.usable(v)).collect();
    let kd_min = usable
        .iter()
        .map(|&v| &work.deadlines[v])
        .filter(|kd| kd.is_positive())
        .min()
        .cloned();
    let kd_max = work.max_deadline();
    let top_bucket = kd_min.as_ref().map(|m| floor_log2(&(&kd_max / m)));

    let bucket_of = |v: usize| -> i64 {
        match &kd_min {
            Some(m) if work.deadlines[v].is_positive() => floor_log2(&(&work.deadlines[v] / m)) as i64,
            _ => -1,
        }
    };
    let mut candidates = vec![(
        -1,
        Solution {
            reward: inst.reward(&[root]),
            path: vec![root],
        },
    )];
    let last = top_bucket.map_or(-1, |n| n as i64);
    for j in -1..=last {
        let members: Vec<usize> = usable.iter().copied().filter(|&v| bucket_of(v) == j).collect();
        if members.is_empty() {
            continue;
        }
        let mut rewards = vec![Rational::zero(); work.n()];
        for &v in &members {
            rewards[v] = work.rewards[v].clone();
        }
        let budget = match &kd_min {
            Some(m) if j >= 0 => Some(m * int(1 << (j + 1))),
            _ => None,
        };
        let sub = KnapOrientInstance::new(
            work.metric.clone(),
            work.terminals,
            work.length_budget,
            rewards,
            work.weights.clone(),
            budget,
        )?;
        let q = knap.solve(&sub)?.path;
        // Shortcut to the bucket.
        let q: Vec<usize> = q.into_iter().filter(|v| members.contains(v)).collect();
        let pieces: Vec<Path> = match &kd_min {
            Some(m) if j >= 0 => split_three(&work.weights, &q, &(m * int(1 << j))),
            _ => vec![q],
        };
        for piece in pieces {
            let mut path = vec![root];
            path.extend(piece);
            check_orientkd(inst, &path).map_err(DetError::Infeasible)?;
            candidates.push((
                j,
                Solution {
                    reward: inst.reward(&path),
                    path,
                },
            ));
        }
    }
    let mut best = candidates[0].1.clone();
    for (_, c) in &candidates {
        if c.reward > best.reward {
            best = c.clone();
        }
    }
    Ok(BucketRun {
        best,
        top_bucket,
        candidates,
    })
}
