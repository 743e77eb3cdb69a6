//! Instance generators: the binary-tree adaptivity-gap family, the
//! single-location ordering family, and seeded random families.

use num::bigint::{BigInt, BigUint};
use num::integer::Roots;
use num::traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dist::{Atom, JointDistribution};
use crate::error::{CoreError, Result};
use crate::instance::CorrKOInstance;
use crate::metric::FiniteMetric;
use crate::policy::{AdaptivePolicyTree, TreeShape};
use crate::rational::{int, pow2, pow_rat, ratio, Rational};

/// Parameters of the binary-tree family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdaptGapParams {
    pub height: u32,
}

/// Atom indices used by the binary-tree family.
pub const ATOM_LEFT: usize = 0;
pub const ATOM_RIGHT: usize = 1;
pub const ATOM_STOP: usize = 2;

fn check_height(h: u32) -> Result<u64> {
    if h < 4 {
        return Err(CoreError::Generator(format!("height {h} must be at least 4")));
    }
    if h > 20 {
        return Err(CoreError::Generator(format!("height {h} is too large")));
    }
    let root = (h as u64).sqrt();
    if root * root != h as u64 {
        return Err(CoreError::Generator(format!(
            "height {h} must be a perfect square so that 1/sqrt(H) is rational"
        )));
    }
    Ok(root)
}

/// Level of heap-indexed tree node `i` (the tree root, index 1, has level `h`).
fn level(h: u32, i: usize) -> u32 {
    h - (usize::BITS - 1 - i.leading_zeros())
}

/// Ancestors of heap node `i` whose path to `i` turns right.
fn right_turns(mut i: usize) -> Vec<usize> {
    let mut out = Vec::new();
    while i > 1 {
        if i % 2 == 1 {
            out.push(i / 2);
        }
        i /= 2;
    }
    out
}

/// Complete binary tree with `H` levels plus a dummy root at distance zero
/// from the tree root. Vertex 0 is the dummy root; tree nodes are heap
/// indexed from 1 (left child `2i`, right child `2i+1`).
///
/// Every tree node `v` has three outcomes, in this atom order:
/// size 0 (continue left), size `s2_v` (continue right), and size `s1_v`
/// with reward `(1 - 1/sqrt H)^{#right turns}` (stop).
pub fn gen_adaptgap(p: AdaptGapParams) -> Result<CorrKOInstance> {
    let h = p.height;
    let sqrt_h = check_height(h)?;
    let n = 1usize << h;
    let w = pow2(1u64 << (h + 1));
    let b = (1u64 << (h - 1)) - 1;

    // Depth-to-root distances and the tree metric.
    let mut to_top = vec![0u64; n];
    for (i, t) in to_top.iter_mut().enumerate().skip(2) {
        // Sum of edge lengths 2^{l-2} for levels above node i.
        *t = (level(h, i) + 1..=h).map(|l| 1u64 << (l - 2)).sum();
    }
    let lca = |mut a: usize, mut b: usize| {
        while a != b {
            if a > b {
                a /= 2;
            } else {
                b /= 2;
            }
        }
        a
    };
    let node = |v: usize| if v == 0 { 1 } else { v };
    let mut dist = vec![vec![0u64; n]; n];
    for u in 0..n {
        for v in u + 1..n {
            let (a, c) = (node(u), node(v));
            let d = to_top[a] + to_top[c] - 2 * to_top[lca(a, c)];
            dist[u][v] = d;
            dist[v][u] = d;
        }
    }

    let q = ratio(1, sqrt_h as i64);
    let p1 = ratio(1, h as i64);
    let p3 = Rational::one() - &q - &p1;
    let keep = Rational::one() - &q;
    let s2 = |i: usize| -> BigUint {
        let e: u64 = (1u64 << level(h, i)) + right_turns(i).iter().map(|&w| 1u64 << level(h, w)).sum::<u64>();
        pow2(e)
    };
    let mut dists = vec![JointDistribution::zero()];
    for i in 1..n {
        let rt = right_turns(i);
        let used: BigUint = rt.iter().map(|&w| s2(w)).sum();
        let atoms = vec![
            Atom::new(0u32, Rational::zero(), p3.clone()),
            Atom::new(s2(i), Rational::zero(), q.clone()),
            Atom::new(&w - used, pow_rat(&keep, rt.len() as u64), p1.clone()),
        ];
        dists.push(JointDistribution::new(atoms)?);
    }
    CorrKOInstance::new(FiniteMetric::new(dist, 0)?, b, w, dists)
}

/// Recovers `H` if `inst` is exactly the binary-tree instance of that height.
pub fn adaptgap_height(inst: &CorrKOInstance) -> Result<u32> {
    let n = inst.n();
    let not_family = || {
        CoreError::InvalidInstance("instance was not produced by the binary-tree generator".into())
    };
    if !n.is_power_of_two() || n < 16 {
        return Err(not_family());
    }
    let h = n.trailing_zeros();
    match gen_adaptgap(AdaptGapParams { height: h }) {
        Ok(expected) if &expected == inst => Ok(h),
        _ => Err(not_family()),
    }
}

/// Tree levels per vertex (dummy root gets `H + 1`); non-adaptive search
/// restricted to strictly decreasing levels uses these.
pub fn adaptgap_levels(inst: &CorrKOInstance) -> Result<Vec<u32>> {
    let h = adaptgap_height(inst)?;
    Ok((0..inst.n())
        .map(|v| if v == 0 { h + 1 } else { level(h, v) })
        .collect())
}

/// The adaptive policy that walks down the tree: left on a zero size, right
/// on the middle size, stop on the large size or at a leaf.
pub fn adaptgap_policy(inst: &CorrKOInstance) -> Result<AdaptivePolicyTree> {
    let h = adaptgap_height(inst)?;
    fn build(h: u32, i: usize) -> TreeShape {
        let mut s = TreeShape::leaf(i);
        if level(h, i) > 1 {
            s.children.push((ATOM_LEFT, build(h, 2 * i)));
            s.children.push((ATOM_RIGHT, build(h, 2 * i + 1)));
        }
        s
    }
    let shape = TreeShape {
        vertex: 0,
        children: vec![(0, build(h, 1))],
    };
    AdaptivePolicyTree::from_shape(inst, &shape)
}

/// `n` items at one location, item `i` being
/// `(W - 2^{n-i+1} + 1, 1)` w.p. `1/n` and `(2^{n-i}, 0)` otherwise.
pub fn gen_appendix_a(n: u32, w: u64) -> Result<CorrKOInstance> {
    if n == 0 || n > 60 {
        return Err(CoreError::Generator(format!("item count {n} out of range")));
    }
    if w <= 1u64 << (n + 1) {
        return Err(CoreError::Generator(format!(
            "W = {w} must exceed 2^(n+1) = {}",
            1u64 << (n + 1)
        )));
    }
    let mut dists = vec![JointDistribution::zero()];
    for i in 1..=n {
        let mut atoms = vec![Atom::new(w - (1u64 << (n - i + 1)) + 1, int(1), ratio(1, n as i64))];
        if n > 1 {
            atoms.push(Atom::new(1u64 << (n - i), int(0), ratio(n as i64 - 1, n as i64)));
        }
        dists.push(JointDistribution::new(atoms)?);
    }
    CorrKOInstance::new(
        FiniteMetric::single_location(n as usize + 1),
        0,
        BigUint::from(w),
        dists,
    )
}

/// Random points on an integer grid, rounded Euclidean distances, then
/// shortest-path closure.
pub fn random_metric(rng: &mut ChaCha8Rng, n: usize, b: u64) -> FiniteMetric {
    let side = b.max(1) as i64;
    let pts: Vec<(i64, i64)> = (0..n)
        .map(|_| (rng.gen_range(0..=side), rng.gen_range(0..=side)))
        .collect();
    let dist = pts
        .iter()
        .map(|&(x1, y1)| {
            pts.iter()
                .map(|&(x2, y2)| {
                    let dx = (x1 - x2) as f64;
                    let dy = (y1 - y2) as f64;
                    (dx * dx + dy * dy).sqrt().round() as u64
                })
                .collect()
        })
        .collect();
    FiniteMetric::shortest_path_closure(dist, 0).expect("square matrix")
}

fn check_random(n: usize, w: u64) -> Result<()> {
    if n < 2 {
        return Err(CoreError::Generator("need at least two vertices".into()));
    }
    if w == 0 {
        return Err(CoreError::Generator("W must be positive".into()));
    }
    Ok(())
}

/// General random instance: up to `max_atoms` outcomes per vertex with sizes
/// in `[0, W]`, integer rewards in `[0, 9]`, and random rational probabilities.
pub fn gen_random(n: usize, b: u64, w: u64, max_atoms: usize, seed: u64) -> Result<CorrKOInstance> {
    check_random(n, w)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let metric = random_metric(&mut rng, n, b);
    let mut dists = vec![JointDistribution::zero()];
    for _ in 1..n {
        let k = rng.gen_range(1..=max_atoms.max(1));
        let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=4)).collect();
        let total: i64 = weights.iter().sum();
        let atoms = weights
            .iter()
            .map(|&wt| Atom::new(rng.gen_range(0..=w), int(rng.gen_range(0..=9)), ratio(wt, total)))
            .collect();
        dists.push(JointDistribution::new(atoms)?);
    }
    CorrKOInstance::new(metric, b, BigUint::from(w), dists)
}

fn small_prob(rng: &mut ChaCha8Rng, max_num: impl Fn(i64) -> i64) -> Rational {
    let d = rng.gen_range(2..=6);
    Rational::new(BigInt::from(rng.gen_range(1..=max_num(d))), BigInt::from(d))
}

/// Canonical two-point instance: every vertex is `(s1, R)` w.p. `p <= 1/2`
/// and `(s2, 0)` otherwise, with `s1 > floor(W/2) >= s2`. Atom order is
/// `[large, small]`.
pub fn gen_2point(n: usize, b: u64, w: u64, seed: u64) -> Result<CorrKOInstance> {
    check_random(n, w)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let metric = random_metric(&mut rng, n, b);
    let half = w / 2;
    let mut dists = vec![JointDistribution::zero()];
    for _ in 1..n {
        let p = small_prob(&mut rng, |d| d / 2);
        let s1 = rng.gen_range(half + 1..=w);
        let s2 = rng.gen_range(0..=half);
        let r = int(rng.gen_range(1..=9));
        dists.push(JointDistribution::new(vec![
            Atom::new(s1, r, p.clone()),
            Atom::new(s2, Rational::zero(), Rational::one() - p),
        ])?);
    }
    CorrKOInstance::new(metric, b, BigUint::from(w), dists)
}

/// Weighted Bernoulli instance: `(s, R)` w.p. `p` and `(0, 0)` otherwise,
/// with `s` in `[1, W]` and `p` in `(0, 1)`. Atom order is `[sized, zero]`.
pub fn gen_bernoulli(n: usize, b: u64, w: u64, seed: u64) -> Result<CorrKOInstance> {
    check_random(n, w)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let metric = random_metric(&mut rng, n, b);
    let mut dists = vec![JointDistribution::zero()];
    for _ in 1..n {
        let p = small_prob(&mut rng, |d| d - 1);
        let s = rng.gen_range(1..=w);
        let r = int(rng.gen_range(1..=9));
        dists.push(JointDistribution::new(vec![
            Atom::new(s, r, p.clone()),
            Atom::new(0u32, Rational::zero(), Rational::one() - p),
        ])?);
    }
    CorrKOInstance::new(metric, b, BigUint::from(w), dists)
}
