//! Policy representations and their evaluation.

mod eval;
pub mod format;
mod simulate;

use num::bigint::BigUint;
use num::traits::{One, Signed, Zero};

use crate::error::{CoreError, Result};
use crate::instance::CorrKOInstance;
use crate::rational::Rational;

pub use eval::{
    eval_adaptive_exact, eval_cancellation_exact, eval_nonadaptive_exact, thinned_best_subset,
    thinned_value_exact, ElapsedDist,
};
pub use simulate::{simulate, PolicyRef, SimSummary};

/// A fixed visiting order that starts at the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NonAdaptivePolicy {
    pub sequence: Vec<usize>,
}

impl NonAdaptivePolicy {
    pub fn new(sequence: Vec<usize>) -> Self {
        Self { sequence }
    }

    pub fn root_only(inst: &CorrKOInstance) -> Self {
        Self {
            sequence: vec![inst.root()],
        }
    }

    /// Checks that the sequence starts at the root and has no repeats.
    pub fn check(&self, inst: &CorrKOInstance) -> Result<()> {
        check_sequence(inst, &self.sequence)
    }

    /// The vertices after the root.
    pub fn visits(&self) -> &[usize] {
        &self.sequence[1.min(self.sequence.len())..]
    }
}

pub(crate) fn check_sequence(inst: &CorrKOInstance, seq: &[usize]) -> Result<()> {
    if seq.first() != Some(&inst.root()) {
        return Err(CoreError::InvalidPolicy(
            "sequence must start at the root".into(),
        ));
    }
    let mut seen = vec![false; inst.n()];
    for &v in seq {
        if v >= inst.n() {
            return Err(CoreError::InvalidPolicy(format!("vertex {v} out of range")));
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(CoreError::InvalidPolicy(format!("vertex {v} repeated")));
        }
    }
    Ok(())
}

/// When a vertex's job is cancelled: after `At(t)` time units, or never.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Threshold {
    At(u64),
    Never,
}

pub type ThresholdDist = Vec<(Threshold, Rational)>;

/// A visiting order plus an independent cancellation threshold per position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CancellationPolicy {
    pub sequence: Vec<usize>,
    pub thresholds: Vec<ThresholdDist>,
}

impl CancellationPolicy {
    /// No cancellation anywhere.
    pub fn without_cancellation(pol: &NonAdaptivePolicy) -> Self {
        Self {
            sequence: pol.sequence.clone(),
            thresholds: vec![vec![(Threshold::Never, Rational::one())]; pol.sequence.len()],
        }
    }

    pub fn check(&self, inst: &CorrKOInstance) -> Result<()> {
        check_sequence(inst, &self.sequence)?;
        if self.thresholds.len() != self.sequence.len() {
            return Err(CoreError::InvalidPolicy(
                "one threshold distribution per visited vertex".into(),
            ));
        }
        for (i, td) in self.thresholds.iter().enumerate() {
            let mut total = Rational::zero();
            for (t, p) in td {
                if !p.is_positive() {
                    return Err(CoreError::InvalidPolicy(format!(
                        "threshold probability at position {i} not positive"
                    )));
                }
                if *t == Threshold::At(0) {
                    return Err(CoreError::InvalidPolicy("thresholds start at 1".into()));
                }
                total += p;
            }
            if !total.is_one() {
                return Err(CoreError::InvalidPolicy(format!(
                    "threshold probabilities at position {i} sum to {total}"
                )));
            }
        }
        Ok(())
    }
}

/// One decision node: `vertex` is visited after `elapsed` total processing
/// time, which happens with probability `reach`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyNode {
    pub vertex: usize,
    pub reach: Rational,
    pub elapsed: BigUint,
    pub travel: u64,
    pub parent: Option<(usize, usize)>,
    /// Child per atom of `vertex`'s distribution; `None` means stop.
    pub children: Vec<Option<usize>>,
}

/// An adaptive policy as a decision tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptivePolicyTree {
    nodes: Vec<PolicyNode>,
}

/// Unannotated tree: a vertex and the subtrees keyed by atom index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeShape {
    pub vertex: usize,
    pub children: Vec<(usize, TreeShape)>,
}

impl TreeShape {
    pub fn leaf(vertex: usize) -> Self {
        Self {
            vertex,
            children: Vec::new(),
        }
    }
}

impl AdaptivePolicyTree {
    /// Wraps nodes as given; annotations are checked on evaluation.
    pub fn from_nodes(nodes: Vec<PolicyNode>) -> Self {
        Self { nodes }
    }

    pub fn root_only(inst: &CorrKOInstance) -> Self {
        Self::from_shape(inst, &TreeShape::leaf(inst.root())).expect("root-only tree is valid")
    }

    /// Annotates a shape with reach probabilities, elapsed sizes and travel.
    pub fn from_shape(inst: &CorrKOInstance, shape: &TreeShape) -> Result<Self> {
        if shape.vertex != inst.root() {
            return Err(CoreError::InvalidPolicy("tree must start at the root".into()));
        }
        let mut tree = Self { nodes: Vec::new() };
        let mut on_path = vec![false; inst.n()];
        tree.attach(inst, shape, None, Rational::one(), BigUint::zero(), 0, &mut on_path)?;
        Ok(tree)
    }

    #[allow(clippy::too_many_arguments)]
    fn attach(
        &mut self,
        inst: &CorrKOInstance,
        shape: &TreeShape,
        parent: Option<(usize, usize)>,
        reach: Rational,
        elapsed: BigUint,
        travel: u64,
        on_path: &mut [bool],
    ) -> Result<usize> {
        let v = shape.vertex;
        if v >= inst.n() {
            return Err(CoreError::InvalidPolicy(format!("vertex {v} out of range")));
        }
        if on_path[v] {
            return Err(CoreError::InvalidPolicy(format!("vertex {v} repeated on a path")));
        }
        if travel > inst.b() {
            return Err(CoreError::InvalidPolicy(format!(
                "travel {travel} to vertex {v} exceeds B"
            )));
        }
        let id = self.nodes.len();
        let atoms = inst.dist(v).atoms();
        self.nodes.push(PolicyNode {
            vertex: v,
            reach: reach.clone(),
            elapsed: elapsed.clone(),
            travel,
            parent,
            children: vec![None; atoms.len()],
        });
        on_path[v] = true;
        for (a, child) in &shape.children {
            let atom = atoms.get(*a).ok_or_else(|| {
                CoreError::InvalidPolicy(format!("vertex {v} has no atom {a}"))
            })?;
            if self.nodes[id].children[*a].is_some() {
                return Err(CoreError::InvalidPolicy(format!(
                    "atom {a} of vertex {v} has two subtrees"
                )));
            }
            let e = &elapsed + &atom.size;
            if &e > inst.w() {
                return Err(CoreError::InvalidPolicy(format!(
                    "subtree below the overflowing atom {a} of vertex {v}"
                )));
            }
            let t = travel + inst.d(v, child.vertex);
            let c = self.attach(inst, child, Some((id, *a)), &reach * &atom.prob, e, t, on_path)?;
            self.nodes[id].children[*a] = Some(c);
        }
        on_path[v] = false;
        Ok(id)
    }

    /// The chain tree that follows `pol` on every non-overflowing outcome.
    pub fn from_chain(inst: &CorrKOInstance, pol: &NonAdaptivePolicy) -> Result<Self> {
        pol.check(inst)?;
        let seq = &pol.sequence;
        // Travel-feasible prefix.
        let mut len = 1;
        let mut travel = 0;
        while len < seq.len() {
            travel += inst.d(seq[len - 1], seq[len]);
            if travel > inst.b() {
                break;
            }
            len += 1;
        }
        fn build(inst: &CorrKOInstance, seq: &[usize], pos: usize, elapsed: &BigUint) -> TreeShape {
            let v = seq[pos];
            let mut shape = TreeShape::leaf(v);
            if pos + 1 < seq.len() {
                for (a, atom) in inst.dist(v).atoms().iter().enumerate() {
                    let e = elapsed + &atom.size;
                    if &e <= inst.w() {
                        shape.children.push((a, build(inst, seq, pos + 1, &e)));
                    }
                }
            }
            shape
        }
        Self::from_shape(inst, &build(inst, &seq[..len], 0, &BigUint::zero()))
    }

    pub fn nodes(&self) -> &[PolicyNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &PolicyNode {
        &self.nodes[i]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        self.nodes[i].children.iter().all(Option::is_none)
    }

    /// Node ids from the root down to `i`.
    pub fn path_to(&self, i: usize) -> Vec<usize> {
        let mut path = vec![i];
        let mut cur = i;
        while let Some((p, _)) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    pub fn shape(&self) -> TreeShape {
        fn go(t: &AdaptivePolicyTree, i: usize) -> TreeShape {
            let n = &t.nodes[i];
            TreeShape {
                vertex: n.vertex,
                children: n
                    .children
                    .iter()
                    .enumerate()
                    .filter_map(|(a, c)| c.map(|c| (a, go(t, c))))
                    .collect(),
            }
        }
        go(self, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{Atom, JointDistribution};
    use crate::metric::FiniteMetric;
    use crate::rational::{int, ratio};

    pub(crate) fn line_instance() -> CorrKOInstance {
        // root - 1 - 2 on a line, unit spacing.
        let metric =
            FiniteMetric::new(vec![vec![0, 1, 2], vec![1, 0, 1], vec![2, 1, 0]], 0).unwrap();
        let d1 = JointDistribution::new(vec![
            Atom::new(1u32, int(1), ratio(1, 2)),
            Atom::new(3u32, int(2), ratio(1, 2)),
        ])
        .unwrap();
        let d2 = JointDistribution::point(2u32, int(4));
        CorrKOInstance::new(
            metric,
            2,
            BigUint::from(4u32),
            vec![JointDistribution::zero(), d1, d2],
        )
        .unwrap()
    }

    #[test]
    fn chain_tree_prunes_overflow_and_travel() {
        let inst = line_instance();
        let tree = AdaptivePolicyTree::from_chain(&inst, &NonAdaptivePolicy::new(vec![0, 1, 2]))
            .unwrap();
        // root, vertex 1, then vertex 2 under both outcomes of 1.
        assert_eq!(tree.len(), 4);
        let leaf = tree.nodes().iter().find(|n| n.elapsed == BigUint::from(3u32)).unwrap();
        assert_eq!(leaf.vertex, 2);
        assert_eq!(leaf.reach, ratio(1, 2));
        assert_eq!(leaf.travel, 2);
    }

    #[test]
    fn shape_round_trip() {
        let inst = line_instance();
        let tree = AdaptivePolicyTree::from_chain(&inst, &NonAdaptivePolicy::new(vec![0, 2, 1]))
            .unwrap();
        let again = AdaptivePolicyTree::from_shape(&inst, &tree.shape()).unwrap();
        assert_eq!(again, tree);
    }

    #[test]
    fn repeated_label_rejected() {
        let inst = line_instance();
        let shape = TreeShape {
            vertex: 0,
            children: vec![(
                0,
                TreeShape {
                    vertex: 1,
                    children: vec![(0, TreeShape::leaf(1))],
                },
            )],
        };
        assert!(AdaptivePolicyTree::from_shape(&inst, &shape).is_err());
    }

    #[test]
    fn sequence_checks() {
        let inst = line_instance();
        assert!(NonAdaptivePolicy::new(vec![1, 0]).check(&inst).is_err());
        assert!(NonAdaptivePolicy::new(vec![0, 1, 1]).check(&inst).is_err());
        assert!(NonAdaptivePolicy::new(vec![0, 2]).check(&inst).is_ok());
    }
}
