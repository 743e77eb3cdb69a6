use crate::error::{CoreError, Result};

/// A finite metric on `0..n` with integer distances and a distinguished root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetric {
    dist: Vec<Vec<u64>>,
    root: usize,
}

impl FiniteMetric {
    /// Builds a metric from a square matrix. Only shape and root are checked
    /// here; see [`validate_metric`] for the metric axioms.
    pub fn new(dist: Vec<Vec<u64>>, root: usize) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(CoreError::InvalidMetric("empty vertex set".into()));
        }
        if let Some(i) = dist.iter().position(|row| row.len() != n) {
            return Err(CoreError::InvalidMetric(format!(
                "row {i} has {} entries, expected {n}",
                dist[i].len()
            )));
        }
        if root >= n {
            return Err(CoreError::InvalidMetric(format!("root {root} out of range")));
        }
        Ok(Self { dist, root })
    }

    /// All points at distance zero from each other.
    pub fn single_location(n: usize) -> Self {
        Self {
            dist: vec![vec![0; n]; n],
            root: 0,
        }
    }

    /// Shortest-path closure of a symmetric weight matrix.
    pub fn shortest_path_closure(mut dist: Vec<Vec<u64>>, root: usize) -> Result<Self> {
        let n = dist.len();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = dist[i][k].saturating_add(dist[k][j]);
                    if via < dist[i][j] {
                        dist[i][j] = via;
                    }
                }
            }
        }
        Self::new(dist, root)
    }

    pub fn n(&self) -> usize {
        self.dist.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    #[inline]
    pub fn d(&self, u: usize, v: usize) -> u64 {
        self.dist[u][v]
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.dist
    }

    /// Total length of a walk through `path`.
    pub fn path_length(&self, path: &[usize]) -> u64 {
        path.windows(2).map(|w| self.d(w[0], w[1])).sum()
    }

    pub fn with_root(&self, root: usize) -> Self {
        Self {
            dist: self.dist.clone(),
            root,
        }
    }

    /// The induced metric on `vertices`, in the given order.
    pub fn restrict(&self, vertices: &[usize], root_pos: usize) -> Self {
        let dist = vertices
            .iter()
            .map(|&u| vertices.iter().map(|&v| self.d(u, v)).collect())
            .collect();
        Self {
            dist,
            root: root_pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricViolation {
    Diagonal { v: usize, value: u64 },
    Asymmetric { u: usize, v: usize, forward: u64, backward: u64 },
    /// `d(u, w) > d(u, v) + d(v, w)`.
    Triangle { u: usize, v: usize, w: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MetricReport {
    pub violations: Vec<MetricViolation>,
}

impl MetricReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Reports every diagonal, symmetry and triangle violation.
pub fn validate_metric(m: &FiniteMetric) -> MetricReport {
    let n = m.n();
    let mut violations = Vec::new();
    for v in 0..n {
        if m.d(v, v) != 0 {
            violations.push(MetricViolation::Diagonal {
                v,
                value: m.d(v, v),
            });
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            if m.d(u, v) != m.d(v, u) {
                violations.push(MetricViolation::Asymmetric {
                    u,
                    v,
                    forward: m.d(u, v),
                    backward: m.d(v, u),
                });
            }
        }
    }
    for u in 0..n {
        for v in 0..n {
            let duv = m.d(u, v);
            let row = &m.dist[v];
            for w in 0..n {
                if m.dist[u][w] > duv.saturating_add(row[w]) {
                    violations.push(MetricViolation::Triangle { u, v, w });
                }
            }
        }
    }
    MetricReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_pair_is_ok() {
        let m = FiniteMetric::new(vec![vec![0, 3], vec![3, 0]], 0).unwrap();
        assert!(validate_metric(&m).is_ok());
    }

    #[test]
    fn triangle_violation_is_reported_with_witness() {
        let m = FiniteMetric::new(vec![vec![0, 1, 5], vec![1, 0, 1], vec![5, 1, 0]], 0).unwrap();
        let r = validate_metric(&m);
        assert!(r
            .violations
            .contains(&MetricViolation::Triangle { u: 0, v: 1, w: 2 }));
    }

    #[test]
    fn asymmetry_is_reported() {
        let m = FiniteMetric::new(vec![vec![0, 2], vec![3, 0]], 0).unwrap();
        let r = validate_metric(&m);
        assert!(r.violations.contains(&MetricViolation::Asymmetric {
            u: 0,
            v: 1,
            forward: 2,
            backward: 3
        }));
    }

    #[test]
    fn diagonal_is_reported() {
        let m = FiniteMetric::new(vec![vec![1, 0], vec![0, 0]], 0).unwrap();
        assert_eq!(
            validate_metric(&m).violations[0],
            MetricViolation::Diagonal { v: 0, value: 1 }
        );
    }

    #[test]
    fn closure_repairs_triangle() {
        let m = FiniteMetric::shortest_path_closure(
            vec![vec![0, 1, 5], vec![1, 0, 1], vec![5, 1, 0]],
            0,
        )
        .unwrap();
        assert_eq!(m.d(0, 2), 2);
        assert!(validate_metric(&m).is_ok());
    }

    #[test]
    fn ragged_matrix_rejected() {
        assert!(FiniteMetric::new(vec![vec![0, 1], vec![1]], 0).is_err());
    }
}
