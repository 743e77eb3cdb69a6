//! Edmonds-Karp max-flow on a dense capacity matrix.

use std::collections::VecDeque;

/// Scale used to turn fractional capacities into integers.
pub const CAP_SCALE: f64 = (1u64 << 31) as f64;

pub fn scale_capacity(x: f64) -> u64 {
    if x <= 0.0 {
        0
    } else {
        (x * CAP_SCALE).floor() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCut {
    pub value: u64,
    /// Vertices on the source side of a minimum cut.
    pub source_side: Vec<bool>,
}

/// Maximum `s -> t` flow with shortest augmenting paths; BFS scans
/// neighbours in index order, so the result is deterministic.
pub fn min_cut(cap: &[Vec<u64>], s: usize, t: usize) -> MinCut {
    let n = cap.len();
    let mut res: Vec<Vec<u64>> = cap.to_vec();
    let mut value = 0u64;
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(a) = queue.pop_front() {
            if a == t {
                break;
            }
            for b in 0..n {
                if prev[b] == usize::MAX && res[a][b] > 0 {
                    prev[b] = a;
                    queue.push_back(b);
                }
            }
        }
        if prev[t] == usize::MAX {
            let source_side = prev.iter().map(|&p| p != usize::MAX).collect();
            return MinCut { value, source_side };
        }
        let mut bottleneck = u64::MAX;
        let mut b = t;
        while b != s {
            let a = prev[b];
            bottleneck = bottleneck.min(res[a][b]);
            b = a;
        }
        let mut b = t;
        while b != s {
            let a = prev[b];
            res[a][b] -= bottleneck;
            res[b][a] += bottleneck;
            b = a;
        }
        value += bottleneck;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_network() {
        let cap = vec![
            vec![0, 16, 13, 0, 0, 0],
            vec![0, 0, 10, 12, 0, 0],
            vec![0, 4, 0, 0, 14, 0],
            vec![0, 0, 9, 0, 0, 20],
            vec![0, 0, 0, 7, 0, 4],
            vec![0, 0, 0, 0, 0, 0],
        ];
        let c = min_cut(&cap, 0, 5);
        assert_eq!(c.value, 23);
        let cut: u64 = (0..6)
            .flat_map(|a| (0..6).map(move |b| (a, b)))
            .filter(|&(a, b)| c.source_side[a] && !c.source_side[b])
            .map(|(a, b)| cap[a][b])
            .sum();
        assert_eq!(cut, 23);
    }

    #[test]
    fn disconnected_sink() {
        let c = min_cut(&[vec![0, 0], vec![5, 0]], 0, 1);
        assert_eq!(c.value, 0);
        assert_eq!(c.source_side, vec![true, false]);
    }

    #[test]
    fn scaling_rounds_down() {
        assert_eq!(scale_capacity(1.0), 1 << 31);
        assert_eq!(scale_capacity(-0.5), 0);
    }
}
