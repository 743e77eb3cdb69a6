//! Independent feasibility checks for returned paths.

use std::fmt;

use corrko_core::rational::format_rational;
use corrko_core::{FiniteMetric, Rational};
use num::traits::Zero;

use crate::instance::{KnapOkdInstance, KnapOrientInstance, OrientKdInstance, Terminals};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Empty,
    WrongStart { expected: usize, found: usize },
    WrongEnd { expected: usize, found: usize },
    OutOfRange(usize),
    Repeat(usize),
    Length { length: u64, budget: u64 },
    Knapsack { weight: Rational, budget: Rational },
    Deadline { v: usize, prefix: Rational, deadline: Rational },
    ExtraKnapsack { weight: Rational, budget: Rational },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => f.write_str("empty path"),
            Violation::WrongStart { expected, found } => {
                write!(f, "path starts at {found}, expected {expected}")
            }
            Violation::WrongEnd { expected, found } => {
                write!(f, "path ends at {found}, expected {expected}")
            }
            Violation::OutOfRange(v) => write!(f, "vertex {v} out of range"),
            Violation::Repeat(v) => write!(f, "vertex {v} visited twice"),
            Violation::Length { length, budget } => {
                write!(f, "length {length} exceeds budget {budget}")
            }
            Violation::Knapsack { weight, budget } => write!(
                f,
                "weight {} exceeds knapsack budget {}",
                format_rational(weight),
                format_rational(budget)
            ),
            Violation::Deadline {
                v,
                prefix,
                deadline,
            } => write!(
                f,
                "prefix weight {} at vertex {v} exceeds its deadline {}",
                format_rational(prefix),
                format_rational(deadline)
            ),
            Violation::ExtraKnapsack { weight, budget } => write!(
                f,
                "extra weight {} exceeds budget {}",
                format_rational(weight),
                format_rational(budget)
            ),
        }
    }
}

pub type Check = std::result::Result<(), Violation>;

/// Endpoints, distinctness and the length budget.
pub fn check_route(metric: &FiniteMetric, terminals: Terminals, budget: u64, path: &[usize]) -> Check {
    let (&first, &last) = match (path.first(), path.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Violation::Empty),
    };
    let n = metric.n();
    if let Some(&v) = path.iter().find(|&&v| v >= n) {
        return Err(Violation::OutOfRange(v));
    }
    if first != terminals.start {
        return Err(Violation::WrongStart {
            expected: terminals.start,
            found: first,
        });
    }
    if let Some(e) = terminals.end {
        if last != e {
            return Err(Violation::WrongEnd {
                expected: e,
                found: last,
            });
        }
    }
    let mut seen = vec![false; n];
    for &v in path {
        if std::mem::replace(&mut seen[v], true) {
            return Err(Violation::Repeat(v));
        }
    }
    let length = metric.path_length(path);
    if length > budget {
        return Err(Violation::Length { length, budget });
    }
    Ok(())
}

pub fn check_knap_orient(inst: &KnapOrientInstance, path: &[usize]) -> Check {
    check_route(&inst.metric, inst.terminals, inst.length_budget, path)?;
    if let Some(budget) = &inst.knap_budget {
        let weight = inst.weight(path);
        if &weight > budget {
            return Err(Violation::Knapsack {
                weight,
                budget: budget.clone(),
            });
        }
    }
    Ok(())
}

pub fn check_orientkd(inst: &OrientKdInstance, path: &[usize]) -> Check {
    check_route(&inst.metric, inst.terminals, inst.length_budget, path)?;
    let mut prefix = Rational::zero();
    for &v in path {
        prefix += &inst.weights[v];
        if prefix > inst.deadlines[v] {
            return Err(Violation::Deadline {
                v,
                prefix,
                deadline: inst.deadlines[v].clone(),
            });
        }
    }
    Ok(())
}

pub fn check_knapokd(inst: &KnapOkdInstance, path: &[usize]) -> Check {
    check_orientkd(&inst.okd, path)?;
    let weight: Rational = path.iter().map(|&v| &inst.extra_weights[v]).sum();
    if weight > inst.extra_budget {
        return Err(Violation::ExtraKnapsack {
            weight,
            budget: inst.extra_budget.clone(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use corrko_core::rational::int;

    fn line() -> FiniteMetric {
        FiniteMetric::new(vec![vec![0, 1, 2], vec![1, 0, 1], vec![2, 1, 0]], 0).unwrap()
    }

    #[test]
    fn route_violations() {
        let m = line();
        let t = Terminals::rooted(0);
        assert_eq!(check_route(&m, t, 2, &[0, 1, 2]), Ok(()));
        assert_eq!(check_route(&m, t, 1, &[0, 2]), Err(Violation::Length { length: 2, budget: 1 }));
        assert_eq!(check_route(&m, t, 9, &[0, 1, 0]), Err(Violation::Repeat(0)));
        assert!(matches!(check_route(&m, t, 9, &[1]), Err(Violation::WrongStart { .. })));
        assert!(matches!(
            check_route(&m, Terminals::p2p(0, 2), 9, &[0, 1]),
            Err(Violation::WrongEnd { .. })
        ));
        assert_eq!(check_route(&m, t, 9, &[]), Err(Violation::Empty));
    }

    #[test]
    fn deadlines_count_the_vertex_itself() {
        let inst = OrientKdInstance::new(
            line(),
            Terminals::rooted(0),
            5,
            vec![int(0), int(1), int(1)],
            vec![int(0), int(2), int(1)],
            vec![int(0), int(2), int(2)],
        )
        .unwrap();
        assert_eq!(check_orientkd(&inst, &[0, 1]), Ok(()));
        assert_eq!(check_orientkd(&inst, &[0, 2, 1]).unwrap_err().to_string(), "prefix weight 3/1 at vertex 1 exceeds its deadline 2/1");
        assert!(check_orientkd(&inst, &[0, 1, 2]).is_err());
    }
}
