//! Exact solvers by subset dynamic programming (up to 14 vertices).

use crate::check::{check_knap_orient, check_knapokd, check_orientkd};
use crate::dp::{check_cap, subset_sums, useful_vertices, SubsetDp};
use crate::error::{DetError, Result};
use crate::instance::{KnapOkdInstance, KnapOrientInstance, OrientKdInstance, Solution};

/// Maximum-reward path within the length budget, ignoring any knapsack.
pub fn orienteering_exact(inst: &KnapOrientInstance) -> Result<Solution> {
    knap_orient_exact(&inst.without_knapsack())
}

pub fn knap_orient_exact(inst: &KnapOrientInstance) -> Result<Solution> {
    check_cap(inst.n())?;
    let vertices = useful_vertices(&inst.metric, inst.terminals, &inst.rewards);
    let admissible = match &inst.knap_budget {
        Some(w) => subset_sums(&vertices, &inst.weights)
            .iter()
            .map(|x| x <= w)
            .collect(),
        None => vec![true; 1 << vertices.len()],
    };
    let dp = SubsetDp {
        metric: &inst.metric,
        terminals: inst.terminals,
        budget: inst.length_budget,
        rewards: &inst.rewards,
        vertices,
    };
    let sol = dp.solve(&admissible, |_, _| true)?;
    check_knap_orient(inst, &sol.path).map_err(DetError::Infeasible)?;
    Ok(sol)
}

fn okd_dp(inst: &OrientKdInstance, admissible: Option<Vec<bool>>) -> Result<Solution> {
    let vertices = useful_vertices(&inst.metric, inst.terminals, &inst.rewards);
    let weights = subset_sums(&vertices, &inst.weights);
    let admissible = admissible.unwrap_or_else(|| vec![true; 1 << vertices.len()]);
    let deadlines: Vec<_> = vertices.iter().map(|&v| inst.deadlines[v].clone()).collect();
    let dp = SubsetDp {
        metric: &inst.metric,
        terminals: inst.terminals,
        budget: inst.length_budget,
        rewards: &inst.rewards,
        vertices,
    };
    dp.solve(&admissible, |mask, u| weights[mask] <= deadlines[u])
}

pub fn orientkd_exact(inst: &OrientKdInstance) -> Result<Solution> {
    check_cap(inst.n())?;
    let sol = okd_dp(inst, None)?;
    check_orientkd(inst, &sol.path).map_err(DetError::Infeasible)?;
    Ok(sol)
}

pub fn knapokd_exact(inst: &KnapOkdInstance) -> Result<Solution> {
    check_cap(inst.n())?;
    let vertices = useful_vertices(&inst.okd.metric, inst.okd.terminals, &inst.okd.rewards);
    let admissible = subset_sums(&vertices, &inst.extra_weights)
        .iter()
        .map(|x| x <= &inst.extra_budget)
        .collect();
    let sol = okd_dp(&inst.okd, Some(admissible))?;
    check_knapokd(inst, &sol.path).map_err(DetError::Infeasible)?;
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Terminals;
    use corrko_core::rational::int;
    use corrko_core::FiniteMetric;

    fn star() -> FiniteMetric {
        // Root 0; vertices 1 and 2 one unit from the root and two apart.
        FiniteMetric::new(vec![vec![0, 1, 1], vec![1, 0, 2], vec![1, 2, 0]], 0).unwrap()
    }

    #[test]
    fn zero_budget_keeps_only_the_root() {
        let inst = KnapOrientInstance::orienteering(star(), Terminals::rooted(0), 0, vec![int(2), int(5), int(7)]).unwrap();
        let s = orienteering_exact(&inst).unwrap();
        assert_eq!(s.path, vec![0]);
        assert_eq!(s.reward, int(2));
    }

    #[test]
    fn budget_two_takes_the_better_single_vertex() {
        let inst = KnapOrientInstance::orienteering(star(), Terminals::rooted(0), 2, vec![int(0), int(5), int(7)]).unwrap();
        let s = orienteering_exact(&inst).unwrap();
        assert_eq!(s.path, vec![0, 2]);
        assert_eq!(s.reward, int(7));
        let wide = KnapOrientInstance { length_budget: 3, ..inst };
        assert_eq!(orienteering_exact(&wide).unwrap().reward, int(12));
    }

    #[test]
    fn knapsack_blocks_heavy_vertices() {
        let inst = KnapOrientInstance::new(
            star(),
            Terminals::rooted(0),
            3,
            vec![int(0), int(5), int(7)],
            vec![int(0), int(1), int(2)],
            Some(int(0)),
        )
        .unwrap();
        assert_eq!(knap_orient_exact(&inst).unwrap().path, vec![0]);
        let roomy = KnapOrientInstance {
            knap_budget: Some(int(2)),
            ..inst
        };
        assert_eq!(knap_orient_exact(&roomy).unwrap().reward, int(7));
    }

    #[test]
    fn p2p_paths_end_at_the_end() {
        let inst = KnapOrientInstance::orienteering(star(), Terminals::p2p(1, 2), 2, vec![int(1), int(1), int(1)]).unwrap();
        let s = orienteering_exact(&inst).unwrap();
        assert_eq!(s.path, vec![1, 0, 2]);
        let tight = KnapOrientInstance { length_budget: 1, ..inst };
        assert_eq!(orienteering_exact(&tight), Err(DetError::NoFeasiblePath));
    }

    #[test]
    fn deadlines_force_an_order() {
        // Vertex 2 has a tight deadline so it must come first.
        let inst = OrientKdInstance::new(
            FiniteMetric::single_location(3),
            Terminals::rooted(0),
            0,
            vec![int(0), int(1), int(1)],
            vec![int(0), int(1), int(1)],
            vec![int(0), int(2), int(1)],
        )
        .unwrap();
        let s = orientkd_exact(&inst).unwrap();
        assert_eq!(s.path, vec![0, 2, 1]);
        let extra = KnapOkdInstance::new(inst, vec![int(0), int(1), int(1)], int(1)).unwrap();
        assert_eq!(knapokd_exact(&extra).unwrap().reward, int(1));
    }

    #[test]
    fn too_many_vertices() {
        let inst = KnapOrientInstance::orienteering(FiniteMetric::single_location(15), Terminals::rooted(0), 0, vec![int(1); 15]).unwrap();
        assert!(matches!(orienteering_exact(&inst), Err(DetError::TooLarge { .. })));
    }
}
