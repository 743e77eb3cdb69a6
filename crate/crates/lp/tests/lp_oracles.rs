//! LP results against independent references: vertex enumeration for the
//! simplex, exact combinatorial optima for the KO-LP and the CKOC-LP.

use std::time::Instant;

use corrko_core::adversarial::gen_random;
use corrko_core::rational::to_f64;
use corrko_core::{opt_adaptive, OracleCaps};
use corrko_detsolve::generate::gen_knap_orient;
use corrko_detsolve::{check_knap_orient, knap_orient_exact, ExactOrienteering};
use corrko_lp::kolp::{kolp_value, kolp_violation, o2_violation_enum, CHECK_TOL};
use corrko_lp::*;
use num::bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Solves `A_B x = b_B` by Gaussian elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for i in 0..n {
            if i != col {
                let f = a[i][col] / a[col][col];
                for k in col..n {
                    a[i][k] -= f * a[col][k];
                }
                b[i] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Best objective over all basic feasible points of `max c x, A x <= b, x >= 0`.
fn vertex_enumeration(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> f64 {
    let n = c.len();
    let m = a.len();
    // Constraint k < m is row k; k >= m is x_{k-m} >= 0.
    let total = n + m;
    let mut best = f64::NEG_INFINITY;
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let rows: Vec<Vec<f64>> = pick
            .iter()
            .map(|&k| if k < m { a[k].clone() } else { (0..n).map(|j| if j == k - m { 1.0 } else { 0.0 }).collect() })
            .collect();
        let rhs: Vec<f64> = pick.iter().map(|&k| if k < m { b[k] } else { 0.0 }).collect();
        if let Some(x) = solve_square(rows, rhs) {
            let feasible = x.iter().all(|&v| v >= -1e-9)
                && a.iter().zip(b).all(|(row, &bi)| row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= bi + 1e-9);
            if feasible {
                best = best.max(c.iter().zip(&x).map(|(p, q)| p * q).sum());
            }
        }
        // Next combination.
        let mut i = n;
        while i > 0 && pick[i - 1] == total - n + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return best;
        }
        pick[i - 1] += 1;
        for j in i..n {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

#[test]
fn simplex_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..8 {
        let n = 10;
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..3.0)).collect();
        let a: Vec<Vec<f64>> = (0..10).map(|_| (0..n).map(|_| rng.gen_range(0.05..1.0)).collect()).collect();
        let b: Vec<f64> = (0..10).map(|_| rng.gen_range(1.0..5.0)).collect();
        let mut lp = LinearProgram::new(Objective::Maximize);
        for (j, &cj) in c.iter().enumerate() {
            lp.add_var(format!("x{j}"), cj);
        }
        for (i, row) in a.iter().enumerate() {
            lp.add_row(format!("r{i}"), row.iter().copied().enumerate().collect(), RowSense::Le, b[i]);
        }
        let s = simplex_solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        let reference = vertex_enumeration(&c, &a, &b);
        assert!((s.objective - reference).abs() < 1e-6, "trial {trial}: {} vs {reference}", s.objective);
        assert!(lp.max_violation(&s.x) < 1e-9);
    }
}

#[test]
fn kolp_brackets_the_integer_optimum_and_rounds() {
    let start = Instant::now();
    for seed in 0..30 {
        let n = 3 + (seed % 6) as usize;
        let inst = gen_knap_orient(n, 8, seed).unwrap();
        let sol = solve_kolp(&inst).unwrap();
        let exact = to_f64(&knap_orient_exact(&inst).unwrap().reward);
        assert!(sol.objective + 1e-6 >= exact, "seed {seed}: LP {} < exact {exact}", sol.objective);
        assert!(sol.objective <= 5.0 * exact + 1e-6, "seed {seed}: gap above 5");
        assert!(kolp_violation(&inst, &sol.point) <= CHECK_TOL);
        assert!(o2_violation_enum(&inst.metric, &sol.point) <= CHECK_TOL, "seed {seed}");
        assert!((kolp_value(&inst, &sol.point) - sol.objective).abs() < 1e-6);
        assert!(sol.lp.max_violation(&sol.x) <= CHECK_TOL);
        let r = round_kolp(&inst, &sol, &ExactOrienteering).unwrap();
        assert!(check_knap_orient(&inst, &r.path).is_ok());
        assert!(to_f64(&r.reward) >= sol.objective / 5.0 - 1e-6, "seed {seed}");
    }
    eprintln!("kolp fixtures: {:?}", start.elapsed());
}

#[test]
fn ckoclp_dominates_deterministic_optimum() {
    // With deterministic sizes cancelling never helps, so the LP must bound
    // the adaptive optimum.
    for seed in 0..10 {
        let base = gen_random(4, 4, 6, 1, seed).unwrap();
        let half = base.half_w();
        let dists = base
            .dists()
            .iter()
            .map(|d| d.map_rewards(|a| if a.size > half { num::Zero::zero() } else { a.reward.clone() }))
            .collect();
        let inst = base.with_dists(dists).unwrap();
        assert_eq!(inst.w(), &BigUint::from(6u32));
        let sol = solve_ckoclp(&inst).unwrap();
        let (opt, _) = opt_adaptive(&inst, OracleCaps::default()).unwrap();
        assert!(sol.objective + 1e-6 >= to_f64(&opt), "seed {seed}");
    }
}
