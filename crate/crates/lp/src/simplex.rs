//! Dense two-phase tableau simplex.
//!
//! Entering columns follow Dantzig's rule; after a degenerate pivot the
//! solver switches to Bland's rule until the objective moves again, which
//! rules out cycling.

use crate::error::{LpError, Result};

pub const FEAS_TOL: f64 = 1e-9;
pub const OPT_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// Sparse `(variable, coefficient)` pairs.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Objective,
    pub costs: Vec<f64>,
    pub rows: Vec<Row>,
    /// `(lower, upper)` per variable; lower bounds must be finite.
    pub bounds: Vec<(f64, Option<f64>)>,
    pub names: Vec<String>,
}

impl LinearProgram {
    pub fn new(objective: Objective) -> Self {
        Self {
            objective,
            costs: vec![],
            rows: vec![],
            bounds: vec![],
            names: vec![],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.costs.len()
    }

    /// Adds a variable with bounds `[0, inf)` and returns its index.
    pub fn add_var(&mut self, name: impl Into<String>, cost: f64) -> usize {
        self.costs.push(cost);
        self.bounds.push((0.0, None));
        self.names.push(name.into());
        self.costs.len() - 1
    }

    pub fn add_row(&mut self, name: impl Into<String>, coeffs: Vec<(usize, f64)>, sense: RowSense, rhs: f64) {
        self.rows.push(Row {
            coeffs,
            sense,
            rhs,
            name: name.into(),
        });
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n || self.names.len() != n {
            return Err(LpError::Dimension(format!(
                "{n} costs but {} bounds and {} names",
                self.bounds.len(),
                self.names.len()
            )));
        }
        if self.costs.iter().any(|c| !c.is_finite()) {
            return Err(LpError::Dimension("non-finite cost".into()));
        }
        for (l, u) in &self.bounds {
            if !l.is_finite() || u.is_some_and(|u| !u.is_finite() || u < *l) {
                return Err(LpError::Dimension("bad variable bounds".into()));
            }
        }
        for r in &self.rows {
            if !r.rhs.is_finite() || r.coeffs.iter().any(|&(j, a)| j >= n || !a.is_finite()) {
                return Err(LpError::Dimension(format!("row `{}` is malformed", r.name)));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.costs.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn row_activity(&self, row: &Row, x: &[f64]) -> f64 {
        row.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Largest violation of any row or bound by `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for r in &self.rows {
            let act = self.row_activity(r, x);
            let v = match r.sense {
                RowSense::Le => act - r.rhs,
                RowSense::Ge => r.rhs - act,
                RowSense::Eq => (act - r.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (j, (l, u)) in self.bounds.iter().enumerate() {
            worst = worst.max(l - x[j]);
            if let Some(u) = u {
                worst = worst.max(x[j] - u);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal values (meaningful only when optimal).
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

struct Tableau {
    m: usize,
    cols: usize,
    /// Row-major `m x (cols + 1)`; the last entry of each row is its rhs.
    a: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * (self.cols + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn pivot(&mut self, r: usize, c: usize, obj: &mut [f64]) {
        let w = self.cols + 1;
        let p = self.a[r * w + c];
        for j in 0..w {
            self.a[r * w + j] /= p;
        }
        let prow: Vec<f64> = self.a[r * w..(r + 1) * w].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.a[i * w + c];
            if f != 0.0 {
                for (dst, &src) in self.a[i * w..(i + 1) * w].iter_mut().zip(&prow) {
                    *dst -= f * src;
                }
                self.a[i * w + c] = 0.0;
            }
        }
        let f = obj[c];
        if f != 0.0 {
            for (dst, &src) in obj.iter_mut().zip(&prow) {
                *dst -= f * src;
            }
            obj[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Reduced-cost row for maximizing `cost`; its last entry is minus the
    /// current objective.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut obj: Vec<f64> = cost.to_vec();
        obj.push(0.0);
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (j, o) in obj.iter_mut().enumerate() {
                    *o -= cb * self.at(i, j);
                }
            }
        }
        obj
    }

    /// Maximizes `cost` over columns where `allowed` holds. Returns `false`
    /// when unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<bool> {
        let mut obj = self.reduced_costs(cost);
        let mut bland = false;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(LpError::IterationLimit(MAX_PIVOTS));
            }
            let entering = if bland {
                (0..self.cols).find(|&j| allowed[j] && obj[j] > OPT_TOL)
            } else {
                let mut best: Option<usize> = None;
                for j in 0..self.cols {
                    if allowed[j] && obj[j] > OPT_TOL && best.is_none_or(|b| obj[j] > obj[b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let aic = self.at(i, c);
                if aic > PIVOT_TOL {
                    let ratio = self.rhs(i).max(0.0) / aic;
                    let better = match leave {
                        None => true,
                        Some((r, best)) => {
                            ratio < best - 1e-12 || (ratio <= best + 1e-12 && self.basis[i] < self.basis[r])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, step)) = leave else {
                return Ok(false);
            };
            bland = step <= 1e-12;
            self.pivot(r, c, &mut obj);
        }
    }
}

/// Solves `lp` to optimality or reports infeasibility or unboundedness.
pub fn simplex_solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_vars();
    let sign = match lp.objective {
        Objective::Maximize => 1.0,
        Objective::Minimize => -1.0,
    };

    // Shift lower bounds to zero; upper bounds become rows.
    struct StdRow {
        coeffs: Vec<(usize, f64)>,
        sense: RowSense,
        rhs: f64,
    }
    let mut rows: Vec<StdRow> = lp
        .rows
        .iter()
        .map(|r| StdRow {
            coeffs: r.coeffs.clone(),
            sense: r.sense,
            rhs: r.rhs - r.coeffs.iter().map(|&(j, a)| a * lp.bounds[j].0).sum::<f64>(),
        })
        .collect();
    for (j, (l, u)) in lp.bounds.iter().enumerate() {
        if let Some(u) = u {
            rows.push(StdRow {
                coeffs: vec![(j, 1.0)],
                sense: RowSense::Le,
                rhs: u - l,
            });
        }
    }

    // Normalize to `<=` or `=` rows; a `<=` row with non-negative rhs starts
    // with its slack basic, every other row gets an artificial.
    for r in rows.iter_mut() {
        if r.sense == RowSense::Ge {
            r.sense = RowSense::Le;
            r.rhs = -r.rhs;
            for c in r.coeffs.iter_mut() {
                c.1 = -c.1;
            }
        }
    }
    let m = rows.len();
    let slack_count = rows.iter().filter(|r| r.sense == RowSense::Le).count();
    let needs_art: Vec<bool> = rows.iter().map(|r| r.sense == RowSense::Eq || r.rhs < 0.0).collect();
    let art_count = needs_art.iter().filter(|&&b| b).count();
    let cols = n + slack_count + art_count;
    let w = cols + 1;
    let mut t = Tableau {
        m,
        cols,
        a: vec![0.0; m * w],
        basis: vec![0; m],
        pivots: 0,
    };
    let mut slack = n;
    let mut art = n + slack_count;
    for (i, r) in rows.iter().enumerate() {
        let flip = if r.rhs < 0.0 { -1.0 } else { 1.0 };
        for &(j, a) in &r.coeffs {
            t.a[i * w + j] += flip * a;
        }
        t.a[i * w + cols] = flip * r.rhs;
        let slack_col = (r.sense == RowSense::Le).then_some(slack);
        if let Some(s) = slack_col {
            t.a[i * w + s] = flip;
            slack += 1;
        }
        if needs_art[i] {
            t.a[i * w + art] = 1.0;
            t.basis[i] = art;
            art += 1;
        } else {
            t.basis[i] = slack_col.expect("inequality row");
        }
    }

    let is_art = |j: usize| j >= n + slack_count;
    if art_count > 0 {
        let cost: Vec<f64> = (0..cols).map(|j| if is_art(j) { -1.0 } else { 0.0 }).collect();
        let allowed = vec![true; cols];
        t.optimize(&cost, &allowed)?;
        let infeas: f64 = (0..m).filter(|&i| is_art(t.basis[i])).map(|i| t.rhs(i)).sum();
        let scale = 1.0 + rows.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);
        if infeas > FEAS_TOL * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![],
                objective: f64::NAN,
                pivots: t.pivots,
            });
        }
        // Drive remaining zero-level artificials out of the basis.
        let mut dummy = vec![0.0; w];
        for i in 0..m {
            if is_art(t.basis[i]) {
                if let Some(c) = (0..n + slack_count).find(|&j| t.at(i, j).abs() > 1e-9) {
                    t.pivot(i, c, &mut dummy);
                }
            }
        }
    }
    let mut cost = vec![0.0; cols];
    for j in 0..n {
        cost[j] = sign * lp.costs[j];
    }
    let allowed: Vec<bool> = (0..cols).map(|j| !is_art(j)).collect();
    if !t.optimize(&cost, &allowed)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: vec![],
            objective: sign * f64::INFINITY,
            pivots: t.pivots,
        });
    }
    let mut x: Vec<f64> = lp.bounds.iter().map(|b| b.0).collect();
    for i in 0..m {
        let j = t.basis[i];
        if j < n {
            x[j] += t.rhs(i).max(0.0);
        }
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective: lp.objective_value(&x),
        x,
        pivots: t.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bound() {
        let mut lp = LinearProgram::new(Objective::Maximize);
        let x = lp.add_var("x", 1.0);
        lp.add_row("cap", vec![(x, 1.0)], RowSense::Le, 3.0);
        let s = simplex_solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_pair() {
        let mut lp = LinearProgram::new(Objective::Maximize);
        let x = lp.add_var("x", 1.0);
        lp.add_row("a", vec![(x, 1.0)], RowSense::Le, 0.0);
        lp.add_row("b", vec![(x, 1.0)], RowSense::Ge, 1.0);
        assert_eq!(simplex_solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new(Objective::Maximize);
        let x = lp.add_var("x", 1.0);
        let y = lp.add_var("y", 0.0);
        lp.add_row("r", vec![(x, 1.0), (y, -1.0)], RowSense::Le, 1.0);
        assert_eq!(simplex_solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn equalities_bounds_and_minimization() {
        // min x + 2y  s.t.  x + y = 4, 1 <= x <= 3, y >= 0.
        let mut lp = LinearProgram::new(Objective::Minimize);
        let x = lp.add_var("x", 1.0);
        let y = lp.add_var("y", 2.0);
        lp.bounds[x] = (1.0, Some(3.0));
        lp.add_row("sum", vec![(x, 1.0), (y, 1.0)], RowSense::Eq, 4.0);
        let s = simplex_solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[x] - 3.0).abs() < 1e-9 && (s.x[y] - 1.0).abs() < 1e-9);
        assert!((s.objective - 5.0).abs() < 1e-9);
        assert!(lp.max_violation(&s.x) < 1e-9);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook rule without anti-cycling.
        let mut lp = LinearProgram::new(Objective::Maximize);
        let v: Vec<usize> = (0..4).map(|i| lp.add_var(format!("x{i}"), [0.75, -150.0, 0.02, -6.0][i])).collect();
        lp.add_row("r1", vec![(v[0], 0.25), (v[1], -60.0), (v[2], -0.04), (v[3], 9.0)], RowSense::Le, 0.0);
        lp.add_row("r2", vec![(v[0], 0.5), (v[1], -90.0), (v[2], -0.02), (v[3], 3.0)], RowSense::Le, 0.0);
        lp.add_row("r3", vec![(v[2], 1.0)], RowSense::Le, 1.0);
        let s = simplex_solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 0.05).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_dimensions() {
        let mut lp = LinearProgram::new(Objective::Maximize);
        lp.add_var("x", 1.0);
        lp.add_row("r", vec![(3, 1.0)], RowSense::Le, 1.0);
        assert!(matches!(simplex_solve(&lp), Err(LpError::Dimension(_))));
    }
}
