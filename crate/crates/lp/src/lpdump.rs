//! CPLEX-style `.lp` text for cross-checking with external solvers.

use std::fmt::Write as _;

use crate::simplex::{LinearProgram, Objective, RowSense};

fn term(out: &mut String, first: bool, coef: f64, name: &str) {
    if coef < 0.0 {
        write!(out, " - {} {name}", -coef).unwrap();
    } else if first {
        write!(out, " {coef} {name}").unwrap();
    } else {
        write!(out, " + {coef} {name}").unwrap();
    }
}

fn expr(out: &mut String, lp: &LinearProgram, coeffs: &[(usize, f64)]) {
    let mut first = true;
    for &(j, c) in coeffs {
        term(out, first, c, &lp.names[j]);
        first = false;
    }
    if first {
        out.push_str(" 0");
    }
}

pub fn write_lp(lp: &LinearProgram) -> String {
    let mut out = String::new();
    out.push_str(match lp.objective {
        Objective::Maximize => "Maximize\n",
        Objective::Minimize => "Minimize\n",
    });
    out.push_str(" obj:");
    let costs: Vec<(usize, f64)> = lp.costs.iter().copied().enumerate().filter(|&(_, c)| c != 0.0).collect();
    expr(&mut out, lp, &costs);
    out.push_str("\nSubject To\n");
    for r in &lp.rows {
        write!(out, " {}:", r.name).unwrap();
        expr(&mut out, lp, &r.coeffs);
        let op = match r.sense {
            RowSense::Le => "<=",
            RowSense::Eq => "=",
            RowSense::Ge => ">=",
        };
        writeln!(out, " {op} {}", r.rhs).unwrap();
    }
    out.push_str("Bounds\n");
    for (j, (l, u)) in lp.bounds.iter().enumerate() {
        match u {
            Some(u) => writeln!(out, " {l} <= {} <= {u}", lp.names[j]).unwrap(),
            None => writeln!(out, " {} >= {l}", lp.names[j]).unwrap(),
        }
    }
    out.push_str("End\n");
    out
}
