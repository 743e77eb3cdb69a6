//! Plain-text files for deterministic routing instances.
//!
//! ```text
//! kind orient-kd
//! n 3
//! start 0
//! end none
//! length_budget 4
//! distances
//! 0 1 2
//! 1 0 1
//! 2 1 0
//! vertices
//! 0: 0/1 0/1 0/1
//! 1: 3/1 1/1 2/1
//! 2: 5/1 1/1 1/1
//! ```
//!
//! Vertex lines carry `reward weight` for `knap-orient` (after a
//! `knap_budget` header, `none` for plain orienteering) and
//! `reward weight deadline` for `orient-kd`.

use std::fmt::Write as _;

use corrko_core::rational::{format_rational, parse_rational};
use corrko_core::{FiniteMetric, Rational};

use crate::error::{DetError, Result};
use crate::instance::{KnapOrientInstance, OrientKdInstance, Terminals};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DetInstance {
    KnapOrient(KnapOrientInstance),
    OrientKd(OrientKdInstance),
}

fn perr(line: usize, msg: impl Into<String>) -> DetError {
    DetError::Parse { line, msg: msg.into() }
}

fn write_common(out: &mut String, kind: &str, metric: &FiniteMetric, t: Terminals, budget: u64) {
    writeln!(out, "kind {kind}").unwrap();
    writeln!(out, "n {}", metric.n()).unwrap();
    writeln!(out, "start {}", t.start).unwrap();
    match t.end {
        Some(e) => writeln!(out, "end {e}").unwrap(),
        None => out.push_str("end none\n"),
    }
    writeln!(out, "length_budget {budget}").unwrap();
}

fn write_matrix(out: &mut String, metric: &FiniteMetric) {
    out.push_str("distances\n");
    for row in metric.matrix() {
        let cells: Vec<String> = row.iter().map(u64::to_string).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out.push_str("vertices\n");
}

pub fn write_det_instance(inst: &DetInstance) -> String {
    let mut out = String::new();
    match inst {
        DetInstance::KnapOrient(k) => {
            write_common(&mut out, "knap-orient", &k.metric, k.terminals, k.length_budget);
            let kb = k.knap_budget.as_ref().map_or("none".to_string(), format_rational);
            writeln!(out, "knap_budget {kb}").unwrap();
            write_matrix(&mut out, &k.metric);
            for v in 0..k.n() {
                writeln!(out, "{v}: {} {}", format_rational(&k.rewards[v]), format_rational(&k.weights[v])).unwrap();
            }
        }
        DetInstance::OrientKd(o) => {
            write_common(&mut out, "orient-kd", &o.metric, o.terminals, o.length_budget);
            write_matrix(&mut out, &o.metric);
            for v in 0..o.n() {
                writeln!(
                    out,
                    "{v}: {} {} {}",
                    format_rational(&o.rewards[v]),
                    format_rational(&o.weights[v]),
                    format_rational(&o.deadlines[v])
                )
                .unwrap();
            }
        }
    }
    out
}

pub fn parse_det_instance(text: &str) -> Result<DetInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut header = |key: &str| -> Result<(usize, String)> {
        let (no, line) = lines.next().ok_or_else(|| perr(0, format!("missing `{key}` line")))?;
        match line.split_once(char::is_whitespace) {
            Some((k, v)) if k == key => Ok((no, v.trim().to_string())),
            _ => Err(perr(no, format!("expected `{key} <value>`"))),
        }
    };
    let (no, kind) = header("kind")?;
    let knap = match kind.as_str() {
        "knap-orient" => true,
        "orient-kd" => false,
        _ => return Err(perr(no, "kind must be `knap-orient` or `orient-kd`")),
    };
    let (no, n) = header("n")?;
    let n: usize = n.parse().map_err(|_| perr(no, "bad vertex count"))?;
    let (no, start) = header("start")?;
    let start: usize = start.parse().map_err(|_| perr(no, "bad start vertex"))?;
    let (no, end) = header("end")?;
    let end = match end.as_str() {
        "none" => None,
        e => Some(e.parse::<usize>().map_err(|_| perr(no, "bad end vertex"))?),
    };
    let (no, budget) = header("length_budget")?;
    let budget: u64 = budget.parse().map_err(|_| perr(no, "bad length budget"))?;
    let knap_budget = if knap {
        let (no, kb) = header("knap_budget")?;
        match kb.as_str() {
            "none" => None,
            s => Some(parse_rational(s).ok_or_else(|| perr(no, "bad knapsack budget"))?),
        }
    } else {
        None
    };
    let mut keyword = |key: &str| -> Result<()> {
        match lines.next() {
            Some((_, l)) if l == key => Ok(()),
            Some((no, _)) => Err(perr(no, format!("expected `{key}`"))),
            None => Err(perr(0, format!("missing `{key}` section"))),
        }
    };
    keyword("distances")?;
    let mut dist = Vec::with_capacity(n);
    for _ in 0..n {
        let (no, line) = lines.next().ok_or_else(|| perr(0, "distance matrix truncated"))?;
        let row: std::result::Result<Vec<u64>, _> = line.split_whitespace().map(str::parse).collect();
        let row = row.map_err(|_| perr(no, "bad distance entry"))?;
        if row.len() != n {
            return Err(perr(no, format!("expected {n} distances")));
        }
        dist.push(row);
    }
    match lines.next() {
        Some((_, "vertices")) => {}
        Some((no, _)) => return Err(perr(no, "expected `vertices`")),
        None => return Err(perr(0, "missing `vertices` section")),
    }
    let fields = if knap { 2 } else { 3 };
    let mut cols: Vec<Option<Vec<Rational>>> = vec![None; n];
    for (no, line) in lines {
        let (v, rest) = line.split_once(':').ok_or_else(|| perr(no, "expected `v: values`"))?;
        let v: usize = v.trim().parse().map_err(|_| perr(no, "bad vertex id"))?;
        if v >= n || cols[v].is_some() {
            return Err(perr(no, format!("vertex {v} out of range or repeated")));
        }
        let vals: Option<Vec<Rational>> = rest.split_whitespace().map(parse_rational).collect();
        let vals = vals.filter(|x| x.len() == fields).ok_or_else(|| perr(no, format!("expected {fields} rationals")))?;
        cols[v] = Some(vals);
    }
    let cols: Vec<Vec<Rational>> = cols
        .into_iter()
        .enumerate()
        .map(|(v, c)| c.ok_or_else(|| perr(0, format!("vertex {v} missing"))))
        .collect::<Result<_>>()?;
    let column = |i: usize| cols.iter().map(|c| c[i].clone()).collect::<Vec<_>>();
    let metric = FiniteMetric::new(dist, start)?;
    let terminals = Terminals { start, end };
    Ok(if knap {
        DetInstance::KnapOrient(KnapOrientInstance::new(metric, terminals, budget, column(0), column(1), knap_budget)?)
    } else {
        DetInstance::OrientKd(OrientKdInstance::new(metric, terminals, budget, column(0), column(1), column(2))?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_knap_orient, gen_orientkd};

    #[test]
    fn round_trips() {
        for seed in 0..5 {
            let a = DetInstance::KnapOrient(gen_knap_orient(6, 10, seed).unwrap());
            assert_eq!(parse_det_instance(&write_det_instance(&a)).unwrap(), a);
            let b = DetInstance::OrientKd(gen_orientkd(6, 10, seed).unwrap());
            assert_eq!(parse_det_instance(&write_det_instance(&b)).unwrap(), b);
        }
    }

    #[test]
    fn reports_bad_lines() {
        let err = parse_det_instance("kind orient-kd\nn x\n").unwrap_err();
        assert_eq!(err, DetError::Parse { line: 2, msg: "bad vertex count".into() });
    }
}
