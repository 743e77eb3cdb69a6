//! Plain-text instance files.
//!
//! ```text
//! n 2
//! B 3
//! W 8
//! root 0
//! distances
//! 0 1
//! 1 0
//! atoms
//! 0: (0, 0/1, 1/1)
//! 1: (2, 3/1, 1/2), (6, 7/1, 1/2)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored on input.

use std::fmt::Write as _;

use num::bigint::BigUint;

use crate::dist::{Atom, JointDistribution};
use crate::error::{parse_err, Result};
use crate::instance::CorrKOInstance;
use crate::metric::FiniteMetric;
use crate::rational::{format_rational, parse_rational};

pub fn write_instance(inst: &CorrKOInstance) -> String {
    let mut out = String::new();
    let n = inst.n();
    writeln!(out, "n {n}").unwrap();
    writeln!(out, "B {}", inst.b()).unwrap();
    writeln!(out, "W {}", inst.w()).unwrap();
    writeln!(out, "root {}", inst.root()).unwrap();
    out.push_str("distances\n");
    for row in inst.metric().matrix() {
        let cells: Vec<String> = row.iter().map(u64::to_string).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out.push_str("atoms\n");
    for v in 0..n {
        write!(out, "{v}: ").unwrap();
        let atoms: Vec<String> = inst
            .dist(v)
            .atoms()
            .iter()
            .map(|a| {
                format!(
                    "({}, {}, {})",
                    a.size,
                    format_rational(&a.reward),
                    format_rational(&a.prob)
                )
            })
            .collect();
        out.push_str(&atoms.join(", "));
        out.push('\n');
    }
    out
}

pub fn parse_instance(text: &str) -> Result<CorrKOInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let mut header = |key: &str| -> Result<(usize, String)> {
        let (no, line) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("missing `{key}` line")))?;
        match line.split_once(char::is_whitespace) {
            Some((k, v)) if k == key => Ok((no, v.trim().to_string())),
            _ => Err(parse_err(no, format!("expected `{key} <value>`"))),
        }
    };
    let (no, n) = header("n")?;
    let n: usize = n.parse().map_err(|_| parse_err(no, "bad vertex count"))?;
    let (no, b) = header("B")?;
    let b: u64 = b.parse().map_err(|_| parse_err(no, "bad travel budget"))?;
    let (no, w) = header("W")?;
    let w: BigUint = w.parse().map_err(|_| parse_err(no, "bad processing budget"))?;
    let (no, root) = header("root")?;
    let root: usize = root.parse().map_err(|_| parse_err(no, "bad root"))?;

    expect_keyword(&mut lines, "distances")?;
    let mut dist = Vec::with_capacity(n);
    for _ in 0..n {
        let (no, line) = lines
            .next()
            .ok_or_else(|| parse_err(0, "distance matrix truncated"))?;
        let row: std::result::Result<Vec<u64>, _> =
            line.split_whitespace().map(str::parse).collect();
        let row = row.map_err(|_| parse_err(no, "bad distance entry"))?;
        if row.len() != n {
            return Err(parse_err(no, format!("expected {n} distances")));
        }
        dist.push(row);
    }
    expect_keyword(&mut lines, "atoms")?;
    let mut dists: Vec<Option<JointDistribution>> = vec![None; n];
    for (no, line) in lines {
        let (v, rest) = line
            .split_once(':')
            .ok_or_else(|| parse_err(no, "expected `v: (size, reward, prob), ...`"))?;
        let v: usize = v.trim().parse().map_err(|_| parse_err(no, "bad vertex id"))?;
        if v >= n {
            return Err(parse_err(no, format!("vertex {v} out of range")));
        }
        if dists[v].is_some() {
            return Err(parse_err(no, format!("vertex {v} listed twice")));
        }
        let atoms = parse_atoms(rest).map_err(|m| parse_err(no, m))?;
        let d = JointDistribution::new(atoms).map_err(|e| parse_err(no, e.to_string()))?;
        dists[v] = Some(d);
    }
    let dists: Vec<JointDistribution> = dists
        .into_iter()
        .enumerate()
        .map(|(v, d)| d.ok_or_else(|| parse_err(0, format!("vertex {v} has no atoms"))))
        .collect::<Result<_>>()?;
    let metric = FiniteMetric::new(dist, root).map_err(|e| parse_err(0, e.to_string()))?;
    CorrKOInstance::new(metric, b, w, dists).map_err(|e| parse_err(0, e.to_string()))
}

fn expect_keyword<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    key: &str,
) -> Result<()> {
    match lines.next() {
        Some((_, l)) if l == key => Ok(()),
        Some((no, _)) => Err(parse_err(no, format!("expected `{key}`"))),
        None => Err(parse_err(0, format!("missing `{key}` section"))),
    }
}

fn parse_atoms(s: &str) -> std::result::Result<Vec<Atom>, String> {
    let mut atoms = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let open = rest.strip_prefix('(').ok_or("atom must start with `(`")?;
        let close = open.find(')').ok_or("unterminated atom")?;
        let fields: Vec<&str> = open[..close].split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err("atom needs (size, reward, prob)".into());
        }
        let size: BigUint = fields[0].parse().map_err(|_| "bad size")?;
        let reward = parse_rational(fields[1]).ok_or("bad reward")?;
        let prob = parse_rational(fields[2]).ok_or("bad probability")?;
        atoms.push(Atom { size, reward, prob });
        rest = open[close + 1..].trim_start();
        if let Some(r) = rest.strip_prefix(',') {
            rest = r.trim_start();
        }
    }
    Ok(atoms)
}
