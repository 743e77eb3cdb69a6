//! Text forms of policies.
//!
//! ```text
//! sequence 0 2 1
//!
//! tree (0 [0: (2 [0: (1 []), 1: (3 [])])])
//!
//! cancellation
//! sequence 0 1
//! 0: (inf, 1/1)
//! 1: (2, 1/3), (inf, 2/3)
//! ```

use super::{CancellationPolicy, NonAdaptivePolicy, Threshold, TreeShape};
use crate::error::{parse_err, Result};
use crate::rational::{format_rational, parse_rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolicyFile {
    NonAdaptive(NonAdaptivePolicy),
    Adaptive(TreeShape),
    Cancellation(CancellationPolicy),
}

pub fn write_sequence(pol: &NonAdaptivePolicy) -> String {
    let ids: Vec<String> = pol.sequence.iter().map(usize::to_string).collect();
    format!("sequence {}\n", ids.join(" "))
}

pub fn write_tree(shape: &TreeShape) -> String {
    fn go(s: &TreeShape, out: &mut String) {
        out.push_str(&format!("({} [", s.vertex));
        for (i, (a, c)) in s.children.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&format!("{a}: "));
            go(c, out);
        }
        out.push_str("])");
    }
    let mut out = String::from("tree ");
    go(shape, &mut out);
    out.push('\n');
    out
}

pub fn write_cancellation(pol: &CancellationPolicy) -> String {
    let mut out = String::from("cancellation\n");
    out.push_str(&write_sequence(&NonAdaptivePolicy::new(pol.sequence.clone())));
    for (v, td) in pol.sequence.iter().zip(&pol.thresholds) {
        let parts: Vec<String> = td
            .iter()
            .map(|(t, p)| {
                let t = match t {
                    Threshold::At(t) => t.to_string(),
                    Threshold::Never => "inf".to_string(),
                };
                format!("({t}, {})", format_rational(p))
            })
            .collect();
        out.push_str(&format!("{v}: {}\n", parts.join(", ")));
    }
    out
}

pub fn write_policy(p: &PolicyFile) -> String {
    match p {
        PolicyFile::NonAdaptive(s) => write_sequence(s),
        PolicyFile::Adaptive(t) => write_tree(t),
        PolicyFile::Cancellation(c) => write_cancellation(c),
    }
}

fn parse_ids(no: usize, s: &str) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|x| x.parse().map_err(|_| parse_err(no, format!("bad vertex id `{x}`"))))
        .collect()
}

pub fn parse_policy(text: &str) -> Result<PolicyFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (no, first) = lines.next().ok_or_else(|| parse_err(0, "empty policy file"))?;
    if let Some(rest) = first.strip_prefix("sequence") {
        return Ok(PolicyFile::NonAdaptive(NonAdaptivePolicy::new(parse_ids(no, rest)?)));
    }
    if let Some(rest) = first.strip_prefix("tree") {
        let mut p = TermParser {
            s: rest.as_bytes(),
            pos: 0,
            line: no,
        };
        let shape = p.term()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(parse_err(no, "trailing text after tree"));
        }
        return Ok(PolicyFile::Adaptive(shape));
    }
    if first == "cancellation" {
        let (no, seq) = lines
            .next()
            .ok_or_else(|| parse_err(no, "missing sequence line"))?;
        let seq = seq
            .strip_prefix("sequence")
            .ok_or_else(|| parse_err(no, "expected `sequence ...`"))?;
        let sequence = parse_ids(no, seq)?;
        let mut thresholds = Vec::new();
        for &v in &sequence {
            let (no, line) = lines
                .next()
                .ok_or_else(|| parse_err(no, format!("missing thresholds for vertex {v}")))?;
            let (id, rest) = line
                .split_once(':')
                .ok_or_else(|| parse_err(no, "expected `v: (t, p), ...`"))?;
            if id.trim().parse::<usize>().ok() != Some(v) {
                return Err(parse_err(no, format!("expected thresholds for vertex {v}")));
            }
            thresholds.push(parse_thresholds(rest).map_err(|m| parse_err(no, m))?);
        }
        return Ok(PolicyFile::Cancellation(CancellationPolicy {
            sequence,
            thresholds,
        }));
    }
    Err(parse_err(no, "expected `sequence`, `tree` or `cancellation`"))
}

fn parse_thresholds(s: &str) -> std::result::Result<Vec<(Threshold, crate::Rational)>, String> {
    let mut out = Vec::new();
    for part in s.split(')') {
        let part = part.trim().trim_start_matches(',').trim();
        if part.is_empty() {
            continue;
        }
        let inner = part.strip_prefix('(').ok_or("threshold must look like (t, p)")?;
        let (t, p) = inner.split_once(',').ok_or("threshold must look like (t, p)")?;
        let t = match t.trim() {
            "inf" => Threshold::Never,
            x => Threshold::At(x.parse().map_err(|_| format!("bad threshold `{x}`"))?),
        };
        let p = parse_rational(p).ok_or("bad probability")?;
        out.push((t, p));
    }
    Ok(out)
}

struct TermParser<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
}

impl TermParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(parse_err(
                self.line,
                format!("expected `{}` at column {}", c as char, self.pos),
            ))
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| parse_err(self.line, format!("expected a number at column {start}")))
    }

    fn term(&mut self) -> Result<TreeShape> {
        self.expect(b'(')?;
        let vertex = self.number()?;
        self.expect(b'[')?;
        let mut children = Vec::new();
        if self.peek() != Some(b']') {
            loop {
                let a = self.number()?;
                self.expect(b':')?;
                children.push((a, self.term()?));
                if self.peek() == Some(b',') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(b']')?;
        self.expect(b')')?;
        Ok(TreeShape { vertex, children })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn sequence_round_trip() {
        let p = PolicyFile::NonAdaptive(NonAdaptivePolicy::new(vec![0, 3, 1]));
        let text = write_policy(&p);
        assert_eq!(text, "sequence 0 3 1\n");
        assert_eq!(parse_policy(&text).unwrap(), p);
    }

    #[test]
    fn tree_round_trip() {
        let shape = TreeShape {
            vertex: 0,
            children: vec![(
                0,
                TreeShape {
                    vertex: 2,
                    children: vec![(0, TreeShape::leaf(1)), (2, TreeShape::leaf(3))],
                },
            )],
        };
        let text = write_tree(&shape);
        assert_eq!(text, "tree (0 [0: (2 [0: (1 []), 2: (3 [])])])\n");
        assert_eq!(parse_policy(&text).unwrap(), PolicyFile::Adaptive(shape));
    }

    #[test]
    fn cancellation_round_trip() {
        let p = CancellationPolicy {
            sequence: vec![0, 1],
            thresholds: vec![
                vec![(Threshold::Never, int(1))],
                vec![(Threshold::At(2), ratio(1, 3)), (Threshold::Never, ratio(2, 3))],
            ],
        };
        let text = write_cancellation(&p);
        assert_eq!(parse_policy(&text).unwrap(), PolicyFile::Cancellation(p));
    }

    #[test]
    fn garbage_rejected() {
        assert!(parse_policy("tree (0 [0: (1 [)").is_err());
        assert!(parse_policy("route 0 1").is_err());
    }
}
