//! Plain-text reports: key/value fields, one table, and pass/fail checks.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    /// Aligned tables for reading.
    #[default]
    Text,
    /// Tab-separated rows for external tools.
    Rows,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub fields: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Self::default()
        }
    }

    pub fn field(&mut self, key: impl Into<String>, value: impl ToString) {
        self.fields.push((key.into(), value.to_string()));
    }

    pub fn columns(&mut self, cols: &[&str]) {
        self.columns = cols.iter().map(|c| c.to_string()).collect();
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Rows => self.render_rows(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = format!("== {} ==\n", self.title);
        let key_w = self.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.fields {
            writeln!(out, "{k:<key_w$}  {v}").unwrap();
        }
        if !self.columns.is_empty() {
            let mut widths: Vec<usize> = self.columns.iter().map(String::len).collect();
            for r in &self.rows {
                for (w, c) in widths.iter_mut().zip(r) {
                    *w = (*w).max(c.len());
                }
            }
            let line = |cells: &[String]| {
                let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
                parts.join("  ").trim_end().to_string()
            };
            out.push('\n');
            out.push_str(&line(&self.columns));
            out.push('\n');
            for r in &self.rows {
                out.push_str(&line(r));
                out.push('\n');
            }
        }
        if !self.checks.is_empty() {
            out.push('\n');
            for c in &self.checks {
                let tag = if c.pass { "PASS" } else { "FAIL" };
                writeln!(out, "{tag} {}: {}", c.name, c.detail).unwrap();
            }
        }
        out
    }

    fn render_rows(&self) -> String {
        let mut out = format!("# {}\n", self.title);
        for (k, v) in &self.fields {
            writeln!(out, "field\t{k}\t{v}").unwrap();
        }
        if !self.columns.is_empty() {
            writeln!(out, "header\t{}", self.columns.join("\t")).unwrap();
        }
        for r in &self.rows {
            writeln!(out, "row\t{}", r.join("\t")).unwrap();
        }
        for c in &self.checks {
            writeln!(out, "check\t{}\t{}\t{}", c.name, if c.pass { "pass" } else { "fail" }, c.detail).unwrap();
        }
        out
    }
}
