//! Regression files: one `variety;statement;expected[;group]` record per
//! line, `#` starts a comment.
//!
//! `expected` is `valid`, `invalid`, `unknown-ok` (any verdict, the line
//! only has to run), or `valid,unknown-ok` / `invalid,unknown-ok` (the
//! verdict must match unless it is unknown).

use std::fmt::Write;

use clap::ValueEnum;

use crate::decide::{decide, Request, Variety};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineResult {
    pub line: usize,
    pub passed: bool,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct Report {
    pub results: Vec<LineResult>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let tag = if r.passed { "PASS" } else { "FAIL" };
            writeln!(out, "{tag} line {}: {}", r.line, r.message).unwrap();
        }
        let passed = self.results.iter().filter(|r| r.passed).count();
        writeln!(out, "{passed}/{} lines passed", self.results.len()).unwrap();
        out
    }
}

fn accepts(expected: &str, got: &str) -> Option<bool> {
    Some(match expected {
        "valid" | "invalid" => got == expected,
        "unknown-ok" => true,
        "valid,unknown-ok" => got == "valid" || got == "unknown",
        "invalid,unknown-ok" => got == "invalid" || got == "unknown",
        _ => return None,
    })
}

pub fn run_corpus(text: &str) -> Report {
    let mut report = Report::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split(';').map(str::trim).collect();
        let fail = |message: String| LineResult {
            line,
            passed: false,
            message,
        };
        if !(3..=4).contains(&fields.len()) {
            report
                .results
                .push(fail(format!("malformed record `{content}` (expected 3 or 4 fields)")));
            continue;
        }
        let Ok(variety) = Variety::from_str(fields[0], true) else {
            report.results.push(fail(format!("unknown variety `{}`", fields[0])));
            continue;
        };
        let group = match fields.get(3).map(|g| g.parse()) {
            None => None,
            Some(Ok(g)) => Some(g),
            Some(Err(e)) => {
                report.results.push(fail(format!("{e}")));
                continue;
            }
        };
        let expected = fields[2];
        if accepts(expected, "valid").is_none() {
            report.results.push(fail(format!("unknown expectation `{expected}`")));
            continue;
        }
        let req = Request {
            variety,
            group,
            ..Request::default()
        };
        let result = match decide(&req, fields[1]) {
            Ok(out) => {
                let passed = accepts(expected, out.label).unwrap_or(false);
                LineResult {
                    line,
                    passed,
                    message: format!("{} `{}`: expected {expected}, got {}", fields[0], fields[1], out.label),
                }
            }
            Err(e) => fail(format!("`{}`: {e}", fields[1])),
        };
        report.results.push(result);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_passes() {
        let r = run_corpus("");
        assert!(r.all_passed());
        assert!(r.results.is_empty());
        assert!(run_corpus("# only a comment\n\n").results.is_empty());
    }

    #[test]
    fn wrong_expectation_fails() {
        let r = run_corpus("lg; e <= x; valid\n");
        assert!(!r.all_passed());
        assert_eq!(r.results[0].line, 1);
    }

    #[test]
    fn malformed_line_reports_number() {
        let r = run_corpus("lg; e <= x; invalid\nnonsense\n");
        assert!(r.results[0].passed);
        assert!(!r.results[1].passed);
        assert_eq!(r.results[1].line, 2);
    }
}
