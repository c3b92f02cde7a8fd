//! Line-based pattern files.
//!
//! ```text
//! # Example 1
//! n 5
//! m 1
//! a 1 1
//! a 1 2
//! b 4 1
//! name x5 reservoir
//! ```
//!
//! `n` comes first, `m` optionally next (default 0). `a i j` marks
//! `a_ij ≠ 0`, `b i j` marks `b_ij ≠ 0`, all 1-based. `name <vertex> <label>`
//! attaches a display label. `#` starts a comment anywhere on a line.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Vertex;
use crate::pattern::PatternMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternFile {
    pub a: PatternMatrix,
    /// Present iff `m ≥ 1`.
    pub b: Option<PatternMatrix>,
    pub names: BTreeMap<Vertex, String>,
    /// Non-fatal findings such as duplicate entries.
    pub warnings: Vec<String>,
}

impl PatternFile {
    pub fn n(&self) -> usize {
        self.a.n_rows()
    }

    pub fn m(&self) -> usize {
        self.b.as_ref().map_or(0, |b| b.n_cols())
    }
}

fn parse_index(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    tok.parse::<usize>().map_err(|_| Error::Parse {
        line,
        message: format!("{what} '{tok}' is not a non-negative integer"),
    })
}

fn no_trailing<'a>(mut toks: impl Iterator<Item = &'a str>, line: usize) -> Result<()> {
    match toks.next() {
        None => Ok(()),
        Some(extra) => Err(Error::Parse {
            line,
            message: format!("unexpected trailing token '{extra}'"),
        }),
    }
}

pub fn parse_pattern_file(text: &str) -> Result<PatternFile> {
    let mut n: Option<usize> = None;
    let mut m: Option<usize> = None;
    let mut a: Option<PatternMatrix> = None;
    let mut b: Option<PatternMatrix> = None;
    let mut names = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut saw_entry = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let key = toks.next().expect("non-empty line has a token");

        match key {
            "n" => {
                if n.is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "dimension n declared twice".into(),
                    });
                }
                let value = parse_index(toks.next(), line_no, "state dimension")?;
                no_trailing(toks, line_no)?;
                n = Some(value);
                a = Some(PatternMatrix::zeros(value, value));
            }
            _ if n.is_none() => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 'n <int>' before '{key}'"),
                });
            }
            "m" => {
                if m.is_some() || saw_entry {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "'m <int>' must appear once, right after 'n'".into(),
                    });
                }
                let value = parse_index(toks.next(), line_no, "input dimension")?;
                no_trailing(toks, line_no)?;
                m = Some(value);
                let rows = n.expect("checked above");
                b = Some(PatternMatrix::zeros(rows, value));
            }
            "a" | "b" => {
                saw_entry = true;
                let row = parse_index(toks.next(), line_no, "row index")?;
                let col = parse_index(toks.next(), line_no, "column index")?;
                no_trailing(toks, line_no)?;
                let rows = n.expect("checked above");
                let (cols, col_dim) = if key == "a" {
                    (rows, "n")
                } else {
                    (m.unwrap_or(0), "m")
                };
                if row == 0 || col == 0 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("entry {key} {row} {col}: indices are 1-based"),
                    });
                }
                if row > rows {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("row {row} exceeds n={rows}"),
                    });
                }
                if col > cols {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("column {col} exceeds {col_dim}={cols}"),
                    });
                }
                let target = if key == "a" { a.as_mut() } else { b.as_mut() };
                let fresh = target
                    .expect("matrix allocated with its dimension")
                    .insert(row - 1, col - 1)?;
                if !fresh {
                    warnings.push(format!(
                        "line {line_no}: duplicate entry {key} {row} {col} ignored"
                    ));
                }
            }
            "name" => {
                let vertex_tok = toks.next().ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: "missing vertex in 'name'".into(),
                })?;
                let vertex: Vertex = vertex_tok.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("unknown vertex '{vertex_tok}'"),
                })?;
                let in_range = match vertex {
                    Vertex::State(i) => i < n.unwrap_or(0),
                    Vertex::Input(j) => j < m.unwrap_or(0),
                };
                if !in_range {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("vertex {vertex} is out of range"),
                    });
                }
                let label: Vec<&str> = toks.collect();
                if label.is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("missing label for {vertex}"),
                    });
                }
                names.insert(vertex, label.join(" "));
            }
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("unknown directive '{other}'"),
                });
            }
        }
    }

    let a = a.ok_or(Error::Parse {
        line: 1,
        message: "missing 'n <int>' header".into(),
    })?;
    let b = b.filter(|b| b.n_cols() > 0);
    Ok(PatternFile {
        a,
        b,
        names,
        warnings,
    })
}

/// Canonical text form: header, names, then entries in row-major order.
pub fn serialize_pattern_file(file: &PatternFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "n {}", file.n());
    if file.m() > 0 {
        let _ = writeln!(out, "m {}", file.m());
    }
    for (vertex, label) in &file.names {
        let _ = writeln!(out, "name {vertex} {label}");
    }
    for (i, j) in file.a.iter() {
        let _ = writeln!(out, "a {} {}", i + 1, j + 1);
    }
    if let Some(b) = &file.b {
        for (i, j) in b.iter() {
            let _ = writeln!(out, "b {} {}", i + 1, j + 1);
        }
    }
    out
}

/// Wraps a pattern pair for serialization.
pub fn pattern_file(a: &PatternMatrix, b: Option<&PatternMatrix>) -> PatternFile {
    PatternFile {
        a: a.clone(),
        b: b.filter(|b| b.n_cols() > 0).cloned(),
        names: BTreeMap::new(),
        warnings: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example1;

    const EXAMPLE1: &str =
        "n 5\nm 1\na 1 1\na 1 2\na 1 3\na 2 1\na 2 4\na 3 4\na 3 5\na 5 5\nb 4 1\n";

    #[test]
    fn parses_example1() {
        let f = parse_pattern_file(EXAMPLE1).unwrap();
        let (a, b) = example1();
        assert_eq!(f.a, a);
        assert_eq!(f.b, Some(b));
        assert_eq!(f.a.nnz(), 8);
        assert!(f.warnings.is_empty());
    }

    #[test]
    fn header_only() {
        let f = parse_pattern_file("n 1\n").unwrap();
        assert_eq!(f.a, PatternMatrix::zeros(1, 1));
        assert!(f.b.is_none());
    }

    #[test]
    fn out_of_range_row() {
        let err = parse_pattern_file("n 5\na 6 1\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 2,
                message: "row 6 exceeds n=5".into()
            }
        );
        assert_eq!(err.to_string(), "line 2: row 6 exceeds n=5");
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        for (text, line) in [
            ("a 1 1\n", 1),
            ("n 2\na 1\n", 2),
            ("n 2\n\n# c\na x 1\n", 4),
            ("n 2\nc 1 1\n", 2),
            ("n 2\na 1 1 1\n", 2),
            ("n 2\nb 1 1\n", 2),
            ("n 2\na 1 1\nm 1\n", 3),
            ("n 2\na 0 1\n", 2),
        ] {
            match parse_pattern_file(text) {
                Err(Error::Parse { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
        assert!(parse_pattern_file("").is_err());
    }

    #[test]
    fn duplicates_warn() {
        let f = parse_pattern_file("n 2\na 1 2 # first\na 1 2\n").unwrap();
        assert_eq!(f.a.nnz(), 1);
        assert_eq!(f.warnings.len(), 1);
        assert!(f.warnings[0].starts_with("line 3"));
    }

    #[test]
    fn names_round_trip() {
        let text = "n 2\nm 1\nname x1 left tank\nname u1 pump\na 2 1\nb 1 1\n";
        let f = parse_pattern_file(text).unwrap();
        assert_eq!(f.names[&Vertex::State(0)], "left tank");
        assert_eq!(serialize_pattern_file(&f), text);
        assert!(parse_pattern_file("n 2\nname x3 foo\n").is_err());
    }
}
