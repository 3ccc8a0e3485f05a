//! Graph ingestion, JSON reports and CSV traces.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problems::Graph;
use crate::report::{SolveReport, TraceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// `u v [w]` per line, 0-indexed, `#` comments.
    EdgeList,
    /// `%%MatrixMarket matrix coordinate real|pattern symmetric`, 1-indexed.
    MatrixMarket,
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edgelist" => Ok(Self::EdgeList),
            "matrixmarket" | "mtx" => Ok(Self::MatrixMarket),
            other => Err(Error::InvalidArgument(format!("unknown graph format {other:?}"))),
        }
    }
}

pub fn load_graph(path: impl AsRef<Path>, format: GraphFormat) -> Result<Graph> {
    let text = fs::read_to_string(path)?;
    parse_graph(&text, format)
}

pub fn parse_graph(text: &str, format: GraphFormat) -> Result<Graph> {
    match format {
        GraphFormat::EdgeList => parse_edgelist(text),
        GraphFormat::MatrixMarket => parse_matrix_market(text),
    }
}

fn field<T: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad {what} {tok:?}"),
    })
}

fn check_edge(u: usize, v: usize, w: f64, line: usize) -> Result<()> {
    if u == v {
        return Err(Error::Parse {
            line,
            msg: format!("self-loop on node {u}"),
        });
    }
    if !w.is_finite() || w < 0.0 {
        return Err(Error::Parse {
            line,
            msg: format!("weight {w} must be finite and nonnegative"),
        });
    }
    Ok(())
}

fn parse_edgelist(text: &str) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut toks = body.split_whitespace();
        let u: usize = field(toks.next(), line, "source")?;
        let v: usize = field(toks.next(), line, "target")?;
        let w: f64 = match toks.next() {
            Some(t) => field(Some(t), line, "weight")?,
            None => 1.0,
        };
        if toks.next().is_some() {
            return Err(Error::Parse {
                line,
                msg: "trailing fields".into(),
            });
        }
        check_edge(u, v, w, line)?;
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v, w));
    }
    Graph::new(n, edges)
}

fn parse_matrix_market(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let h: Vec<String> = header.split_whitespace().map(|s| s.to_ascii_lowercase()).collect();
    let pattern = match h.as_slice() {
        [tag, m, c, kind, sym] if tag == "%%matrixmarket" && m == "matrix" && c == "coordinate" && sym == "symmetric" => {
            match kind.as_str() {
                "real" | "integer" => false,
                "pattern" => true,
                _ => {
                    return Err(Error::Parse {
                        line: 1,
                        msg: format!("unsupported field {kind}"),
                    })
                }
            }
        }
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "expected a symmetric coordinate MatrixMarket header".into(),
            })
        }
    };

    let mut size: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (k, raw) in lines {
        let line = k + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('%') {
            continue;
        }
        let mut toks = body.split_whitespace();
        match size {
            None => {
                let r: usize = field(toks.next(), line, "row count")?;
                let c: usize = field(toks.next(), line, "column count")?;
                let nnz: usize = field(toks.next(), line, "entry count")?;
                if r != c {
                    return Err(Error::Parse {
                        line,
                        msg: format!("matrix is {r}x{c}, not square"),
                    });
                }
                size = Some((r, nnz));
            }
            Some((n, _)) => {
                let i: usize = field(toks.next(), line, "row")?;
                let j: usize = field(toks.next(), line, "column")?;
                let w: f64 = if pattern { 1.0 } else { field(toks.next(), line, "value")? };
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(Error::Parse {
                        line,
                        msg: format!("index ({i}, {j}) outside 1..={n}"),
                    });
                }
                check_edge(i, j, w, line)?;
                edges.push((i - 1, j - 1, w));
            }
        }
    }
    let (n, nnz) = size.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        msg: "missing size line".into(),
    })?;
    if edges.len() != nnz {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: format!("expected {nnz} entries, found {}", edges.len()),
        });
    }
    Graph::new(n, edges)
}

pub fn write_report(path: impl AsRef<Path>, report: &SolveReport) -> Result<()> {
    let json = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(path, json)?;
    Ok(())
}

pub fn read_report(path: impl AsRef<Path>) -> Result<SolveReport> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })
}

#[derive(Serialize)]
struct TraceRow {
    iter: usize,
    objective: f64,
    gap: f64,
    penalty: f64,
}

/// Trace as CSV with the fixed columns `iter,objective,gap,penalty`.
pub fn trace_csv(trace: &[TraceRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for t in trace {
        w.serialize(TraceRow {
            iter: t.iter,
            objective: t.objective,
            gap: t.gap,
            penalty: t.penalty,
        })
        .map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn write_trace(path: impl AsRef<Path>, trace: &[TraceRecord]) -> Result<()> {
    fs::write(path, trace_csv(trace)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edgelist_path() {
        let g = parse_graph("0 1 1.0\n1 2 1.0", GraphFormat::EdgeList).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges(), &[(0, 1, 1.0), (1, 2, 1.0)]);
    }

    #[test]
    fn edgelist_comments_and_defaults() {
        let g = parse_graph("# header\n0 1 # trailing\n\n2 1 0.5\n", GraphFormat::EdgeList).unwrap();
        assert_eq!(g.edges(), &[(0, 1, 1.0), (1, 2, 0.5)]);
    }

    #[test]
    fn edgelist_duplicates_merge() {
        let g = parse_graph("0 1 1\n1 0 2\n", GraphFormat::EdgeList).unwrap();
        assert_eq!(g.edges(), &[(0, 1, 3.0)]);
    }

    #[test]
    fn edgelist_errors_carry_line() {
        assert_eq!(
            parse_graph("0 1 1\n0 0 1.0", GraphFormat::EdgeList).unwrap_err(),
            Error::Parse {
                line: 2,
                msg: "self-loop on node 0".into()
            }
        );
        assert!(matches!(
            parse_graph("0 1 -1", GraphFormat::EdgeList),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_graph("# x\n0 a 1", GraphFormat::EdgeList),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn matrix_market() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% c\n3 3 2\n2 1 1.5\n3 2 1\n";
        let g = parse_graph(text, GraphFormat::MatrixMarket).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges(), &[(0, 1, 1.5), (1, 2, 1.0)]);
        let bad = "%%MatrixMarket matrix coordinate real general\n2 2 1\n2 1 1\n";
        assert!(parse_graph(bad, GraphFormat::MatrixMarket).is_err());
        let short = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n2 1 1\n";
        assert!(parse_graph(short, GraphFormat::MatrixMarket).is_err());
    }

    #[test]
    fn trace_columns() {
        let t = [TraceRecord {
            iter: 1,
            objective: 2.5,
            gap: 0.0,
            penalty: 0.01,
            vertex_distance: 0.0,
        }];
        assert_eq!(trace_csv(&t).unwrap(), "iter,objective,gap,penalty\n1,2.5,0.0,0.01\n");
    }
}
