//! Text formats for graphs.
//!
//! Dart tables look like
//!
//! ```text
//! graph 2 4
//! 0 0 1
//! 1 1 0
//! ...
//! ```
//!
//! and simple graphs may instead be written as `simple <n>` followed by one
//! `u v` line per edge.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{GraphError, ParseError};
use crate::graph::Graph;

/// Lines with comments stripped, paired with their 1-based line number.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

pub(crate) fn parse_usize(tok: &str, line: usize) -> Result<usize, ParseError> {
    tok.parse().map_err(|_| {
        ParseError::at(
            line,
            format!("expected a non-negative integer, found `{tok}`"),
        )
    })
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| ParseError::Format("empty graph file".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    match toks.as_slice() {
        ["graph", v, d] => {
            let v = parse_usize(v, hline)?;
            let d = parse_usize(d, hline)?;
            let mut beg = vec![usize::MAX; d];
            let mut inv = vec![usize::MAX; d];
            let mut line_of = vec![0; d];
            let mut next = 0;
            for (ln, line) in lines {
                let t: Vec<&str> = line.split_whitespace().collect();
                if t.len() != 3 {
                    return Err(ParseError::at(
                        ln,
                        "expected `<dart_id> <beg_vertex> <inv_dart_id>`",
                    ));
                }
                let id = parse_usize(t[0], ln)?;
                if id != next {
                    return Err(ParseError::at(
                        ln,
                        format!("expected dart {next}, found {id}"),
                    ));
                }
                if id >= d {
                    return Err(ParseError::at(
                        ln,
                        format!("dart {id} exceeds declared count {d}"),
                    ));
                }
                let b = parse_usize(t[1], ln)?;
                let i = parse_usize(t[2], ln)?;
                if b >= v {
                    return Err(ParseError::at(ln, format!("vertex {b} out of range")));
                }
                if i >= d {
                    return Err(ParseError::at(ln, format!("dart {i} out of range")));
                }
                beg[id] = b;
                inv[id] = i;
                line_of[id] = ln;
                next += 1;
            }
            if next != d {
                return Err(ParseError::Format(format!(
                    "declared {d} darts but found {next}"
                )));
            }
            for x in 0..d {
                if inv[inv[x]] != x {
                    return Err(ParseError::at(
                        line_of[x],
                        GraphError::NotInvolution(x).to_string(),
                    ));
                }
            }
            Ok(Graph::new(v, beg, inv)?)
        }
        ["simple", n] => {
            let n = parse_usize(n, hline)?;
            let mut edges = Vec::new();
            for (ln, line) in lines {
                let t: Vec<&str> = line.split_whitespace().collect();
                if t.len() != 2 {
                    return Err(ParseError::at(ln, "expected `<u> <v>`"));
                }
                let e = (parse_usize(t[0], ln)?, parse_usize(t[1], ln)?);
                if e.0 >= n || e.1 >= n || e.0 == e.1 {
                    return Err(ParseError::at(ln, format!("bad edge {} {}", e.0, e.1)));
                }
                edges.push(e);
            }
            Graph::from_simple_edges(n, &edges).map_err(ParseError::from)
        }
        _ => Err(ParseError::at(
            hline,
            "expected header `graph <V> <D>` or `simple <n>`",
        )),
    }
}

/// Normalized dart-table text.
pub fn format_graph(g: &Graph) -> String {
    let mut out = format!("graph {} {}\n", g.vertex_count(), g.dart_count());
    for x in 0..g.dart_count() {
        let _ = writeln!(out, "{x} {} {}", g.beg(x), g.inv(x));
    }
    out
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph, ParseError> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn write_graph(g: &Graph, path: impl AsRef<Path>) -> std::io::Result<()> {
    std::fs::write(path, format_graph(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_doubled_cycle() {
        let g = Graph::doubled_cycle(4).unwrap();
        assert_eq!(parse_graph(&format_graph(&g)).unwrap(), g);
    }

    #[test]
    fn broken_involution_names_dart_and_line() {
        let mut text = String::from("graph 1 8\n");
        let inv = [1, 0, 2, 5, 4, 7, 6, 3];
        for (x, i) in inv.iter().enumerate() {
            text.push_str(&format!("{x} 0 {i}\n"));
        }
        let err = parse_graph(&text).unwrap_err().to_string();
        assert!(err.contains("inv not involution at dart 3"), "{err}");
        assert!(err.contains("line 5"), "{err}");
    }

    #[test]
    fn simple_format_and_comments() {
        let g = parse_graph("# a path\nsimple 3\n0 1 # first\n1 2\n").unwrap();
        assert_eq!((g.vertex_count(), g.dart_count()), (3, 4));
    }

    #[test]
    fn dangling_indices() {
        assert!(parse_graph("graph 1 2\n0 0 1\n1 3 0\n").is_err());
        assert!(parse_graph("graph 1 2\n0 0 2\n1 0 0\n").is_err());
        assert!(parse_graph("graph 1 2\n0 0 1\n").is_err());
        assert!(parse_graph("nonsense").is_err());
    }
}
