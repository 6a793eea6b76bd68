//! Text formats: edge lists, cycle/path files.
//!
//! Edge list: first non-comment line `r n m`, then m lines of r vertex ids.
//! Canonical output sorts edges lexicographically. Lines starting with `#`
//! are comments.
//!
//! Sequence files (cycles, paths): first line `r n`, second line the
//! space-separated vertex sequence.

use crate::hypergraph::{HypergraphError, RUniformHypergraph};
use crate::set::Vertex;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] HypergraphError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<RUniformHypergraph, IoError> {
    let mut graph: Option<RUniformHypergraph> = None;
    let mut declared_m = 0usize;
    let mut seen_m = 0usize;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        match graph {
            None => {
                if fields.len() != 3 {
                    return Err(parse_err(lineno, "expected header 'r n m'"));
                }
                let r: usize = fields[0]
                    .parse()
                    .map_err(|_| parse_err(lineno, "bad r"))?;
                let n: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_err(lineno, "bad n"))?;
                declared_m = fields[2]
                    .parse()
                    .map_err(|_| parse_err(lineno, "bad m"))?;
                graph = Some(RUniformHypergraph::new(n, r)?);
            }
            Some(ref mut g) => {
                if fields.len() != g.r() {
                    return Err(parse_err(
                        lineno,
                        format!("expected {} vertices, got {}", g.r(), fields.len()),
                    ));
                }
                let mut e = Vec::with_capacity(g.r());
                for f in fields {
                    e.push(
                        f.parse::<Vertex>()
                            .map_err(|_| parse_err(lineno, "bad vertex id"))?,
                    );
                }
                g.add_edge(&e)?;
                seen_m += 1;
            }
        }
    }
    let g = graph.ok_or_else(|| parse_err(0, "empty edge-list file"))?;
    if seen_m != declared_m {
        return Err(parse_err(
            0,
            format!("header declared m = {declared_m}, found {seen_m} edges"),
        ));
    }
    Ok(g)
}

/// Canonical edge-list text: header then lexicographically sorted edges.
pub fn edge_list_string(g: &RUniformHypergraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", g.r(), g.n(), g.edge_count());
    for e in g.sorted_edges() {
        let words: Vec<String> = e.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", words.join(" "));
    }
    out
}

pub fn write_edge_list<W: Write>(mut w: W, g: &RUniformHypergraph) -> Result<(), IoError> {
    w.write_all(edge_list_string(g).as_bytes())?;
    Ok(())
}

/// `r n` header plus one sequence line.
pub fn sequence_string(r: usize, seq: &[Vertex]) -> String {
    let words: Vec<String> = seq.iter().map(|v| v.to_string()).collect();
    format!("{} {}\n{}\n", r, seq.len(), words.join(" "))
}

pub fn read_sequence<R: BufRead>(reader: R) -> Result<(usize, Vec<Vertex>), IoError> {
    let mut header: Option<(usize, usize)> = None;
    let mut seq: Vec<Vertex> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        match header {
            None => {
                if fields.len() != 2 {
                    return Err(parse_err(lineno, "expected header 'r len'"));
                }
                let r = fields[0].parse().map_err(|_| parse_err(lineno, "bad r"))?;
                let len = fields[1]
                    .parse()
                    .map_err(|_| parse_err(lineno, "bad length"))?;
                header = Some((r, len));
            }
            Some(_) => {
                for f in fields {
                    seq.push(
                        f.parse::<Vertex>()
                            .map_err(|_| parse_err(lineno, "bad vertex id"))?,
                    );
                }
            }
        }
    }
    let (r, len) = header.ok_or_else(|| parse_err(0, "empty sequence file"))?;
    if seq.len() != len {
        return Err(parse_err(
            0,
            format!("header declared {len} vertices, found {}", seq.len()),
        ));
    }
    Ok((r, seq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::tight_cycle;

    #[test]
    fn edge_list_round_trip() {
        let g = tight_cycle(6, 3).unwrap();
        let text = edge_list_string(&g);
        assert!(text.starts_with("3 6 6\n"));
        let back = read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(back.sorted_edges(), g.sorted_edges());
        assert_eq!(edge_list_string(&back), text);
    }

    #[test]
    fn comments_and_blank_lines_skipped() {
        let text = "# generated\n3 4 1\n\n0 1 2  # window\n";
        let g = read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(&[0, 1, 2]));
    }

    #[test]
    fn header_mismatch_rejected() {
        let text = "3 4 2\n0 1 2\n";
        assert!(read_edge_list(text.as_bytes()).is_err());
    }

    #[test]
    fn sequence_round_trip() {
        let s = sequence_string(3, &[4, 0, 2, 1, 3]);
        let (r, seq) = read_sequence(s.as_bytes()).unwrap();
        assert_eq!(r, 3);
        assert_eq!(seq, vec![4, 0, 2, 1, 3]);
    }
}
