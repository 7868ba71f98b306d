//! Graph file loading: whitespace edge lists and Matrix Market coordinate
//! files.
//!
//! Both loaders normalize to the [`Graph`] invariants (loops dropped,
//! duplicates merged) and report how much was cleaned up, since real-world
//! matrix files routinely carry diagonal entries and mirrored pairs.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use thiserror::Error;

use super::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    MatrixMarket,
}

impl GraphFormat {
    /// Picks a format from the file extension: `.mtx` means Matrix Market,
    /// anything else is treated as an edge list.
    pub fn from_path(path: &Path) -> GraphFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("mtx") => GraphFormat::MatrixMarket,
            _ => GraphFormat::EdgeList,
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("file contains no vertices")]
    EmptyGraph,
}

/// A loaded graph together with the id mapping and cleanup counters.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub graph: Graph,
    /// Original id of each compacted vertex: `original_ids[v]` is the id the
    /// input file used for vertex `v`.
    pub original_ids: Vec<u64>,
    pub self_loops_dropped: usize,
    pub duplicates_merged: usize,
}

/// Loads a graph file in the declared format.
pub fn load_graph(path: &Path, format: GraphFormat) -> Result<Loaded, LoadError> {
    let reader = BufReader::new(File::open(path)?);
    match format {
        GraphFormat::EdgeList => read_edge_list(reader),
        GraphFormat::MatrixMarket => read_matrix_market(reader),
    }
}

/// Parses a whitespace edge list: one `u v` pair per line, `#` comments and
/// blank lines allowed. Ids may be 0- or 1-based or sparse; vertices are
/// compacted to `0..n` in ascending original-id order.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Loaded, LoadError> {
    let mut raw_edges: Vec<(u64, u64)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let content = match line.split('#').next() {
            Some(c) => c.trim(),
            None => "",
        };
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace();
        let u = parse_id(fields.next(), line_no)?;
        let v = parse_id(fields.next(), line_no)?;
        if fields.next().is_some() {
            return Err(LoadError::Parse {
                line: line_no,
                msg: "expected exactly two ids per line".into(),
            });
        }
        raw_edges.push((u, v));
    }
    compact(raw_edges, None)
}

fn parse_id(field: Option<&str>, line: usize) -> Result<u64, LoadError> {
    let field = field.ok_or_else(|| LoadError::Parse {
        line,
        msg: "expected two ids, found fewer".into(),
    })?;
    field.parse::<u64>().map_err(|_| LoadError::Parse {
        line,
        msg: format!("invalid vertex id {field:?}"),
    })
}

/// Parses a Matrix Market coordinate file as an undirected graph.
///
/// Accepted headers: `matrix coordinate` with any of the
/// pattern/real/integer fields and general/symmetric/skew-symmetric
/// symmetry. Values are ignored, diagonal entries are dropped, and the
/// declared dimension fixes the vertex count, so isolated vertices survive.
pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<Loaded, LoadError> {
    let mut lines = reader.lines().enumerate();

    let mut size_line: Option<(usize, String)> = None;
    for (idx, line) in &mut lines {
        let line = line?;
        if idx == 0 && line.starts_with("%%MatrixMarket") {
            let lower = line.to_ascii_lowercase();
            if !lower.contains("matrix") || !lower.contains("coordinate") {
                return Err(LoadError::Parse {
                    line: 1,
                    msg: "only 'matrix coordinate' Matrix Market files are supported".into(),
                });
            }
            continue;
        }
        if line.starts_with('%') || line.trim().is_empty() {
            continue;
        }
        size_line = Some((idx + 1, line));
        break;
    }

    let (size_line_no, size_line) = size_line.ok_or(LoadError::EmptyGraph)?;
    let dims: Vec<&str> = size_line.split_whitespace().collect();
    if dims.len() != 3 {
        return Err(LoadError::Parse {
            line: size_line_no,
            msg: "expected 'rows cols nnz' size line".into(),
        });
    }
    let rows: u64 = dims[0].parse().map_err(|_| LoadError::Parse {
        line: size_line_no,
        msg: format!("invalid row count {:?}", dims[0]),
    })?;
    let cols: u64 = dims[1].parse().map_err(|_| LoadError::Parse {
        line: size_line_no,
        msg: format!("invalid column count {:?}", dims[1]),
    })?;
    if rows != cols {
        return Err(LoadError::Parse {
            line: size_line_no,
            msg: format!("adjacency matrix must be square, got {rows}x{cols}"),
        });
    }
    if rows == 0 {
        return Err(LoadError::EmptyGraph);
    }

    let mut raw_edges: Vec<(u64, u64)> = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let line_no = idx + 1;
        if line.starts_with('%') || line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let i = parse_id(fields.next(), line_no)?;
        let j = parse_id(fields.next(), line_no)?;
        if i == 0 || j == 0 || i > rows || j > rows {
            return Err(LoadError::Parse {
                line: line_no,
                msg: format!("entry ({i}, {j}) outside 1..={rows}"),
            });
        }
        raw_edges.push((i - 1, j - 1));
    }
    compact(raw_edges, Some(rows))
}

/// Compacts raw edges to contiguous ids, dropping loops and merging
/// duplicates. With `declared_n`, the vertex universe is `0..declared_n`
/// (1-based original ids); otherwise it is the set of observed ids.
fn compact(raw_edges: Vec<(u64, u64)>, declared_n: Option<u64>) -> Result<Loaded, LoadError> {
    let (original_ids, index_of): (Vec<u64>, std::collections::HashMap<u64, usize>) =
        match declared_n {
            Some(n) => {
                let ids: Vec<u64> = (1..=n).collect();
                let map = (0..n as usize).map(|v| (v as u64, v)).collect();
                (ids, map)
            }
            None => {
                let mut observed: Vec<u64> =
                    raw_edges.iter().flat_map(|&(u, v)| [u, v]).collect();
                observed.sort_unstable();
                observed.dedup();
                let map = observed.iter().enumerate().map(|(i, &id)| (id, i)).collect();
                (observed, map)
            }
        };
    if original_ids.is_empty() {
        return Err(LoadError::EmptyGraph);
    }

    let n = original_ids.len();
    let mut self_loops_dropped = 0;
    let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(raw_edges.len());
    for (u, v) in raw_edges {
        if u == v {
            self_loops_dropped += 1;
            continue;
        }
        let (a, b) = (index_of[&u], index_of[&v]);
        normalized.push((a.min(b), a.max(b)));
    }
    normalized.sort_unstable();
    let before = normalized.len();
    normalized.dedup();
    let duplicates_merged = before - normalized.len();

    Ok(Loaded {
        graph: Graph::from_edges(n, normalized),
        original_ids,
        self_loops_dropped,
        duplicates_merged,
    })
}
