//! Simple undirected graphs and classical maximum-independent-set tooling.
//!
//! [`Graph`] is the universe every other module references: no self-loops, no
//! multi-edges, vertex ids contiguous in `0..n`, symmetric sorted adjacency.
//! Submodules provide file IO ([`io`]), the random test families
//! ([`generate`]), and the exact/greedy classical oracles ([`oracle`]).

pub mod generate;
pub mod io;
pub mod oracle;

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("bitstring has length {got} but graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("vertex {0} out of range (graph has {1} vertices)")]
    VertexOutOfRange(usize, usize),
}

/// Simple undirected graph with contiguous vertex ids `0..n`.
///
/// Construction normalizes its input: self-loops are dropped, duplicate and
/// reversed edges are merged, and each edge is stored once as `(u, v)` with
/// `u < v`. The edge list is sorted, so the index of an edge in [`edges`] is a
/// stable edge id used by the partition module.
///
/// [`edges`]: Graph::edges
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph on `n` vertices from an edge iterator.
    ///
    /// # Panics
    ///
    /// Panics if an endpoint is `>= n`.
    pub fn from_edges<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut normalized: Vec<(usize, usize)> = edges
            .into_iter()
            .filter(|&(u, v)| u != v)
            .map(|(u, v)| {
                assert!(u < n && v < n, "edge ({u}, {v}) out of range for n = {n}");
                (u.min(v), u.max(v))
            })
            .collect();
        normalized.sort_unstable();
        normalized.dedup();

        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &normalized {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph {
            n,
            edges: normalized,
            adj,
        }
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted edge list; the slice index is the edge id.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edge ids incident to `v`, ascending.
    pub fn incident_edges(&self, v: usize) -> Vec<usize> {
        self.adj[v]
            .iter()
            .map(|&u| {
                let key = (v.min(u), v.max(u));
                self.edges.binary_search(&key).expect("adjacency matches edge list")
            })
            .collect()
    }

    /// True iff no edge has both endpoints set in `bits`.
    ///
    /// The all-zero bitstring encodes the empty set, which is independent.
    pub fn is_independent(&self, bits: &[bool]) -> Result<bool, GraphError> {
        if bits.len() != self.n {
            return Err(GraphError::LengthMismatch {
                expected: self.n,
                got: bits.len(),
            });
        }
        Ok(self.edges.iter().all(|&(u, v)| !(bits[u] && bits[v])))
    }

    /// BFS connectivity check; the empty graph counts as connected.
    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &u in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    queue.push_back(u);
                }
            }
        }
        count == self.n
    }

    /// Stable fingerprint of `(n, edges)`, used to pair reports with graphs.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.n.hash(&mut h);
        self.edges.hash(&mut h);
        h.finish()
    }

    /// Path graph 0-1-...-(n-1).
    pub fn path(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|v| (v - 1, v)))
    }

    /// Cycle graph on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    /// Star with center 0 and `n - 1` leaves.
    pub fn star(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|v| (0, v)))
    }
}

/// A candidate MIS solution: a bitstring over the vertices plus its cached
/// Hamming weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    bits: Vec<bool>,
    weight: usize,
}

impl Solution {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        let weight = bits.iter().filter(|&&b| b).count();
        Solution { bits, weight }
    }

    pub fn empty(n: usize) -> Self {
        Solution {
            bits: vec![false; n],
            weight: 0,
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn is_valid_for(&self, g: &Graph) -> bool {
        g.is_independent(&self.bits).unwrap_or(false)
    }

    /// Vertex-id-ordered bitstring, e.g. `10101`.
    pub fn to_bitstring(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}
