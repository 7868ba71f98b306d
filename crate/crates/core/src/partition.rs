//! Balanced edge partitioning with separator extraction.
//!
//! Edges are assigned to `k` blocks under the cap `|E_i| ≤ (1+ε)·⌈|E|/k⌉`.
//! The separator is the set of vertices incident to two or more distinct
//! block labels; removing it leaves the per-block vertex parts pairwise
//! disconnected, which is what lets the circuit layer split cleanly. The
//! heuristic minimizes total vertex replication, i.e. the number of extra
//! blocks vertices are spread across.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::rng::derive_seed;

/// Internal restarts of the greedy growth; the best labeling by replication
/// cost wins. Cheap at desk scale and it substantially improves the fraction
/// of instances where the heuristic matches the brute-force optimum.
const GROWTH_RESTARTS: u64 = 12;

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("graph has no edges to partition")]
    EmptyEdgeSet,
    #[error("cannot split {m} edges into {k} non-degenerate blocks")]
    InfeasibleBalance { k: usize, m: usize },
    #[error("imbalance tolerance must be non-negative, got {0}")]
    InvalidEpsilon(f64),
    #[error("labeling covers {got} edges but the graph has {expected}")]
    MissingLabels { expected: usize, got: usize },
    #[error("label {label} out of range for k = {k}")]
    LabelOutOfRange { label: usize, k: usize },
}

/// An edge partition with its derived vertex structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgePartition {
    pub k: usize,
    pub epsilon: f64,
    /// Block id of each edge, indexed by edge id.
    pub labels: Vec<usize>,
    /// Vertices incident to at least two distinct labels, ascending.
    pub separator: Vec<usize>,
    /// Per-block vertex parts `V_i`, each ascending; disjoint from the
    /// separator and from each other.
    pub parts: Vec<Vec<usize>>,
}

/// Block size cap `⌊(1+ε)·⌈m/k⌉⌋`.
pub fn block_cap(m: usize, k: usize, epsilon: f64) -> usize {
    let ideal = m.div_ceil(k);
    ((1.0 + epsilon) * ideal as f64).floor() as usize
}

/// Partitions the edges of `g` into `k` balanced blocks.
///
/// Each block grows greedily from a random seed edge, repeatedly absorbing
/// the unassigned edge touching the block that replicates the fewest new
/// vertices (smallest edge id on ties), and stops at the balance cap. Several
/// seeded restarts are scored by [`replication_cost`] and the cheapest
/// labeling is kept, so the result is deterministic for a fixed seed.
pub fn edge_partition(
    g: &Graph,
    k: usize,
    epsilon: f64,
    seed: u64,
) -> Result<EdgePartition, PartitionError> {
    let m = g.edge_count();
    if m == 0 {
        return Err(PartitionError::EmptyEdgeSet);
    }
    if k == 0 || k > m {
        return Err(PartitionError::InfeasibleBalance { k, m });
    }
    if epsilon < 0.0 || !epsilon.is_finite() {
        return Err(PartitionError::InvalidEpsilon(epsilon));
    }
    let cap = block_cap(m, k, epsilon);

    let mut best: Option<(usize, Vec<usize>)> = None;
    for restart in 0..GROWTH_RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, restart));
        let labels = grow_blocks(g, k, cap, &mut rng);
        let cost = replication_cost(g, &labels)?;
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, labels));
        }
    }
    let (_, labels) = best.expect("at least one restart ran");

    let separator = separator_from_labels(g, &labels)?;
    let mut parts = induced_parts(g, &labels, &separator)?;
    // Blocks past the highest used label come back missing; keep k entries.
    parts.resize(k, Vec::new());
    Ok(EdgePartition {
        k,
        epsilon,
        labels,
        separator,
        parts,
    })
}

fn grow_blocks(g: &Graph, k: usize, cap: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let m = g.edge_count();
    let mut labels: Vec<Option<usize>> = vec![None; m];
    let mut vertex_labels: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); g.n()];
    let mut unassigned = m;

    for block in 0..k {
        let mut size = 0;
        // Unassigned edges touching the block's current vertex set.
        let mut frontier: BTreeSet<usize> = BTreeSet::new();
        while size < cap && unassigned > 0 {
            let edge = match frontier
                .iter()
                .min_by_key(|&&e| {
                    let delta = new_replicas(g, &vertex_labels, e, block);
                    let enclosure = enclosure(g, &vertex_labels, e, block);
                    (delta, std::cmp::Reverse(enclosure), e)
                })
            {
                Some(&e) => e,
                None => {
                    // Growth stalled (or block is empty): seed from a random
                    // unassigned edge.
                    let pool: Vec<usize> =
                        (0..m).filter(|&e| labels[e].is_none()).collect();
                    pool[rng.gen_range(0..pool.len())]
                }
            };

            labels[edge] = Some(block);
            unassigned -= 1;
            frontier.remove(&edge);
            size += 1;
            let (u, v) = g.edges()[edge];
            for w in [u, v] {
                if vertex_labels[w].insert(block) {
                    for f in g.incident_edges(w) {
                        if labels[f].is_none() {
                            frontier.insert(f);
                        }
                    }
                }
            }
        }
    }
    labels.into_iter().map(|l| l.expect("all edges assigned")).collect()
}

/// Endpoints of `edge` that would start spanning a new block if the edge were
/// given `block`.
fn new_replicas(g: &Graph, vertex_labels: &[BTreeSet<usize>], edge: usize, block: usize) -> usize {
    let (u, v) = g.edges()[edge];
    [u, v]
        .iter()
        .filter(|&&w| !vertex_labels[w].is_empty() && !vertex_labels[w].contains(&block))
        .count()
}

/// How enclosed `edge` is in `block`: endpoints already inside count as fully
/// enclosed, outside endpoints contribute their number of inside neighbors.
/// Ranking ties by enclosure keeps growth compact instead of hopping along
/// long-range edges, which would scatter the block and inflate the separator.
fn enclosure(g: &Graph, vertex_labels: &[BTreeSet<usize>], edge: usize, block: usize) -> usize {
    let (u, v) = g.edges()[edge];
    [u, v]
        .iter()
        .map(|&w| {
            if vertex_labels[w].contains(&block) {
                g.n()
            } else {
                g.neighbors(w)
                    .iter()
                    .filter(|&&y| vertex_labels[y].contains(&block))
                    .count()
            }
        })
        .sum()
}

/// Total vertex replication of a labeling: for each vertex, the number of
/// distinct incident labels minus one. Isolated vertices contribute zero.
pub fn replication_cost(g: &Graph, labels: &[usize]) -> Result<usize, PartitionError> {
    let distinct = distinct_labels_per_vertex(g, labels)?;
    Ok(distinct.iter().map(|set| set.len().saturating_sub(1)).sum())
}

/// Vertices incident to at least two distinct labels, ascending.
pub fn separator_from_labels(g: &Graph, labels: &[usize]) -> Result<Vec<usize>, PartitionError> {
    let distinct = distinct_labels_per_vertex(g, labels)?;
    Ok((0..g.n()).filter(|&v| distinct[v].len() >= 2).collect())
}

fn distinct_labels_per_vertex(
    g: &Graph,
    labels: &[usize],
) -> Result<Vec<BTreeSet<usize>>, PartitionError> {
    if labels.len() != g.edge_count() {
        return Err(PartitionError::MissingLabels {
            expected: g.edge_count(),
            got: labels.len(),
        });
    }
    let mut distinct = vec![BTreeSet::new(); g.n()];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        distinct[u].insert(labels[e]);
        distinct[v].insert(labels[e]);
    }
    Ok(distinct)
}

/// Derives the vertex parts `V_i` from a labeling and its separator: a
/// non-separator vertex with edges goes to the block all its edges carry, and
/// isolated vertices go to the currently smallest part (lowest block id on
/// ties).
pub fn induced_parts(
    g: &Graph,
    labels: &[usize],
    separator: &[usize],
) -> Result<Vec<Vec<usize>>, PartitionError> {
    if labels.len() != g.edge_count() {
        return Err(PartitionError::MissingLabels {
            expected: g.edge_count(),
            got: labels.len(),
        });
    }
    let k = labels.iter().copied().max().map_or(1, |max| max + 1);
    let sep: BTreeSet<usize> = separator.iter().copied().collect();
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut isolated = Vec::new();

    for v in 0..g.n() {
        if sep.contains(&v) {
            continue;
        }
        match g.incident_edges(v).first() {
            Some(&e) => parts[labels[e]].push(v),
            None => isolated.push(v),
        }
    }
    for v in isolated {
        let smallest = (0..k).min_by_key(|&i| (parts[i].len(), i)).expect("k >= 1");
        parts[smallest].push(v);
    }
    for part in &mut parts {
        part.sort_unstable();
    }
    Ok(parts)
}

/// One violated partition invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    LabelsWrongLength { expected: usize, got: usize },
    LabelOutOfRange { edge: usize, label: usize, k: usize },
    BalanceExceeded { block: usize, size: usize, cap: usize },
    SeparatorMissing { vertex: usize },
    SeparatorSpurious { vertex: usize },
    VertexUnassigned { vertex: usize },
    VertexMultiplyAssigned { vertex: usize },
    EdgeSpansParts { edge: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::LabelsWrongLength { expected, got } => {
                write!(f, "labels cover {got} edges, expected {expected}")
            }
            Violation::LabelOutOfRange { edge, label, k } => {
                write!(f, "edge {edge} carries label {label}, outside 0..{k}")
            }
            Violation::BalanceExceeded { block, size, cap } => {
                write!(f, "block {block} holds {size} edges, above the cap {cap}")
            }
            Violation::SeparatorMissing { vertex } => {
                write!(f, "vertex {vertex} spans multiple blocks but is not in the separator")
            }
            Violation::SeparatorSpurious { vertex } => {
                write!(f, "vertex {vertex} is in the separator but spans at most one block")
            }
            Violation::VertexUnassigned { vertex } => {
                write!(f, "vertex {vertex} is in no part and not in the separator")
            }
            Violation::VertexMultiplyAssigned { vertex } => {
                write!(f, "vertex {vertex} appears in more than one part or in a part and the separator")
            }
            Violation::EdgeSpansParts { edge } => {
                write!(f, "edge {edge} connects two different parts without touching the separator")
            }
        }
    }
}

/// Result of [`validate_partition`]; empty means every invariant holds.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every [`EdgePartition`] invariant and reports all violations found.
pub fn validate_partition(g: &Graph, p: &EdgePartition) -> ValidationReport {
    let mut report = ValidationReport::default();
    let m = g.edge_count();

    if p.labels.len() != m {
        report.violations.push(Violation::LabelsWrongLength {
            expected: m,
            got: p.labels.len(),
        });
        return report;
    }
    for (e, &label) in p.labels.iter().enumerate() {
        if label >= p.k {
            report.violations.push(Violation::LabelOutOfRange { edge: e, label, k: p.k });
        }
    }

    let cap = block_cap(m, p.k, p.epsilon);
    let mut sizes = vec![0usize; p.k];
    for &label in &p.labels {
        if label < p.k {
            sizes[label] += 1;
        }
    }
    for (block, &size) in sizes.iter().enumerate() {
        if size > cap {
            report.violations.push(Violation::BalanceExceeded { block, size, cap });
        }
    }

    let expected_sep = separator_from_labels(g, &p.labels).expect("length checked");
    let declared: BTreeSet<usize> = p.separator.iter().copied().collect();
    let expected: BTreeSet<usize> = expected_sep.into_iter().collect();
    for &v in expected.difference(&declared) {
        report.violations.push(Violation::SeparatorMissing { vertex: v });
    }
    for &v in declared.difference(&expected) {
        report.violations.push(Violation::SeparatorSpurious { vertex: v });
    }

    let mut assignment: BTreeMap<usize, usize> = BTreeMap::new();
    let mut multiply: BTreeSet<usize> = BTreeSet::new();
    for (i, part) in p.parts.iter().enumerate() {
        for &v in part {
            if assignment.insert(v, i).is_some() || declared.contains(&v) {
                multiply.insert(v);
            }
        }
    }
    for v in multiply {
        report.violations.push(Violation::VertexMultiplyAssigned { vertex: v });
    }
    for v in 0..g.n() {
        if !assignment.contains_key(&v) && !declared.contains(&v) {
            report.violations.push(Violation::VertexUnassigned { vertex: v });
        }
    }

    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if declared.contains(&u) || declared.contains(&v) {
            continue;
        }
        if assignment.get(&u) != assignment.get(&v) {
            report.violations.push(Violation::EdgeSpansParts { edge: e });
        }
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Minimum replication cost over every balanced `k`-labeling; exponential
    /// and only for small fixtures.
    fn brute_force_optimum(g: &Graph, k: usize, epsilon: f64) -> usize {
        let m = g.edge_count();
        assert!(k == 2 && m <= 12);
        let cap = block_cap(m, k, epsilon);
        let mut best = usize::MAX;
        for mask in 0u32..(1 << m) {
            let labels: Vec<usize> = (0..m).map(|e| (mask >> e & 1) as usize).collect();
            let mut sizes = [0usize; 2];
            for &l in &labels {
                sizes[l] += 1;
            }
            if sizes.iter().any(|&s| s > cap) {
                continue;
            }
            best = best.min(replication_cost(g, &labels).unwrap());
        }
        best
    }

    #[test]
    fn p5_two_blocks_cost_one() {
        let g = Graph::path(5);
        assert_eq!(brute_force_optimum(&g, 2, 0.0), 1);
        let p = edge_partition(&g, 2, 0.0, 1).unwrap();
        assert_eq!(replication_cost(&g, &p.labels).unwrap(), 1);
        assert_eq!(p.separator, vec![2]);
        let mut parts = p.parts.clone();
        parts.sort();
        assert_eq!(parts, vec![vec![0, 1], vec![3, 4]]);
    }

    #[test]
    fn single_block_is_trivial() {
        let g = Graph::path(5);
        let p = edge_partition(&g, 1, 0.0, 3).unwrap();
        assert!(p.labels.iter().all(|&l| l == 0));
        assert!(p.separator.is_empty());
        assert_eq!(p.parts, vec![vec![0, 1, 2, 3, 4]]);
        assert_eq!(replication_cost(&g, &p.labels).unwrap(), 0);
    }

    #[test]
    fn star_center_is_the_separator() {
        let g = Graph::star(5);
        assert_eq!(brute_force_optimum(&g, 2, 0.0), 1);
        let p = edge_partition(&g, 2, 0.0, 7).unwrap();
        assert_eq!(replication_cost(&g, &p.labels).unwrap(), 1);
        assert_eq!(p.separator, vec![0]);
        // The zero-tolerance cap forces two edges per block, so the leaves
        // split evenly between the parts.
        assert_eq!(p.parts.iter().map(Vec::len).collect::<Vec<_>>(), vec![2, 2]);
    }

    #[test]
    fn triangle_with_three_labels_costs_three() {
        let g = Graph::cycle(3);
        assert_eq!(replication_cost(&g, &[0, 1, 2]).unwrap(), 3);
    }

    #[test]
    fn separator_examples() {
        let g = Graph::path(5);
        assert!(separator_from_labels(&g, &[0, 0, 0, 0]).unwrap().is_empty());
        assert_eq!(separator_from_labels(&g, &[0, 0, 1, 1]).unwrap(), vec![2]);
    }

    #[test]
    fn separator_is_invariant_under_relabeling() {
        let g = Graph::cycle(8);
        let labels = [0, 0, 1, 1, 2, 2, 0, 1];
        let swapped: Vec<usize> = labels.iter().map(|&l| [2, 0, 1][l]).collect();
        assert_eq!(
            separator_from_labels(&g, &labels).unwrap(),
            separator_from_labels(&g, &swapped).unwrap()
        );
    }

    #[test]
    fn separator_matches_independent_recount_on_bridged_triangles() {
        // Two triangles joined by a bridge: the balanced optimum assigns one
        // triangle plus the bridge to one block, leaving a single bridge
        // endpoint with edges in both blocks.
        let g = Graph::from_edges(6, vec![(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)]);
        assert_eq!(brute_force_optimum(&g, 2, 0.0), 1);
        let p = edge_partition(&g, 2, 0.0, 3).unwrap();
        assert_eq!(replication_cost(&g, &p.labels).unwrap(), 1);

        // Recount label spans per vertex without going through the library.
        let mut expected = Vec::new();
        for v in 0..g.n() {
            let mut seen = BTreeSet::new();
            for e in g.incident_edges(v) {
                seen.insert(p.labels[e]);
            }
            if seen.len() >= 2 {
                expected.push(v);
            }
        }
        assert_eq!(p.separator, expected);
        assert_eq!(p.separator.len(), 1);
        assert!(p.separator[0] == 2 || p.separator[0] == 3);
    }

    #[test]
    fn missing_labels_are_an_error() {
        let g = Graph::path(5);
        assert!(matches!(
            replication_cost(&g, &[0, 0]),
            Err(PartitionError::MissingLabels { expected: 4, got: 2 })
        ));
    }

    #[test]
    fn isolated_vertices_go_to_the_smallest_part() {
        // Path 0-1-2-3 plus isolated vertices 4 and 5.
        let g = Graph::from_edges(6, vec![(0, 1), (1, 2), (2, 3)]);
        let labels = vec![0, 0, 1];
        let sep = separator_from_labels(&g, &labels).unwrap();
        assert_eq!(sep, vec![2]);
        let parts = induced_parts(&g, &labels, &sep).unwrap();
        // Part 1 starts smaller ({3} vs {0, 1}), so vertex 4 lands there,
        // then 5 balances back to part 1's now-equal rival by lowest id.
        assert_eq!(parts[0], vec![0, 1, 5]);
        assert_eq!(parts[1], vec![3, 4]);
    }

    #[test]
    fn validator_accepts_partitioner_output() {
        for seed in 0..20 {
            let g = crate::graph::generate::watts_strogatz(18, 4, 0.4, seed).unwrap();
            for k in [1, 2, 3, 5] {
                let p = edge_partition(&g, k, 0.05, seed).unwrap();
                let report = validate_partition(&g, &p);
                assert!(report.is_valid(), "seed {seed} k {k}: {:?}", report.violations);
            }
        }
    }

    #[test]
    fn validator_flags_overfull_block() {
        let g = Graph::path(5);
        let p = EdgePartition {
            k: 2,
            epsilon: 0.0,
            labels: vec![0, 0, 0, 1],
            separator: vec![3],
            parts: vec![vec![0, 1, 2], vec![4]],
        };
        let report = validate_partition(&g, &p);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::BalanceExceeded { block: 0, size: 3, cap: 2 })));
    }

    #[test]
    fn validator_flags_tampered_separator() {
        let g = Graph::path(5);
        let mut p = edge_partition(&g, 2, 0.0, 1).unwrap();
        p.separator.clear();
        let report = validate_partition(&g, &p);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::SeparatorMissing { vertex: 2 })));
    }

    #[test]
    fn heuristic_stays_within_twice_the_optimum_on_small_graphs() {
        let mut cases: Vec<Graph> = vec![
            Graph::path(5),
            Graph::path(9),
            Graph::cycle(6),
            Graph::star(5),
            Graph::complete(4),
            // Two triangles plus an isolated edge: the balanced optimum is 0.
            Graph::from_edges(8, vec![(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (6, 7)]),
        ];
        for seed in 0..10 {
            let g = crate::graph::generate::watts_strogatz(10, 2, 0.5, seed).unwrap();
            cases.push(g);
        }
        for (i, g) in cases.iter().enumerate() {
            if g.edge_count() > 10 {
                continue;
            }
            let optimum = brute_force_optimum(g, 2, 0.0);
            let p = edge_partition(g, 2, 0.0, 11 + i as u64).unwrap();
            let cost = replication_cost(g, &p.labels).unwrap();
            assert!(
                cost <= 2 * optimum,
                "case {i}: heuristic {cost} vs optimum {optimum}"
            );
        }
    }

    #[test]
    fn partition_is_deterministic_per_seed() {
        let g = crate::graph::generate::random_regular(16, 3, 5).unwrap();
        let a = edge_partition(&g, 3, 0.05, 9).unwrap();
        let b = edge_partition(&g, 3, 0.05, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn infeasible_parameters_error() {
        let g = Graph::path(3);
        assert!(matches!(
            edge_partition(&g, 5, 0.0, 1),
            Err(PartitionError::InfeasibleBalance { k: 5, m: 2 })
        ));
        assert!(matches!(
            edge_partition(&Graph::from_edges(3, Vec::new()), 1, 0.0, 1),
            Err(PartitionError::EmptyEdgeSet)
        ));
        assert!(matches!(
            edge_partition(&g, 2, -0.5, 1),
            Err(PartitionError::InvalidEpsilon(_))
        ));
    }

    #[test]
    fn partition_json_round_trips() {
        let g = Graph::path(5);
        let p = edge_partition(&g, 2, 0.05, 1).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        let back: EdgePartition = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
        assert!(json.starts_with("{\"k\":"));
    }
}
