//! Mixer schedules: degree ordering, restricted control sets, deferred
//! separator placement, cut counting, and separator sparsification.
//!
//! A schedule lists one partial-mixer slot per circuit vertex. From the
//! all-zeros initial state, a mixer only has to check neighbors that could
//! already have been rotated toward |1⟩: neighbors scheduled *earlier*, and
//! only active ones, since a wire whose mixer is off in every layer stays |0⟩
//! for the whole run. Placing all separator slots after every part slot means
//! no gate before the separator block couples two different parts, so the
//! parts simulate (or execute) independently and the only wires crossing into
//! the separator block are the separator's outside neighborhood.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error)]
pub enum AnsatzError {
    #[error("vertex {0} is scheduled more than once (parts and separator must be disjoint)")]
    DuplicateVertex(usize),
    #[error("edge ({0}, {1}) connects two different parts; parts must come from an edge partition")]
    PartsNotDisconnected(usize, usize),
    #[error("inactive vertex {0} is not scheduled in any part or the separator")]
    UnscheduledInactive(usize),
    #[error("layer count must be at least 1")]
    NoLayers,
}

/// How control sets are computed when building a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlMode {
    /// Earlier-scheduled active neighbors in the first layer, all active
    /// neighbors afterwards.
    Restricted,
    /// Every scheduled neighbor, in every layer. Reference semantics for
    /// equivalence checks.
    Full,
}

/// One partial-mixer slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MixerSlot {
    pub vertex: usize,
    /// Control vertices checked in the first layer.
    pub controls: Vec<usize>,
    /// Control vertices checked in layers after the first, where earlier
    /// mixers may already have populated any wire.
    pub later_controls: Vec<usize>,
    /// Inactive slots contribute no gate and no parameter.
    pub active: bool,
}

/// Half-open slot index range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, i: usize) -> bool {
        (self.start..self.end).contains(&i)
    }
}

/// An ordered mixer schedule over a set of circuit vertices.
///
/// Slot `i` acts on wire `i`; `qubits[i]` is the graph vertex carried by that
/// wire. Each layer applies every active slot in order followed by one phase
/// separator, so the parameter vector is laid out per layer as all active
/// mixer angles in slot order, then the phase angle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixerSchedule {
    /// Wire index → graph vertex id.
    pub qubits: Vec<usize>,
    pub slots: Vec<MixerSlot>,
    pub layers: usize,
    /// Slot ranges of the part blocks, in part order.
    pub part_segments: Vec<Segment>,
    /// Slot range of the deferred separator block (empty when nothing is
    /// deferred).
    pub separator_segment: Segment,
}

impl MixerSchedule {
    pub fn num_wires(&self) -> usize {
        self.qubits.len()
    }

    pub fn active_slot_count(&self) -> usize {
        self.slots.iter().filter(|s| s.active).count()
    }

    /// One angle per active mixer per layer, plus one phase angle per layer.
    pub fn param_count(&self) -> usize {
        self.layers * (self.active_slot_count() + 1)
    }

    pub fn inactive_slot_count(&self) -> usize {
        self.slots.len() - self.active_slot_count()
    }

    /// Wire index of a vertex, if it is scheduled.
    pub fn wire_of(&self, vertex: usize) -> Option<usize> {
        self.qubits.iter().position(|&v| v == vertex)
    }

    /// Vertices whose wires cross from part blocks into the separator block:
    /// the union of the active separator slots' control sets, restricted to
    /// part vertices. Empty for interleaved schedules.
    pub fn cut_wires(&self) -> BTreeSet<usize> {
        let part_vertices: BTreeSet<usize> = self
            .part_segments
            .iter()
            .flat_map(|seg| self.qubits[seg.start..seg.end].iter().copied())
            .collect();
        let mut cuts = BTreeSet::new();
        for i in self.separator_segment.start..self.separator_segment.end {
            let slot = &self.slots[i];
            if !slot.active {
                continue;
            }
            let controls = if self.layers > 1 { &slot.later_controls } else { &slot.controls };
            cuts.extend(controls.iter().copied().filter(|v| part_vertices.contains(v)));
        }
        cuts
    }
}

/// Sorts `subset` by neighborhood size ascending, vertex id on ties.
pub fn order_vertices(g: &Graph, subset: &[usize]) -> Vec<usize> {
    let mut ordered = subset.to_vec();
    ordered.sort_unstable_by_key(|&v| (g.degree(v), v));
    ordered
}

/// Position-restricted control sets: for each position `i`, the neighbors of
/// `ordering[i]` that appear at earlier positions.
///
/// # Panics
///
/// Panics if the ordering contains duplicates.
pub fn restricted_controls(ordering: &[usize], g: &Graph) -> Vec<Vec<usize>> {
    let mut position: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &v) in ordering.iter().enumerate() {
        let prev = position.insert(v, i);
        assert!(prev.is_none(), "vertex {v} appears twice in the ordering");
    }
    ordering
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut controls: Vec<usize> = g
                .neighbors(v)
                .iter()
                .copied()
                .filter(|u| position.get(u).is_some_and(|&j| j < i))
                .collect();
            controls.sort_unstable();
            controls
        })
        .collect()
}

/// Builds a deferred-constraint schedule: each part's vertices in degree
/// order, then the separator's, with restricted controls computed over the
/// whole concatenated ordering. Vertices in `inactive` keep their wires but
/// get no gate and no parameter.
pub fn build_schedule(
    g: &Graph,
    parts: &[Vec<usize>],
    separator: &[usize],
    inactive: &BTreeSet<usize>,
    layers: usize,
) -> Result<MixerSchedule, AnsatzError> {
    build_schedule_with_controls(g, parts, separator, inactive, layers, ControlMode::Restricted)
}

/// [`build_schedule`] with an explicit control mode.
pub fn build_schedule_with_controls(
    g: &Graph,
    parts: &[Vec<usize>],
    separator: &[usize],
    inactive: &BTreeSet<usize>,
    layers: usize,
    mode: ControlMode,
) -> Result<MixerSchedule, AnsatzError> {
    if layers == 0 {
        return Err(AnsatzError::NoLayers);
    }

    let mut part_of: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, part) in parts.iter().enumerate() {
        for &v in part {
            if part_of.insert(v, i).is_some() {
                return Err(AnsatzError::DuplicateVertex(v));
            }
        }
    }
    for &v in separator {
        if part_of.contains_key(&v) {
            return Err(AnsatzError::DuplicateVertex(v));
        }
    }
    for (&v, &i) in &part_of {
        for &u in g.neighbors(v) {
            if part_of.get(&u).is_some_and(|&j| j != i) {
                return Err(AnsatzError::PartsNotDisconnected(v.min(u), v.max(u)));
            }
        }
    }

    let mut ordering = Vec::new();
    let mut part_segments = Vec::with_capacity(parts.len());
    for part in parts {
        let start = ordering.len();
        ordering.extend(order_vertices(g, part));
        part_segments.push(Segment { start, end: ordering.len() });
    }
    let sep_start = ordering.len();
    ordering.extend(order_vertices(g, separator));
    let separator_segment = Segment { start: sep_start, end: ordering.len() };

    let slots = assemble_slots(g, &ordering, inactive, mode)?;
    Ok(MixerSchedule {
        qubits: ordering,
        slots,
        layers,
        part_segments,
        separator_segment,
    })
}

/// Builds a schedule with no deferred block: all vertices in one degree
/// ordering, restricted controls as usual. The counterpart configuration for
/// comparing against deferred placement.
pub fn build_interleaved_schedule(
    g: &Graph,
    vertices: &[usize],
    inactive: &BTreeSet<usize>,
    layers: usize,
) -> Result<MixerSchedule, AnsatzError> {
    if layers == 0 {
        return Err(AnsatzError::NoLayers);
    }
    let mut seen = BTreeSet::new();
    for &v in vertices {
        if !seen.insert(v) {
            return Err(AnsatzError::DuplicateVertex(v));
        }
    }
    let ordering = order_vertices(g, vertices);
    let end = ordering.len();
    let slots = assemble_slots(g, &ordering, inactive, ControlMode::Restricted)?;
    Ok(MixerSchedule {
        qubits: ordering,
        slots,
        layers,
        part_segments: vec![Segment { start: 0, end }],
        separator_segment: Segment { start: end, end },
    })
}

fn assemble_slots(
    g: &Graph,
    ordering: &[usize],
    inactive: &BTreeSet<usize>,
    mode: ControlMode,
) -> Result<Vec<MixerSlot>, AnsatzError> {
    let scheduled: BTreeSet<usize> = ordering.iter().copied().collect();
    for &v in inactive {
        if !scheduled.contains(&v) {
            return Err(AnsatzError::UnscheduledInactive(v));
        }
    }

    let positional = restricted_controls(ordering, g);
    let slots = ordering
        .iter()
        .zip(positional)
        .map(|(&v, early)| {
            let scheduled_neighbors = || {
                g.neighbors(v)
                    .iter()
                    .copied()
                    .filter(|u| scheduled.contains(u))
            };
            let (controls, later_controls) = match mode {
                ControlMode::Restricted => (
                    early.into_iter().filter(|u| !inactive.contains(u)).collect(),
                    scheduled_neighbors().filter(|u| !inactive.contains(u)).collect(),
                ),
                ControlMode::Full => {
                    let all: Vec<usize> = scheduled_neighbors().collect();
                    (all.clone(), all)
                }
            };
            MixerSlot {
                vertex: v,
                controls,
                later_controls,
                active: !inactive.contains(&v),
            }
        })
        .collect();
    Ok(slots)
}

/// Wire cuts needed to split a deferred circuit with the given active
/// separator subset: `|∪_{v ∈ active} N(v) \ full_separator|`.
pub fn cut_count(g: &Graph, separator_active: &[usize], full_separator: &[usize]) -> usize {
    let sep: BTreeSet<usize> = full_separator.iter().copied().collect();
    let neighborhood: BTreeSet<usize> = separator_active
        .iter()
        .flat_map(|&v| g.neighbors(v).iter().copied())
        .filter(|u| !sep.contains(u))
        .collect();
    neighborhood.len()
}

/// Greedily selects separator vertices to keep active under a cut budget.
///
/// Walks the separator in ascending degree order (vertex id on ties),
/// maintaining the accumulated outside neighborhood; a vertex is accepted iff
/// adding its outside neighbors keeps the accumulated set within `budget`.
/// Maintaining the union, rather than charging each vertex its own
/// neighborhood, keeps vertices whose neighborhoods overlap essentially free.
/// Returns the accepted vertices (ascending id) and the final neighborhood.
pub fn sparsify_separator(
    g: &Graph,
    separator: &[usize],
    budget: usize,
) -> (Vec<usize>, BTreeSet<usize>) {
    let sep: BTreeSet<usize> = separator.iter().copied().collect();
    let mut kept = Vec::new();
    let mut neighborhood: BTreeSet<usize> = BTreeSet::new();

    for &s in &order_vertices(g, separator) {
        let candidate: BTreeSet<usize> = neighborhood
            .iter()
            .copied()
            .chain(g.neighbors(s).iter().copied().filter(|u| !sep.contains(u)))
            .collect();
        if candidate.len() <= budget {
            neighborhood = candidate;
            kept.push(s);
        }
    }
    kept.sort_unstable();
    (kept, neighborhood)
}

/// Budget-constrained separator selection without neighborhood sharing: each
/// accepted vertex is charged its full outside neighborhood. Models the cost
/// of keeping a separator vertex active when its constraints are *not*
/// deferred behind the part blocks. Returns the kept vertices (ascending id)
/// and the total charge.
pub fn sparsify_separator_per_vertex(
    g: &Graph,
    separator: &[usize],
    budget: usize,
) -> (Vec<usize>, usize) {
    let sep: BTreeSet<usize> = separator.iter().copied().collect();
    let mut kept = Vec::new();
    let mut total = 0usize;

    for &s in &order_vertices(g, separator) {
        let outside = g.neighbors(s).iter().filter(|u| !sep.contains(u)).count();
        if total + outside <= budget {
            total += outside;
            kept.push(s);
        }
    }
    kept.sort_unstable();
    (kept, total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_inactive() -> BTreeSet<usize> {
        BTreeSet::new()
    }

    #[test]
    fn ordering_by_degree_then_id() {
        let p5 = Graph::path(5);
        assert_eq!(order_vertices(&p5, &[0, 1, 2]), vec![0, 1, 2]);
        assert_eq!(order_vertices(&Graph::complete(4), &[2, 0, 3, 1]), vec![0, 1, 2, 3]);
        let star = Graph::star(5);
        assert_eq!(order_vertices(&star, &[0, 1, 2, 3, 4]), vec![1, 2, 3, 4, 0]);
    }

    #[test]
    fn restricted_controls_chain_on_p5() {
        let g = Graph::path(5);
        let controls = restricted_controls(&[0, 1, 2, 3, 4], &g);
        assert_eq!(
            controls,
            vec![vec![], vec![0], vec![1], vec![2], vec![3]]
        );
    }

    #[test]
    fn first_position_has_no_controls() {
        let g = Graph::complete(5);
        for first in 0..5 {
            let mut order: Vec<usize> = (0..5).collect();
            order.swap(0, first);
            assert!(restricted_controls(&order, &g)[0].is_empty());
        }
    }

    #[test]
    fn degree_ordering_shrinks_total_controls_on_p5() {
        // Degree order on the 5-path is [0, 4, 1, 2, 3]; by hand the
        // restricted sets are ∅, ∅, {0}, {1}, {2, 4}: 4 control wires
        // against 8 for full neighborhoods.
        let g = Graph::path(5);
        let order = order_vertices(&g, &[0, 1, 2, 3, 4]);
        assert_eq!(order, vec![0, 4, 1, 2, 3]);
        let restricted: usize = restricted_controls(&order, &g).iter().map(Vec::len).sum();
        let full: usize = (0..5).map(|v| g.degree(v)).sum();
        assert_eq!(restricted, 4);
        assert_eq!(full, 8);
        assert!(restricted < full);
    }

    #[test]
    fn deferred_schedule_on_p5_matches_hand_layout() {
        let g = Graph::path(5);
        let parts = vec![vec![0, 1], vec![3, 4]];
        let schedule = build_schedule(&g, &parts, &[2], &no_inactive(), 1).unwrap();

        assert_eq!(schedule.qubits, vec![0, 1, 4, 3, 2]);
        for slot in &schedule.slots[..4] {
            // No prefix slot checks a wire from the other part.
            for &c in &slot.controls {
                let same_part = (slot.vertex <= 1 && c <= 1) || (slot.vertex >= 3 && c >= 3);
                assert!(same_part, "slot {} control {}", slot.vertex, c);
            }
        }
        let last = schedule.slots.last().unwrap();
        assert_eq!(last.vertex, 2);
        assert_eq!(last.controls, vec![1, 3]);
        assert_eq!(schedule.separator_segment, Segment { start: 4, end: 5 });
        assert_eq!(schedule.param_count(), 6);
        assert_eq!(schedule.cut_wires(), BTreeSet::from([1, 3]));
    }

    #[test]
    fn single_part_schedule_is_plain_restricted() {
        let g = Graph::path(5);
        let schedule =
            build_schedule(&g, &[vec![0, 1, 2, 3, 4]], &[], &no_inactive(), 1).unwrap();
        assert_eq!(schedule.part_segments.len(), 1);
        assert!(schedule.separator_segment.is_empty());
        assert!(schedule.cut_wires().is_empty());
        assert_eq!(schedule.active_slot_count(), 5);
    }

    #[test]
    fn empty_separator_leaves_parts_disconnected() {
        let g = Graph::path(5);
        let schedule =
            build_schedule(&g, &[vec![0, 1], vec![3, 4]], &[], &no_inactive(), 1).unwrap();
        assert_eq!(schedule.num_wires(), 4);
        for slot in &schedule.slots {
            for &c in &slot.controls {
                assert_ne!(c, 2);
            }
        }
    }

    #[test]
    fn inactive_separator_vertices_keep_wires_but_no_parameters() {
        let g = Graph::path(5);
        let inactive = BTreeSet::from([2]);
        let schedule =
            build_schedule(&g, &[vec![0, 1], vec![3, 4]], &[2], &inactive, 1).unwrap();
        assert_eq!(schedule.num_wires(), 5);
        assert_eq!(schedule.active_slot_count(), 4);
        assert_eq!(schedule.param_count(), 5);
        assert!(!schedule.slots[4].active);
        assert!(schedule.cut_wires().is_empty());
    }

    #[test]
    fn controls_skip_deactivated_wires() {
        // 1 and 3 inactive: the separator mixer on 2 has nothing to check,
        // since those wires can never leave |0⟩.
        let g = Graph::path(5);
        let inactive = BTreeSet::from([1, 3]);
        let schedule =
            build_schedule(&g, &[vec![0, 1], vec![3, 4]], &[2], &inactive, 1).unwrap();
        let last = schedule.slots.last().unwrap();
        assert_eq!(last.vertex, 2);
        assert!(last.controls.is_empty());
        assert!(last.later_controls.is_empty());
        assert!(schedule.cut_wires().is_empty());
    }

    #[test]
    fn full_mode_keeps_all_scheduled_neighbors() {
        let g = Graph::path(5);
        let schedule = build_schedule_with_controls(
            &g,
            &[vec![0, 1], vec![3, 4]],
            &[2],
            &no_inactive(),
            1,
            ControlMode::Full,
        )
        .unwrap();
        for slot in &schedule.slots {
            let mut expected: Vec<usize> = g.neighbors(slot.vertex).to_vec();
            expected.sort_unstable();
            assert_eq!(slot.controls, expected, "vertex {}", slot.vertex);
        }
    }

    #[test]
    fn overlapping_sets_are_rejected() {
        let g = Graph::path(5);
        assert!(matches!(
            build_schedule(&g, &[vec![0, 1], vec![1, 3]], &[2], &no_inactive(), 1),
            Err(AnsatzError::DuplicateVertex(1))
        ));
        assert!(matches!(
            build_schedule(&g, &[vec![0, 1, 2]], &[2], &no_inactive(), 1),
            Err(AnsatzError::DuplicateVertex(2))
        ));
    }

    #[test]
    fn connected_parts_are_rejected() {
        let g = Graph::path(5);
        assert!(matches!(
            build_schedule(&g, &[vec![0, 1, 2], vec![3, 4]], &[], &no_inactive(), 1),
            Err(AnsatzError::PartsNotDisconnected(2, 3))
        ));
    }

    #[test]
    fn cut_count_examples() {
        let g = Graph::path(5);
        assert_eq!(cut_count(&g, &[2], &[2]), 2);
        assert_eq!(cut_count(&g, &[], &[2]), 0);
        // Two separator vertices with identical outside neighborhoods cost
        // the same as one.
        let c4 = Graph::cycle(4);
        assert_eq!(cut_count(&c4, &[0, 2], &[0, 2]), 2);
        assert_eq!(cut_count(&c4, &[0], &[0, 2]), 2);
    }

    #[test]
    fn sparsify_on_p5() {
        let g = Graph::path(5);
        let (kept, nbhd) = sparsify_separator(&g, &[2], 2);
        assert_eq!(kept, vec![2]);
        assert_eq!(nbhd, BTreeSet::from([1, 3]));
    }

    #[test]
    fn sparsify_budget_zero_keeps_only_interior_vertices() {
        let g = Graph::path(5);
        let (kept, nbhd) = sparsify_separator(&g, &[2], 0);
        assert!(kept.is_empty());
        assert!(nbhd.is_empty());
        // A separator vertex whose whole neighborhood is separator-internal
        // survives budget zero.
        let p3 = Graph::path(3);
        let (kept, _) = sparsify_separator(&p3, &[0, 1, 2], 0);
        assert_eq!(kept, vec![0, 1, 2]);
    }

    #[test]
    fn sparsify_large_budget_keeps_everything() {
        for seed in 0..5 {
            let g = crate::graph::generate::watts_strogatz(14, 4, 0.4, seed).unwrap();
            let p = crate::partition::edge_partition(&g, 3, 0.05, seed).unwrap();
            let (kept, nbhd) = sparsify_separator(&g, &p.separator, g.n());
            assert_eq!(kept, p.separator);
            assert!(nbhd.len() <= g.n());
        }
    }

    #[test]
    fn sparsify_overlapping_neighborhoods_share_budget() {
        // Vertices 0 and 2 of the 4-cycle both neighbor exactly {1, 3}; with
        // budget 2 the union keeps both where per-vertex charging keeps one.
        let c4 = Graph::cycle(4);
        let (kept, nbhd) = sparsify_separator(&c4, &[0, 2], 2);
        assert_eq!(kept, vec![0, 2]);
        assert_eq!(nbhd.len(), 2);
        let (kept_pv, total) = sparsify_separator_per_vertex(&c4, &[0, 2], 2);
        assert_eq!(kept_pv, vec![0]);
        assert_eq!(total, 2);
    }

    #[test]
    fn interleaved_schedule_has_single_segment() {
        let g = Graph::path(5);
        let all: Vec<usize> = (0..5).collect();
        let schedule = build_interleaved_schedule(&g, &all, &no_inactive(), 1).unwrap();
        assert_eq!(schedule.qubits, vec![0, 4, 1, 2, 3]);
        assert!(schedule.separator_segment.is_empty());
        assert!(schedule.cut_wires().is_empty());
    }

    #[test]
    fn prefix_slots_never_cross_parts_on_random_partitions() {
        for seed in 0..10 {
            let g = crate::graph::generate::watts_strogatz(16, 4, 0.5, seed).unwrap();
            let p = crate::partition::edge_partition(&g, 3, 0.05, seed).unwrap();
            let schedule =
                build_schedule(&g, &p.parts, &p.separator, &no_inactive(), 1).unwrap();
            let mut part_of: BTreeMap<usize, usize> = BTreeMap::new();
            for (i, seg) in schedule.part_segments.iter().enumerate() {
                for w in seg.start..seg.end {
                    part_of.insert(schedule.qubits[w], i);
                }
            }
            for seg in &schedule.part_segments {
                for w in seg.start..seg.end {
                    let slot = &schedule.slots[w];
                    for &c in &slot.controls {
                        assert_eq!(
                            part_of.get(&c),
                            part_of.get(&slot.vertex),
                            "seed {seed}: control {c} of {} crosses parts",
                            slot.vertex
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn parameter_accounting_with_layers() {
        let g = Graph::path(5);
        let schedule =
            build_schedule(&g, &[vec![0, 1], vec![3, 4]], &[2], &no_inactive(), 3).unwrap();
        assert_eq!(schedule.param_count(), 3 * 6);
        // Later layers use the wider control sets; the crossing wires on the
        // 5-path stay the separator's two part neighbors.
        assert_eq!(schedule.cut_wires(), BTreeSet::from([1, 3]));
    }
}
