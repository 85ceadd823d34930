//! Dual-index edge store.
//!
//! All active edges live once in `edges`, sorted by `(time, source, target,
//! input position)`. Two offset structures sit on top of that array:
//!
//! - the timestamp-grouped view: `ts_group_offsets` marks where each distinct
//!   timestamp starts in `edges`;
//! - the node-and-timestamp-grouped view: `node_group_offsets` gives each
//!   node's region in `node_refs` (a permutation of edge indices ordered by
//!   node, then time), and `node_ts_group_*` mark the distinct-timestamp
//!   sub-groups inside each region.
//!
//! Node ids are densified at build time; dense ids follow the ascending order
//! of the external ids so a rebuild of the same edge set is bit-identical.

use std::ops::Range;
use std::sync::OnceLock;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::primitives::{exclusive_scan, radix_sort_high, radix_sort_pairs};
use crate::{NodeId, Timestamp, NO_TIME};

/// One timestamped interaction as read from input, with external node ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TemporalEdge {
    pub source: u64,
    pub target: u64,
    pub time: Timestamp,
}

impl TemporalEdge {
    pub fn new(source: u64, target: u64, time: Timestamp) -> Self {
        Self { source, target, time }
    }
}

/// A stored edge with dense node ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    pub time: Timestamp,
}

/// Which endpoint keys the node-grouped view.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DirectionMode {
    /// Regions keyed by source; supports forward walks.
    DirectedForward,
    /// Regions keyed by target; supports backward walks.
    DirectedBackward,
    /// Each edge appears in both endpoints' regions.
    Undirected,
}

impl DirectionMode {
    pub fn supports(self, direction: Direction) -> bool {
        matches!(
            (self, direction),
            (DirectionMode::Undirected, _)
                | (DirectionMode::DirectedForward, Direction::Forward)
                | (DirectionMode::DirectedBackward, Direction::Backward)
        )
    }

    pub fn is_undirected(self) -> bool {
        self == DirectionMode::Undirected
    }
}

/// Walk direction in time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EdgeStoreError {
    #[error("timestamp group {index} out of range (store has {count} groups)")]
    GroupOutOfRange { index: usize, count: usize },
    #[error("{0} edges exceed the 32-bit index space")]
    TooManyEdges(usize),
    #[error("edge at input position {0} uses the reserved timestamp u64::MAX")]
    ReservedTimestamp(usize),
}

/// Half-open range into the node-grouped reference array.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NeighborRange {
    pub start: usize,
    pub end: usize,
    /// Distinct-timestamp groups covered by the range.
    pub group_count: usize,
}

impl NeighborRange {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn as_range(&self) -> Range<usize> {
        self.start..self.end
    }
}

/// A node's timestamp sub-groups: absolute start positions in `node_refs`
/// and the timestamp of each group. Cached dispatch tiers build one of these
/// over task-local copies; direct tiers borrow the store's arrays.
#[derive(Clone, Copy, Debug)]
pub struct TsGroupView<'a> {
    pub region: (usize, usize),
    pub starts: &'a [u32],
    pub times: &'a [Timestamp],
}

impl TsGroupView<'_> {
    /// Timestamp of the entry at absolute position `pos` of the region.
    #[inline]
    pub fn time_at(&self, pos: usize) -> Timestamp {
        self.times[self.starts.partition_point(|&s| s as usize <= pos) - 1]
    }

    /// Edges strictly after (forward) or strictly before (backward) `bound`.
    /// `None` is the open bound of a walk that has not taken a hop yet.
    #[inline]
    pub fn neighborhood(&self, bound: Option<Timestamp>, direction: Direction) -> NeighborRange {
        let (a, b) = self.region;
        let g = self.times.len();
        let Some(t) = bound else {
            return NeighborRange {
                start: a,
                end: b,
                group_count: g,
            };
        };
        match direction {
            Direction::Forward => {
                let i = self.times.partition_point(|&x| x <= t);
                let start = if i < g { self.starts[i] as usize } else { b };
                NeighborRange {
                    start,
                    end: b,
                    group_count: g - i,
                }
            }
            Direction::Backward => {
                let i = self.times.partition_point(|&x| x < t);
                let end = if i < g { self.starts[i] as usize } else { b };
                NeighborRange {
                    start: a,
                    end,
                    group_count: i,
                }
            }
        }
    }
}

/// Distinct neighbours of a node with the time span of the connecting edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdjEntry {
    pub node: NodeId,
    pub min_time: Timestamp,
    pub max_time: Timestamp,
}

/// Static adjacency summary, built on first use (second-order walks only).
#[derive(Debug, Default)]
pub struct Adjacency {
    offsets: Vec<u32>,
    entries: Vec<AdjEntry>,
}

impl Adjacency {
    pub fn lookup(&self, from: NodeId, to: NodeId) -> Option<AdjEntry> {
        let v = from as usize;
        if v + 1 >= self.offsets.len() {
            return None;
        }
        let row = &self.entries[self.offsets[v] as usize..self.offsets[v + 1] as usize];
        row.binary_search_by_key(&to, |e| e.node).ok().map(|i| row[i])
    }

    fn heap_bytes(&self) -> usize {
        self.offsets.capacity() * 4 + self.entries.capacity() * std::mem::size_of::<AdjEntry>()
    }
}

/// Immutable snapshot of the active edge set.
#[derive(Debug)]
pub struct EdgeStore {
    mode: DirectionMode,
    node_ids: Vec<u64>,
    edges: Vec<Edge>,
    ts_group_offsets: Vec<u32>,
    node_group_offsets: Vec<u32>,
    node_refs: Vec<u32>,
    // Other endpoint of each ref, so a hop does not touch `edges`.
    node_neighbors: Vec<NodeId>,
    node_ts_group_index: Vec<u32>,
    node_ts_group_offsets: Vec<u32>,
    node_ts_group_times: Vec<Timestamp>,
    // Per-region cumulative exponential weights, normalised to the region's
    // latest (forward) or earliest (backward) edge so they never overflow.
    forward_weights: Vec<f64>,
    backward_weights: Vec<f64>,
    // Same, per global timestamp group, for start-edge selection.
    forward_group_weights: Vec<f64>,
    backward_group_weights: Vec<f64>,
    adjacency: OnceLock<Adjacency>,
}

impl EdgeStore {
    pub fn empty(mode: DirectionMode) -> Self {
        Self::build(&[], mode).expect("empty build cannot fail")
    }

    /// Build both views over `input`. Construction is a radix sort by time
    /// for the global order, one counting sort for the node view, and linear
    /// scans for group boundaries and weights.
    pub fn build(input: &[TemporalEdge], mode: DirectionMode) -> Result<Self, EdgeStoreError> {
        let m = input.len();
        if m > (u32::MAX / 2) as usize {
            return Err(EdgeStoreError::TooManyEdges(m));
        }
        // One pass for validation, id range and time range.
        let mut max_id = 0;
        let (mut t_min, mut t_max) = (Timestamp::MAX, 0);
        for (i, e) in input.iter().enumerate() {
            if e.time == NO_TIME {
                return Err(EdgeStoreError::ReservedTimestamp(i));
            }
            max_id = max_id.max(e.source).max(e.target);
            t_min = t_min.min(e.time);
            t_max = t_max.max(e.time);
        }

        let (node_ids, ids) = densify(input, max_id);
        let n = node_ids.len();

        // Global order: (time, source, target, input position). The time
        // sort is stable, so only equal-time runs need a second look.
        let mut edges: Vec<Edge> = if m > 0 && t_max - t_min <= u64::from(u32::MAX) {
            // Offset time and input position packed into one word.
            let mut packed: Vec<u64> = input
                .iter()
                .enumerate()
                .map(|(p, e)| ((e.time - t_min) << 32) | p as u64)
                .collect();
            radix_sort_high(&mut packed, 32);
            packed
                .iter()
                .map(|&x| {
                    let (source, target) = ids.pair(input, (x & 0xffff_ffff) as usize);
                    Edge {
                        source,
                        target,
                        time: (x >> 32) + t_min,
                    }
                })
                .collect()
        } else {
            let mut keys: Vec<u64> = input.iter().map(|e| e.time).collect();
            let mut perm: Vec<u32> = (0..m as u32).collect();
            radix_sort_pairs(&mut keys, &mut perm);
            perm.iter()
                .zip(&keys)
                .map(|(&p, &time)| {
                    let (source, target) = ids.pair(input, p as usize);
                    Edge { source, target, time }
                })
                .collect()
        };
        drop(ids);

        let mut ts_group_offsets = vec![0u32];
        let mut start = 0;
        for j in 1..=m {
            if j == m || edges[j].time != edges[start].time {
                if j - start > 1 {
                    edges[start..j].sort_by_key(|e| (e.source, e.target));
                }
                ts_group_offsets.push(j as u32);
                start = j;
            }
        }

        // Node view. Times ride along with the refs so the scans below stay
        // sequential.
        let (node_group_offsets, node_refs, node_neighbors, ref_times) = node_view(n, &edges, mode);

        let mut node_ts_group_index = Vec::with_capacity(n + 1);
        let mut node_ts_group_offsets = Vec::new();
        let mut node_ts_group_times = Vec::new();
        node_ts_group_index.push(0u32);
        for v in 0..n {
            let (a, b) = (node_group_offsets[v] as usize, node_group_offsets[v + 1] as usize);
            let mut prev = None;
            for (k, &t) in ref_times[a..b].iter().enumerate() {
                if prev != Some(t) {
                    node_ts_group_offsets.push((a + k) as u32);
                    node_ts_group_times.push(t);
                    prev = Some(t);
                }
            }
            node_ts_group_index.push(node_ts_group_offsets.len() as u32);
        }

        let wants_forward = mode != DirectionMode::DirectedBackward;
        let wants_backward = mode != DirectionMode::DirectedForward;
        let region_weights = |forward: bool| {
            let mut out = vec![0.0f64; node_refs.len()];
            for v in 0..n {
                let (a, b) = (node_group_offsets[v] as usize, node_group_offsets[v + 1] as usize);
                if a == b {
                    continue;
                }
                let (t_first, t_last) = (ref_times[a], ref_times[b - 1]);
                let mut acc = 0.0;
                for (slot, &t) in out[a..b].iter_mut().zip(&ref_times[a..b]) {
                    acc += exp_gap(forward, t, t_first, t_last);
                    *slot = acc;
                }
            }
            out
        };
        let group_weights = |forward: bool| {
            let g = ts_group_offsets.len().saturating_sub(1);
            let mut out = Vec::with_capacity(g);
            if g == 0 {
                return out;
            }
            let t_first = edges[0].time;
            let t_last = edges[m - 1].time;
            let mut acc = 0.0;
            for &off in &ts_group_offsets[..g] {
                acc += exp_gap(forward, edges[off as usize].time, t_first, t_last);
                out.push(acc);
            }
            out
        };
        let forward_weights = if wants_forward {
            region_weights(true)
        } else {
            Vec::new()
        };
        let backward_weights = if wants_backward {
            region_weights(false)
        } else {
            Vec::new()
        };
        let forward_group_weights = if wants_forward { group_weights(true) } else { Vec::new() };
        let backward_group_weights = if wants_backward {
            group_weights(false)
        } else {
            Vec::new()
        };

        Ok(Self {
            mode,
            node_ids,
            edges,
            ts_group_offsets,
            node_group_offsets,
            node_refs,
            node_neighbors,
            node_ts_group_index,
            node_ts_group_offsets,
            node_ts_group_times,
            forward_weights,
            backward_weights,
            forward_group_weights,
            backward_group_weights,
            adjacency: OnceLock::new(),
        })
    }

    pub fn mode(&self) -> DirectionMode {
        self.mode
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn ts_group_count(&self) -> usize {
        self.ts_group_offsets.len() - 1
    }

    /// The shared, time-sorted edge array.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn ts_group_offsets(&self) -> &[u32] {
        &self.ts_group_offsets
    }

    pub fn node_group_offsets(&self) -> &[u32] {
        &self.node_group_offsets
    }

    /// Edge indices ordered by node, then time.
    pub fn node_refs(&self) -> &[u32] {
        &self.node_refs
    }

    pub fn earliest_time(&self) -> Option<Timestamp> {
        self.edges.first().map(|e| e.time)
    }

    pub fn latest_time(&self) -> Option<Timestamp> {
        self.edges.last().map(|e| e.time)
    }

    pub fn external_id(&self, node: NodeId) -> u64 {
        self.node_ids[node as usize]
    }

    pub fn internal_id(&self, external: u64) -> Option<NodeId> {
        self.node_ids.binary_search(&external).ok().map(|i| i as NodeId)
    }

    /// Edge translated back to external ids.
    pub fn external_edge(&self, index: usize) -> TemporalEdge {
        let e = self.edges[index];
        TemporalEdge::new(self.external_id(e.source), self.external_id(e.target), e.time)
    }

    /// Range of `v`'s entries in [`node_refs`](Self::node_refs); empty for
    /// unknown nodes.
    pub fn node_region(&self, v: NodeId) -> Range<usize> {
        let v = v as usize;
        if v >= self.node_count() {
            return 0..0;
        }
        self.node_group_offsets[v] as usize..self.node_group_offsets[v + 1] as usize
    }

    pub fn node_ts_groups(&self, v: NodeId) -> TsGroupView<'_> {
        let vi = v as usize;
        if vi >= self.node_count() {
            return TsGroupView {
                region: (0, 0),
                starts: &[],
                times: &[],
            };
        }
        let region = self.node_region(v);
        let (g0, g1) = (
            self.node_ts_group_index[vi] as usize,
            self.node_ts_group_index[vi + 1] as usize,
        );
        TsGroupView {
            region: (region.start, region.end),
            starts: &self.node_ts_group_offsets[g0..g1],
            times: &self.node_ts_group_times[g0..g1],
        }
    }

    #[inline]
    pub fn prefetch_edge(&self, j: usize) {
        if let Some(e) = self.edges.get(j) {
            prefetch(e);
        }
    }

    /// Cache hint for the bounds of timestamp group `group`.
    #[inline]
    pub fn prefetch_group(&self, group: usize) {
        if let Some(o) = self.ts_group_offsets.get(group) {
            prefetch(o);
        }
    }

    /// Cache hint for `v`'s offsets, ahead of [`node_ts_groups`](Self::node_ts_groups).
    #[inline]
    pub fn prefetch_node(&self, v: NodeId) {
        let vi = v as usize;
        if vi < self.node_count() {
            prefetch(&self.node_group_offsets[vi]);
            prefetch(&self.node_ts_group_index[vi]);
        }
    }

    /// Cache hint for the start of `v`'s region and timestamp groups. Reads
    /// the offsets, so issue [`prefetch_node`](Self::prefetch_node) earlier.
    #[inline]
    pub fn prefetch_region(&self, v: NodeId, direction: Direction) {
        let vi = v as usize;
        if vi >= self.node_count() {
            return;
        }
        let (a, b) = (
            self.node_group_offsets[vi] as usize,
            self.node_group_offsets[vi + 1] as usize,
        );
        if a == b {
            return;
        }
        // Both ends: forward draws favour the tail, backward ones the head.
        let (g0, g1) = (
            self.node_ts_group_index[vi] as usize,
            self.node_ts_group_index[vi + 1] as usize,
        );
        for (g, k) in [(g0, a), (g1 - 1, b - 1)] {
            prefetch(&self.node_ts_group_times[g]);
            prefetch(&self.node_ts_group_offsets[g]);
            prefetch(&self.node_refs[k]);
            prefetch(&self.node_neighbors[k]);
            if let Some(w) = self.region_weights(direction).get(k) {
                prefetch(w);
            }
        }
    }

    /// Edges at `v` strictly after `t` (forward) or strictly before it
    /// (backward). O(log G) in the node's distinct-timestamp count.
    pub fn temporal_neighborhood(&self, v: NodeId, t: Timestamp, direction: Direction) -> NeighborRange {
        self.node_ts_groups(v).neighborhood(Some(t), direction)
    }

    pub fn timestamp_group_count(&self, v: NodeId) -> usize {
        let vi = v as usize;
        if vi >= self.node_count() {
            return 0;
        }
        (self.node_ts_group_index[vi + 1] - self.node_ts_group_index[vi]) as usize
    }

    /// Slice of the global edge array holding timestamp group `group`.
    pub fn edge_slice_for_ts_group(&self, group: usize) -> Result<Range<usize>, EdgeStoreError> {
        let count = self.ts_group_count();
        if group >= count {
            return Err(EdgeStoreError::GroupOutOfRange { index: group, count });
        }
        Ok(self.ts_group_offsets[group] as usize..self.ts_group_offsets[group + 1] as usize)
    }

    /// First timestamp group whose time is at least `t`.
    pub fn first_group_at_or_after(&self, t: Timestamp) -> usize {
        let g = self.ts_group_count();
        let offs = &self.ts_group_offsets[..g];
        offs.partition_point(|&o| self.edges[o as usize].time < t)
    }

    /// Edge index stored at position `pos` of the node-grouped view.
    #[inline]
    pub fn edge_at(&self, pos: usize) -> (usize, Edge) {
        let j = self.node_refs[pos] as usize;
        (j, self.edges[j])
    }

    /// Edge index and far endpoint at position `pos` of the node-grouped
    /// view, without reading the edge itself.
    #[inline]
    pub fn ref_at(&self, pos: usize) -> (u32, NodeId) {
        (self.node_refs[pos], self.node_neighbors[pos])
    }

    /// The endpoint of `edge` that is not the region owner `v`.
    #[inline]
    pub fn other_endpoint(&self, v: NodeId, edge: &Edge) -> NodeId {
        match self.mode {
            DirectionMode::DirectedForward => edge.target,
            DirectionMode::DirectedBackward => edge.source,
            DirectionMode::Undirected => {
                if edge.source == v {
                    edge.target
                } else {
                    edge.source
                }
            }
        }
    }

    /// Cumulative per-region weights for a walk direction. Empty when the
    /// store mode does not support that direction.
    pub fn region_weights(&self, direction: Direction) -> &[f64] {
        match direction {
            Direction::Forward => &self.forward_weights,
            Direction::Backward => &self.backward_weights,
        }
    }

    pub fn group_weights(&self, direction: Direction) -> &[f64] {
        match direction {
            Direction::Forward => &self.forward_group_weights,
            Direction::Backward => &self.backward_group_weights,
        }
    }

    pub fn adjacency(&self) -> &Adjacency {
        self.adjacency.get_or_init(|| self.build_adjacency())
    }

    fn build_adjacency(&self) -> Adjacency {
        let n = self.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut entries: Vec<AdjEntry> = Vec::new();
        let mut scratch: Vec<(NodeId, Timestamp)> = Vec::new();
        offsets.push(0u32);
        for v in 0..n as NodeId {
            scratch.clear();
            for pos in self.node_region(v) {
                let (_, e) = self.edge_at(pos);
                scratch.push((self.other_endpoint(v, &e), e.time));
            }
            scratch.sort_unstable();
            let row_start = entries.len();
            for &(w, t) in &scratch {
                if entries.len() > row_start && entries[entries.len() - 1].node == w {
                    entries.last_mut().unwrap().max_time = t;
                } else {
                    entries.push(AdjEntry {
                        node: w,
                        min_time: t,
                        max_time: t,
                    });
                }
            }
            offsets.push(entries.len() as u32);
        }
        Adjacency { offsets, entries }
    }

    /// Heap bytes owned by this snapshot.
    pub fn heap_bytes(&self) -> usize {
        use std::mem::size_of;
        self.node_ids.capacity() * 8
            + self.edges.capacity() * size_of::<Edge>()
            + (self.ts_group_offsets.capacity()
                + self.node_group_offsets.capacity()
                + self.node_refs.capacity()
                + self.node_neighbors.capacity()
                + self.node_ts_group_index.capacity()
                + self.node_ts_group_offsets.capacity())
                * 4
            + self.node_ts_group_times.capacity() * 8
            + (self.forward_weights.capacity()
                + self.backward_weights.capacity()
                + self.forward_group_weights.capacity()
                + self.backward_group_weights.capacity())
                * 8
            + self.adjacency.get().map_or(0, Adjacency::heap_bytes)
    }
}

#[inline(always)]
fn prefetch<T>(r: &T) {
    #[cfg(target_arch = "x86_64")]
    unsafe {
        use std::arch::x86_64::{_mm_prefetch, _MM_HINT_T0};
        _mm_prefetch::<_MM_HINT_T0>((r as *const T).cast());
    }
    #[cfg(not(target_arch = "x86_64"))]
    let _ = r;
}

#[inline]
fn exp_gap(forward: bool, t: Timestamp, t_first: Timestamp, t_last: Timestamp) -> f64 {
    let gap = if forward { t_last - t } else { t - t_first };
    // exp(-gap) is exactly 0.0 in f64 from here on.
    if gap > 746 {
        0.0
    } else {
        (-(gap as f64)).exp()
    }
}

/// Counting sort of edge indices by owning node (stable, so each region
/// stays in time order). Returns region offsets, the refs, the far endpoint
/// of each ref and the ref times.
#[allow(clippy::type_complexity)]
fn node_view(n: usize, edges: &[Edge], mode: DirectionMode) -> (Vec<u32>, Vec<u32>, Vec<NodeId>, Vec<Timestamp>) {
    // (owner, other) pairs per edge.
    let owners = |e: &Edge| match mode {
        DirectionMode::DirectedForward => [Some((e.source, e.target)), None],
        DirectionMode::DirectedBackward => [Some((e.target, e.source)), None],
        DirectionMode::Undirected => [Some((e.source, e.target)), Some((e.target, e.source))],
    };
    let mut counts = vec![0u32; n];
    for e in edges {
        for (v, _) in owners(e).into_iter().flatten() {
            counts[v as usize] += 1;
        }
    }
    let offsets = exclusive_scan(&counts);
    drop(counts);
    let total = offsets[n] as usize;
    let mut cursor: Vec<u32> = offsets[..n].to_vec();
    let mut refs = vec![0u32; total];
    let mut others = vec![0 as NodeId; total];
    let mut times = vec![0 as Timestamp; total];
    for (j, e) in edges.iter().enumerate() {
        for (v, w) in owners(e).into_iter().flatten() {
            let slot = &mut cursor[v as usize];
            refs[*slot as usize] = j as u32;
            others[*slot as usize] = w;
            times[*slot as usize] = e.time;
            *slot += 1;
        }
    }
    (offsets, refs, others, times)
}

/// External to dense id translation produced by [`densify`].
enum DenseIds {
    /// Indexed by external id.
    Table(Vec<NodeId>),
    /// `[source, target]` per input edge.
    PerEdge(Vec<NodeId>),
}

impl DenseIds {
    #[inline]
    fn pair(&self, input: &[TemporalEdge], p: usize) -> (NodeId, NodeId) {
        match self {
            DenseIds::Table(t) => (t[input[p].source as usize], t[input[p].target as usize]),
            DenseIds::PerEdge(ids) => (ids[2 * p], ids[2 * p + 1]),
        }
    }
}

/// Map external ids to dense ids in ascending external order. Returns the
/// id table and the translation for the input's endpoints.
fn densify(input: &[TemporalEdge], max_id: u64) -> (Vec<u64>, DenseIds) {
    if max_id < 4 * input.len() as u64 + 1024 {
        // Compact id space: a presence table doubles as the id map.
        let mut table = vec![0 as NodeId; max_id as usize + 1];
        for e in input {
            table[e.source as usize] = 1;
            table[e.target as usize] = 1;
        }
        let mut node_ids = Vec::new();
        for (id, slot) in table.iter_mut().enumerate() {
            if *slot != 0 {
                *slot = node_ids.len() as NodeId;
                node_ids.push(id as u64);
            }
        }
        return (node_ids, DenseIds::Table(table));
    }

    let mut first_seen: FxHashMap<u64, NodeId> = FxHashMap::default();
    let mut node_ids = Vec::new();
    let mut endpoints: Vec<NodeId> = Vec::with_capacity(input.len() * 2);
    for e in input {
        for id in [e.source, e.target] {
            let k = *first_seen.entry(id).or_insert_with(|| {
                node_ids.push(id);
                (node_ids.len() - 1) as NodeId
            });
            endpoints.push(k);
        }
    }
    drop(first_seen);
    let mut order: Vec<NodeId> = (0..node_ids.len() as NodeId).collect();
    order.sort_unstable_by_key(|&k| node_ids[k as usize]);
    let mut rank = vec![0 as NodeId; order.len()];
    for (r, &k) in order.iter().enumerate() {
        rank[k as usize] = r as NodeId;
    }
    for x in &mut endpoints {
        *x = rank[*x as usize];
    }
    node_ids.sort_unstable();
    (node_ids, DenseIds::PerEdge(endpoints))
}
