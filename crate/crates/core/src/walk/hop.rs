use crate::edge_store::{Direction, EdgeStore, NeighborRange, TsGroupView};
use crate::rng::CounterRng;
use crate::samplers::{node2vec_accept, pick_index, pick_weighted_range, AdjacencyScope, BiasKind, Node2VecParams};
use crate::{NodeId, Timestamp};

use super::WalkConfig;

/// Per-walk cursor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WalkState {
    pub current_node: NodeId,
    /// `None` before the first hop of a per-node walk: every edge qualifies.
    pub current_time: Option<Timestamp>,
    pub prev_node: Option<NodeId>,
    /// Time the walk arrived at `prev_node` (`None` if it started there).
    pub prev_time: Option<Timestamp>,
    pub alive: bool,
    pub hops_taken: u32,
}

impl WalkState {
    pub fn at(node: NodeId) -> Self {
        Self {
            current_node: node,
            current_time: None,
            prev_node: None,
            prev_time: None,
            alive: true,
            hops_taken: 0,
        }
    }

    /// Record a hop outcome; an empty neighbourhood kills the walk.
    #[inline]
    pub fn advance(&mut self, hop: Option<Hop>, walk_length: u32) {
        match hop {
            Some(h) => {
                self.prev_node = Some(self.current_node);
                self.prev_time = self.current_time;
                self.current_node = h.node;
                self.current_time = Some(h.time);
                self.hops_taken += 1;
                self.alive = self.hops_taken < walk_length;
            }
            None => self.alive = false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hop {
    /// Index into the store's time-sorted edge array.
    pub edge: u32,
    pub node: NodeId,
    pub time: Timestamp,
}

/// Draws one hop for one walk. Every draw is keyed by
/// `(walk, hops_taken, ordinal)`: ordinal 0 is the plain proposal; with a
/// second-order bias, attempt `a` uses ordinals `2a` (proposal) and `2a + 1`
/// (acceptance).
#[derive(Clone, Copy)]
pub(crate) struct HopSampler<'a> {
    pub store: &'a EdgeStore,
    bias: BiasKind,
    direction: Direction,
    node2vec: Option<Node2VecParams>,
    rng: CounterRng,
    weights: &'a [f64],
}

impl<'a> HopSampler<'a> {
    pub fn new(store: &'a EdgeStore, config: &WalkConfig) -> Self {
        if config.node2vec.is_some() {
            // Build the adjacency summary once, outside the parallel phase.
            store.adjacency();
        }
        Self {
            store,
            bias: config.bias,
            direction: config.direction,
            node2vec: config.node2vec,
            rng: CounterRng::new(config.seed),
            weights: store.region_weights(config.direction),
        }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    #[inline]
    fn propose(&self, range: NeighborRange, region_start: usize, walk: u64, hop: u32, ordinal: u32) -> usize {
        let u = self.rng.unit(walk, hop, ordinal);
        match pick_index(self.bias, u, range.len()) {
            Some(i) => match self.direction {
                Direction::Forward => range.start + i,
                Direction::Backward => range.end - 1 - i,
            },
            None => pick_weighted_range(u, self.weights, region_start, range.as_range()),
        }
    }

    #[inline]
    fn hop_at(&self, groups: &TsGroupView<'_>, pos: usize) -> Hop {
        let (edge, node) = self.store.ref_at(pos);
        Hop {
            edge,
            node,
            time: groups.time_at(pos),
        }
    }

    pub(crate) fn is_adjacent(
        &self,
        scope: AdjacencyScope,
        prev: NodeId,
        prev_time: Option<Timestamp>,
        candidate: NodeId,
    ) -> bool {
        let Some(entry) = self.store.adjacency().lookup(prev, candidate) else {
            return false;
        };
        match (scope, prev_time) {
            (AdjacencyScope::Window, _) | (AdjacencyScope::Causal, None) => true,
            (AdjacencyScope::Causal, Some(t)) => match self.direction {
                Direction::Forward => entry.max_time > t,
                Direction::Backward => entry.min_time < t,
            },
        }
    }

    /// Sample the next hop of `walk` from `state`, reading the node's
    /// timestamp groups through `groups`.
    #[inline]
    pub fn sample(&self, groups: &TsGroupView<'_>, walk: u64, state: &WalkState) -> Option<Hop> {
        let range = groups.neighborhood(state.current_time, self.direction);
        if range.is_empty() {
            return None;
        }
        let hop = state.hops_taken;
        let region_start = groups.region.0;
        let (params, prev) = match (self.node2vec, state.prev_node) {
            (Some(params), Some(prev)) => (params, prev),
            _ => return Some(self.hop_at(groups, self.propose(range, region_start, walk, hop, 0))),
        };
        let mut last = None;
        for attempt in 0..params.max_attempts {
            let ordinal = attempt.wrapping_mul(2);
            let proposal = self.hop_at(groups, self.propose(range, region_start, walk, hop, ordinal));
            let u_accept = self.rng.unit(walk, hop, ordinal.wrapping_add(1));
            let adjacent = |p, c| self.is_adjacent(params.adjacency, p, state.prev_time, c);
            if node2vec_accept(prev, proposal.node, &params, adjacent, u_accept) {
                return Some(proposal);
            }
            last = Some(proposal);
        }
        last
    }
}

/// Sample one hop for walk `walk` straight from the shared index. This is
/// the same routine every dispatch tier runs.
pub fn sample_hop(store: &EdgeStore, config: &WalkConfig, walk: u64, state: &WalkState) -> Option<Hop> {
    HopSampler::new(store, config).sample(&store.node_ts_groups(state.current_node), walk, state)
}
