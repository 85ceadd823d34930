//! Step-synchronous walk generation.
//!
//! Walks advance one hop per step. Before each step the alive walks are
//! regrouped by current node ([`schedule_step`]) and every per-node run is
//! executed by a task sized to it; co-located walks share one read of the
//! node's timestamp-group metadata. All randomness is counter-based, so the
//! output does not depend on thread count or on how tasks were formed.

mod hop;
mod schedule;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::edge_store::Direction;
use crate::edge_store::{DirectionMode, EdgeStore, TsGroupView};
use crate::rng::CounterRng;
use crate::samplers::{sample_start_group, start_edge_in_group, BiasKind, Node2VecParams, SamplerError};
use crate::{NodeId, Timestamp, NO_TIME};

pub(crate) use hop::HopSampler;
pub use hop::{sample_hop, Hop, WalkState};
pub use schedule::{schedule_step, DispatchTask, StepPlan, ThresholdError, Tier, TierCounts, TierThresholds};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StartMode {
    /// `walks_per_node` walks from every node with at least one edge in its
    /// region. The first hop may use any such edge.
    PerNode { walks_per_node: u32 },
    /// `num_walks` walks, each seeded by a start edge drawn under
    /// [`WalkConfig::start_bias`].
    Sampled { num_walks: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    /// Maximum hops per walk; a walk records up to `walk_length + 1` nodes.
    pub walk_length: u32,
    pub start: StartMode,
    pub bias: BiasKind,
    pub start_bias: BiasKind,
    pub node2vec: Option<Node2VecParams>,
    pub direction: Direction,
    pub seed: u64,
}

impl WalkConfig {
    pub fn new(walk_length: u32, start: StartMode) -> Self {
        Self {
            walk_length,
            start,
            bias: BiasKind::ExponentialWeight,
            start_bias: BiasKind::UniformIndex,
            node2vec: None,
            direction: Direction::Forward,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum WalkError {
    #[error("walk_length must be at least 1")]
    ZeroLength,
    #[error("a {mode:?} store cannot serve {direction:?} walks")]
    UnsupportedDirection { mode: DirectionMode, direction: Direction },
    #[error("{0} walks exceed the addressable walk count")]
    TooManyWalks(u64),
    #[error(transparent)]
    Thresholds(#[from] ThresholdError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

/// Which executor generates the walks. The two cooperative variants run
/// the per-step scheduler; `FullWalk` runs every walk start to finish on
/// its own, as the uncoordinated baseline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    Coop,
    CoopDirect,
    FullWalk,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::FullWalk, Variant::CoopDirect, Variant::Coop];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Coop => "coop",
            Variant::CoopDirect => "coop-direct",
            Variant::FullWalk => "fullwalk",
        }
    }
}

/// Fixed-stride walk storage. Slot 0 of every walk is its start node with
/// time [`NO_TIME`]; slot `h` holds the node reached after hop `h` and the
/// time of the edge taken.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WalkSet {
    stride: usize,
    nodes: Vec<NodeId>,
    times: Vec<Timestamp>,
    lengths: Vec<u32>,
}

impl WalkSet {
    pub fn with_stride(count: usize, stride: usize) -> Self {
        Self {
            stride,
            nodes: vec![0; count * stride],
            times: vec![NO_TIME; count * stride],
            lengths: vec![0; count],
        }
    }

    /// Assemble from raw parts. Panics if the parts disagree on shape.
    pub fn from_parts(stride: usize, nodes: Vec<NodeId>, times: Vec<Timestamp>, lengths: Vec<u32>) -> Self {
        assert_eq!(nodes.len(), lengths.len() * stride);
        assert_eq!(times.len(), nodes.len());
        assert!(lengths.iter().all(|&l| l as usize <= stride));
        Self {
            stride,
            nodes,
            times,
            lengths,
        }
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    /// Number of recorded nodes in walk `i` (hops + 1).
    pub fn length(&self, i: usize) -> usize {
        self.lengths[i] as usize
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    pub fn nodes(&self, i: usize) -> &[NodeId] {
        let base = i * self.stride;
        &self.nodes[base..base + self.length(i)]
    }

    pub fn times(&self, i: usize) -> &[Timestamp] {
        let base = i * self.stride;
        &self.times[base..base + self.length(i)]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[NodeId], &[Timestamp])> + '_ {
        (0..self.len()).map(|i| (self.nodes(i), self.times(i)))
    }

    pub fn raw_nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn raw_times(&self) -> &[Timestamp] {
        &self.times
    }

    pub fn total_hops(&self) -> u64 {
        self.lengths.iter().map(|&l| u64::from(l.saturating_sub(1))).sum()
    }

    #[inline]
    fn record(&mut self, walk: usize, slot: usize, node: NodeId, time: Timestamp) {
        let at = walk * self.stride + slot;
        self.nodes[at] = node;
        self.times[at] = time;
        self.lengths[walk] = slot as u32 + 1;
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WalkStats {
    pub walks: u64,
    pub hops: u64,
    /// Scheduler steps executed after initialisation.
    pub steps: u32,
    pub tasks: TierCounts,
    #[serde(with = "duration_secs")]
    pub wall_time: Duration,
}

mod duration_secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        f64::deserialize(d).map(Duration::from_secs_f64)
    }
}

fn check(store: &EdgeStore, config: &WalkConfig) -> Result<(), WalkError> {
    if config.walk_length == 0 {
        return Err(WalkError::ZeroLength);
    }
    if !store.mode().supports(config.direction) {
        return Err(WalkError::UnsupportedDirection {
            mode: store.mode(),
            direction: config.direction,
        });
    }
    Ok(())
}

/// Seed every walk and take its first hop.
pub fn init_walks(store: &EdgeStore, config: &WalkConfig) -> Result<(Vec<WalkState>, WalkSet), WalkError> {
    check(store, config)?;
    let stride = config.walk_length as usize + 1;
    let sampler = HopSampler::new(store, config);
    match config.start {
        StartMode::PerNode { walks_per_node } => {
            let sources: Vec<NodeId> = (0..store.node_count() as NodeId)
                .filter(|&v| !store.node_region(v).is_empty())
                .collect();
            let count = sources.len() as u64 * u64::from(walks_per_node);
            if count > u64::from(u32::MAX) {
                return Err(WalkError::TooManyWalks(count));
            }
            let mut states: Vec<WalkState> = sources
                .iter()
                .flat_map(|&v| std::iter::repeat_n(WalkState::at(v), walks_per_node as usize))
                .collect();
            let mut walks = WalkSet::with_stride(states.len(), stride);
            let hops: Vec<Option<Hop>> = states
                .par_iter()
                .enumerate()
                .map(|(w, s)| sampler.sample(&store.node_ts_groups(s.current_node), w as u64, s))
                .collect();
            for (w, (state, hop)) in states.iter_mut().zip(hops).enumerate() {
                walks.record(w, 0, state.current_node, NO_TIME);
                if let Some(h) = hop {
                    walks.record(w, 1, h.node, h.time);
                }
                state.advance(hop, config.walk_length);
            }
            Ok((states, walks))
        }
        StartMode::Sampled { num_walks } => {
            if num_walks > u64::from(u32::MAX) {
                return Err(WalkError::TooManyWalks(num_walks));
            }
            let n = num_walks as usize;
            if n > 0 && store.is_empty() {
                return Err(SamplerError::EmptyStore.into());
            }
            let rng = CounterRng::new(config.seed);
            // Groups first: closed-form biases pick them without touching
            // memory, so the offset reads below can be issued ahead.
            let groups: Vec<usize> = (0..n as u64)
                .into_par_iter()
                .map(|w| sample_start_group(store, config.start_bias, config.direction, rng.unit(w, 0, 0)))
                .collect::<Result<_, _>>()?;
            let seeds: Vec<usize> = groups
                .par_iter()
                .enumerate()
                .map(|(w, &g)| {
                    if let Some(&ahead) = groups.get(w + PREFETCH_NODE) {
                        store.prefetch_group(ahead);
                    }
                    start_edge_in_group(store, g, rng.unit(w as u64, 0, 1))
                })
                .collect();
            drop(groups);
            let mut states = Vec::with_capacity(n);
            let mut walks = WalkSet::with_stride(n, stride);
            for (w, &j) in seeds.iter().enumerate() {
                if let Some(&ahead) = seeds.get(w + PREFETCH_NODE) {
                    store.prefetch_edge(ahead);
                }
                let e = store.edges()[j];
                let (from, to) = match config.direction {
                    Direction::Forward => (e.source, e.target),
                    Direction::Backward => (e.target, e.source),
                };
                walks.record(w, 0, from, NO_TIME);
                walks.record(w, 1, to, e.time);
                states.push(WalkState {
                    current_node: to,
                    current_time: Some(e.time),
                    prev_node: Some(from),
                    prev_time: None,
                    alive: config.walk_length > 1,
                    hops_taken: 1,
                });
            }
            Ok((states, walks))
        }
    }
}

fn run_task(
    sampler: &HopSampler<'_>,
    task: &DispatchTask,
    order: &[u32],
    states: &[WalkState],
    out: &mut [Option<Hop>],
) {
    let ids = &order[task.walks.clone()];
    let shared = sampler.store.node_ts_groups(task.node);
    if task.tier.is_cached() {
        // Task-local copy of the node's group metadata, read once and
        // reused by every walk in the run.
        let starts = shared.starts.to_vec();
        let times = shared.times.to_vec();
        let local = TsGroupView {
            region: shared.region,
            starts: &starts,
            times: &times,
        };
        for (slot, &w) in out.iter_mut().zip(ids) {
            *slot = sampler.sample(&local, u64::from(w), &states[w as usize]);
        }
    } else {
        for (slot, &w) in out.iter_mut().zip(ids) {
            *slot = sampler.sample(&shared, u64::from(w), &states[w as usize]);
        }
    }
}

/// Run every task of one step. Outcomes are written into a buffer aligned
/// with `plan.order`; each task owns the contiguous stripe it covers.
/// A task with its stripe of the outcome buffer.
type Job<'a> = (&'a DispatchTask, &'a mut [Option<Hop>]);

const PREFETCH_NODE: usize = 12;
const PREFETCH_REGION: usize = 6;

fn execute_plan(sampler: &HopSampler<'_>, plan: &StepPlan, states: &[WalkState]) -> Vec<Option<Hop>> {
    let mut out = vec![None; plan.order.len()];
    let mut tasks: Vec<&DispatchTask> = plan.all_tasks().collect();
    tasks.sort_unstable_by_key(|t| t.walks.start);

    let mut per_tier: [Vec<Job<'_>>; 5] = Default::default();
    let mut rest = out.as_mut_slice();
    for t in tasks {
        let (stripe, tail) = std::mem::take(&mut rest).split_at_mut(t.walks.len());
        rest = tail;
        per_tier[Tier::ALL.iter().position(|&x| x == t.tier).unwrap()].push((t, stripe));
    }
    debug_assert!(rest.is_empty());

    for (tier, jobs) in Tier::ALL.iter().zip(per_tier.iter_mut()) {
        if *tier == Tier::Solo {
            // Small tasks are latency bound: walk each chunk with the next
            // nodes' metadata already in flight.
            jobs.par_chunks_mut(64).for_each(|chunk| {
                let nodes: Vec<NodeId> = chunk.iter().map(|(t, _)| t.node).collect();
                for (i, (task, stripe)) in chunk.iter_mut().enumerate() {
                    if let Some(&v) = nodes.get(i + PREFETCH_NODE) {
                        sampler.store.prefetch_node(v);
                    }
                    if let Some(&v) = nodes.get(i + PREFETCH_REGION) {
                        sampler.store.prefetch_region(v, sampler.direction());
                    }
                    run_task(sampler, task, &plan.order, states, stripe);
                }
            });
        } else {
            jobs.par_iter_mut()
                .for_each(|(task, stripe)| run_task(sampler, task, &plan.order, states, stripe));
        }
    }
    out
}

/// Generate walks with the per-step cooperative scheduler.
pub fn generate_walks(
    store: &EdgeStore,
    config: &WalkConfig,
    thresholds: &TierThresholds,
) -> Result<(WalkSet, WalkStats), WalkError> {
    thresholds.validate()?;
    let t0 = Instant::now();
    let (mut states, mut walks) = init_walks(store, config)?;
    let sampler = HopSampler::new(store, config);
    let mut stats = WalkStats::default();
    loop {
        let plan = schedule_step(&states, store, thresholds);
        if plan.is_empty() {
            break;
        }
        stats.steps += 1;
        stats.tasks += plan.tier_counts();
        let hops = execute_plan(&sampler, &plan, &states);
        for (&w, hop) in plan.order.iter().zip(hops) {
            let w = w as usize;
            let state = &mut states[w];
            if let Some(h) = hop {
                walks.record(w, state.hops_taken as usize + 1, h.node, h.time);
            }
            state.advance(hop, config.walk_length);
        }
    }
    stats.walks = walks.len() as u64;
    stats.hops = walks.total_hops();
    stats.wall_time = t0.elapsed();
    Ok((walks, stats))
}

/// Generate walks one thread per walk with no regrouping. Produces the same
/// walks as [`generate_walks`] for the same config.
pub fn generate_walks_fullwalk(store: &EdgeStore, config: &WalkConfig) -> Result<(WalkSet, WalkStats), WalkError> {
    let t0 = Instant::now();
    let (mut states, mut walks) = init_walks(store, config)?;
    let sampler = HopSampler::new(store, config);
    let stride = walks.stride;
    let length = config.walk_length;
    states
        .par_iter_mut()
        .zip(walks.nodes.par_chunks_mut(stride))
        .zip(walks.times.par_chunks_mut(stride))
        .zip(walks.lengths.par_iter_mut())
        .enumerate()
        .for_each(|(w, (((state, nodes), times), len))| {
            while state.alive {
                let hop = sampler.sample(&store.node_ts_groups(state.current_node), w as u64, state);
                if let Some(h) = hop {
                    let slot = state.hops_taken as usize + 1;
                    nodes[slot] = h.node;
                    times[slot] = h.time;
                    *len = slot as u32 + 1;
                }
                state.advance(hop, length);
            }
        });
    let stats = WalkStats {
        walks: walks.len() as u64,
        hops: walks.total_hops(),
        steps: walks.lengths.iter().max().map_or(0, |&l| l.saturating_sub(2)),
        tasks: TierCounts::default(),
        wall_time: t0.elapsed(),
    };
    Ok((walks, stats))
}

/// Dispatch on [`Variant`].
pub fn run_variant(
    store: &EdgeStore,
    config: &WalkConfig,
    thresholds: &TierThresholds,
    variant: Variant,
) -> Result<(WalkSet, WalkStats), WalkError> {
    match variant {
        Variant::Coop => generate_walks(store, config, thresholds),
        Variant::CoopDirect => {
            let th = TierThresholds {
                cache_metadata: false,
                ..*thresholds
            };
            generate_walks(store, config, &th)
        }
        Variant::FullWalk => {
            thresholds.validate()?;
            generate_walks_fullwalk(store, config)
        }
    }
}
