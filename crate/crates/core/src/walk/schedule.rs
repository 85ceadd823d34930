//! Per-step regrouping of alive walks into dispatch tasks.
//!
//! Each step: flag and compact alive walks, sort `(current node, walk)`
//! pairs by node, run-length encode into per-node runs of `W` walks, then
//! place each run on the dispatch plane by `W` (execution unit) and the
//! node's timestamp-group count `G` (metadata caching). Block-tier runs
//! larger than `w_max` are split into contiguous sub-tasks.

use std::ops::{AddAssign, Range};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edge_store::EdgeStore;
use crate::primitives::{exclusive_scan, partition_flagged, radix_sort_pairs, run_length_encode};
use crate::NodeId;

use super::WalkState;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ThresholdError {
    #[error("thresholds need 1 <= w_warp <= block_dim <= w_max (got {w_warp}, {block_dim}, {w_max})")]
    WalkBounds { w_warp: u32, block_dim: u32, w_max: u32 },
    #[error("warp metadata cap {g_warp_cap} exceeds block cap {g_block_cap}")]
    GroupCaps { g_warp_cap: u32, g_block_cap: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TierThresholds {
    /// Runs with fewer walks than this go solo.
    pub w_warp: u32,
    /// Runs with more walks than this go to the block tier.
    pub block_dim: u32,
    /// Largest slice of one node's walks handled by a single task.
    pub w_max: u32,
    /// Largest `G` copied into task-local scratch by a warp task.
    pub g_warp_cap: u32,
    pub g_block_cap: u32,
    /// When false every cooperative task reads the shared index directly.
    pub cache_metadata: bool,
}

impl Default for TierThresholds {
    fn default() -> Self {
        Self {
            w_warp: 4,
            block_dim: 256,
            w_max: 8192,
            g_warp_cap: 512,
            g_block_cap: 4096,
            cache_metadata: true,
        }
    }
}

impl TierThresholds {
    pub fn validate(&self) -> Result<(), ThresholdError> {
        if !(1 <= self.w_warp && self.w_warp <= self.block_dim && self.block_dim <= self.w_max) {
            return Err(ThresholdError::WalkBounds {
                w_warp: self.w_warp,
                block_dim: self.block_dim,
                w_max: self.w_max,
            });
        }
        if self.g_warp_cap > self.g_block_cap {
            return Err(ThresholdError::GroupCaps {
                g_warp_cap: self.g_warp_cap,
                g_block_cap: self.g_block_cap,
            });
        }
        Ok(())
    }

    /// Place a run of `w` co-located walks at a node with `g` timestamp
    /// groups. Solo iff `w < w_warp`; warp iff `w_warp <= w <= block_dim`;
    /// block iff `w > block_dim`; cached iff `g <= cap`.
    pub fn classify(&self, w: usize, g: usize) -> Tier {
        let cache = |cap: u32| self.cache_metadata && g <= cap as usize;
        if w < self.w_warp as usize {
            Tier::Solo
        } else if w <= self.block_dim as usize {
            if cache(self.g_warp_cap) {
                Tier::WarpCached
            } else {
                Tier::WarpDirect
            }
        } else if cache(self.g_block_cap) {
            Tier::BlockCached
        } else {
            Tier::BlockDirect
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tier {
    Solo,
    WarpCached,
    WarpDirect,
    BlockCached,
    BlockDirect,
}

impl Tier {
    pub const ALL: [Tier; 5] = [
        Tier::Solo,
        Tier::WarpCached,
        Tier::WarpDirect,
        Tier::BlockCached,
        Tier::BlockDirect,
    ];

    pub fn is_cached(self) -> bool {
        matches!(self, Tier::WarpCached | Tier::BlockCached)
    }

    pub fn name(self) -> &'static str {
        match self {
            Tier::Solo => "solo",
            Tier::WarpCached => "warp-cached",
            Tier::WarpDirect => "warp-direct",
            Tier::BlockCached => "block-cached",
            Tier::BlockDirect => "block-direct",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// One per-node unit of work for one step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DispatchTask {
    pub node: NodeId,
    pub tier: Tier,
    /// Slice of [`StepPlan::order`].
    pub walks: Range<usize>,
    pub sub_task_index: u32,
    /// True for the pieces of a run split by `w_max`.
    pub split: bool,
}

/// Launch counts per tier. Split sub-tasks are counted under
/// `multi_block` only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TierCounts {
    pub solo: u64,
    pub warp_cached: u64,
    pub warp_direct: u64,
    pub block_cached: u64,
    pub block_direct: u64,
    pub multi_block: u64,
}

impl TierCounts {
    pub fn total(&self) -> u64 {
        self.solo + self.warp_cached + self.warp_direct + self.block_cached + self.block_direct + self.multi_block
    }

    pub fn as_pairs(&self) -> [(&'static str, u64); 6] {
        [
            ("solo", self.solo),
            ("warp-cached", self.warp_cached),
            ("warp-direct", self.warp_direct),
            ("block-cached", self.block_cached),
            ("block-direct", self.block_direct),
            ("multi-block", self.multi_block),
        ]
    }
}

impl AddAssign for TierCounts {
    fn add_assign(&mut self, o: Self) {
        self.solo += o.solo;
        self.warp_cached += o.warp_cached;
        self.warp_direct += o.warp_direct;
        self.block_cached += o.block_cached;
        self.block_direct += o.block_direct;
        self.multi_block += o.multi_block;
    }
}

/// The five terminal task lists for one step.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepPlan {
    /// Alive walk ids, grouped by current node.
    pub order: Vec<u32>,
    pub tiers: [Vec<DispatchTask>; 5],
}

impl StepPlan {
    pub fn tasks(&self, tier: Tier) -> &[DispatchTask] {
        &self.tiers[tier.index()]
    }

    pub fn solo(&self) -> &[DispatchTask] {
        self.tasks(Tier::Solo)
    }

    pub fn warp_cached(&self) -> &[DispatchTask] {
        self.tasks(Tier::WarpCached)
    }

    pub fn warp_direct(&self) -> &[DispatchTask] {
        self.tasks(Tier::WarpDirect)
    }

    pub fn block_cached(&self) -> &[DispatchTask] {
        self.tasks(Tier::BlockCached)
    }

    pub fn block_direct(&self) -> &[DispatchTask] {
        self.tasks(Tier::BlockDirect)
    }

    pub fn all_tasks(&self) -> impl Iterator<Item = &DispatchTask> {
        self.tiers.iter().flatten()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn tier_counts(&self) -> TierCounts {
        let mut c = TierCounts::default();
        for t in self.all_tasks() {
            let slot = if t.split {
                &mut c.multi_block
            } else {
                match t.tier {
                    Tier::Solo => &mut c.solo,
                    Tier::WarpCached => &mut c.warp_cached,
                    Tier::WarpDirect => &mut c.warp_direct,
                    Tier::BlockCached => &mut c.block_cached,
                    Tier::BlockDirect => &mut c.block_direct,
                }
            };
            *slot += 1;
        }
        c
    }
}

pub fn schedule_step(states: &[WalkState], store: &EdgeStore, th: &TierThresholds) -> StepPlan {
    let flags: Vec<bool> = states.iter().map(|s| s.alive).collect();
    let mut order = partition_flagged(&flags);
    drop(flags);
    // First barrier: the alive count is known here.
    if order.is_empty() {
        return StepPlan::default();
    }

    let mut keys: Vec<u64> = order
        .iter()
        .map(|&w| u64::from(states[w as usize].current_node))
        .collect();
    radix_sort_pairs(&mut keys, &mut order);
    let (nodes, lens) = run_length_encode(&keys);
    drop(keys);
    let offsets = exclusive_scan(&lens);

    let mut plan = StepPlan {
        order,
        tiers: Default::default(),
    };
    let w_max = th.w_max as usize;
    for (r, &node) in nodes.iter().enumerate() {
        let node = node as NodeId;
        let (lo, hi) = (offsets[r] as usize, offsets[r + 1] as usize);
        let w = hi - lo;
        // Solo ignores G; skipping the lookup keeps this loop off the index.
        let g = if w < th.w_warp as usize {
            0
        } else {
            store.timestamp_group_count(node)
        };
        let tier = th.classify(w, g);
        let list = &mut plan.tiers[tier.index()];
        if matches!(tier, Tier::BlockCached | Tier::BlockDirect) && w > w_max {
            for (i, start) in (lo..hi).step_by(w_max).enumerate() {
                list.push(DispatchTask {
                    node,
                    tier,
                    walks: start..(start + w_max).min(hi),
                    sub_task_index: i as u32,
                    split: true,
                });
            }
        } else {
            list.push(DispatchTask {
                node,
                tier,
                walks: lo..hi,
                sub_task_index: 0,
                split: false,
            });
        }
    }
    // Second barrier: per-tier task counts are final.
    plan
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge_store::{DirectionMode, TemporalEdge};
    use proptest::prelude::*;

    fn walkers(counts: &[(NodeId, usize)]) -> Vec<WalkState> {
        counts
            .iter()
            .flat_map(|&(v, c)| std::iter::repeat_n(WalkState::at(v), c))
            .collect()
    }

    fn store_with_groups(groups: &[usize]) -> EdgeStore {
        // Node i gets groups[i] distinct timestamps.
        let mut edges = Vec::new();
        for (v, &g) in groups.iter().enumerate() {
            for t in 0..g as u64 {
                edges.push(TemporalEdge::new(v as u64, 1_000_000, t));
            }
        }
        EdgeStore::build(&edges, DirectionMode::DirectedForward).unwrap()
    }

    #[test]
    fn runs_land_on_the_dispatch_plane() {
        let store = store_with_groups(&[1, 2, 3]);
        let states = walkers(&[(0, 3), (1, 100), (2, 20_000)]);
        let plan = schedule_step(&states, &store, &TierThresholds::default());
        assert_eq!(plan.solo().len(), 1);
        assert_eq!(plan.solo()[0].node, 0);
        assert_eq!(plan.warp_cached().len(), 1);
        assert_eq!(plan.warp_cached()[0].node, 1);
        let sizes: Vec<usize> = plan.block_cached().iter().map(|t| t.walks.len()).collect();
        assert_eq!(sizes, vec![8192, 8192, 3616]);
        assert!(plan.block_cached().iter().all(|t| t.node == 2 && t.split));
        let idx: Vec<u32> = plan.block_cached().iter().map(|t| t.sub_task_index).collect();
        assert_eq!(idx, vec![0, 1, 2]);
        let c = plan.tier_counts();
        assert_eq!((c.solo, c.warp_cached, c.multi_block, c.block_cached), (1, 1, 3, 0));
    }

    #[test]
    fn dead_walks_produce_empty_lists() {
        let store = store_with_groups(&[1]);
        let mut states = walkers(&[(0, 10)]);
        states.iter_mut().for_each(|s| s.alive = false);
        let plan = schedule_step(&states, &store, &TierThresholds::default());
        assert!(plan.is_empty());
        assert!(plan.tiers.iter().all(Vec::is_empty));
    }

    #[test]
    fn boundary_conventions() {
        let th = TierThresholds::default();
        assert_eq!(th.classify(3, 1), Tier::Solo);
        assert_eq!(th.classify(4, 1), Tier::WarpCached);
        assert_eq!(th.classify(256, 1), Tier::WarpCached);
        assert_eq!(th.classify(257, 1), Tier::BlockCached);
        assert_eq!(th.classify(100, 512), Tier::WarpCached);
        assert_eq!(th.classify(100, 513), Tier::WarpDirect);
        assert_eq!(th.classify(300, 4096), Tier::BlockCached);
        assert_eq!(th.classify(300, 4097), Tier::BlockDirect);
        let direct = TierThresholds {
            cache_metadata: false,
            ..th
        };
        assert_eq!(direct.classify(100, 0), Tier::WarpDirect);
        assert_eq!(direct.classify(1, 0), Tier::Solo);
    }

    #[test]
    fn threshold_validation() {
        assert!(TierThresholds::default().validate().is_ok());
        let bad = TierThresholds {
            w_warp: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = TierThresholds {
            block_dim: 10_000,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = TierThresholds {
            g_warp_cap: 5_000,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(ThresholdError::GroupCaps { .. })));
    }

    proptest! {
        #[test]
        fn tasks_cover_alive_walks_exactly_once(
            walks in proptest::collection::vec((0u32..8, any::<bool>()), 0..600),
            w_warp in 1u32..6,
            block_dim in 6u32..40,
            w_max in 40u32..90,
        ) {
            let store = store_with_groups(&[1, 3, 5, 7, 9, 11, 13, 15]);
            let states: Vec<WalkState> = walks
                .iter()
                .map(|&(v, alive)| WalkState { alive, ..WalkState::at(v) })
                .collect();
            let th = TierThresholds { w_warp, block_dim, w_max, g_warp_cap: 4, g_block_cap: 10, cache_metadata: true };
            let plan = schedule_step(&states, &store, &th);

            let mut alive: Vec<u32> = (0..states.len() as u32).filter(|&w| states[w as usize].alive).collect();
            let mut order = plan.order.clone();
            order.sort();
            alive.sort();
            prop_assert_eq!(order, alive);

            let mut seen = vec![0u32; plan.order.len()];
            for t in plan.all_tasks() {
                prop_assert!(t.walks.len() <= w_max as usize);
                for i in t.walks.clone() {
                    seen[i] += 1;
                    prop_assert_eq!(states[plan.order[i] as usize].current_node, t.node);
                }
            }
            prop_assert!(seen.iter().all(|&c| c == 1));
        }

        #[test]
        fn raising_w_warp_never_promotes_solo_runs(w in 1usize..400, g in 0usize..5000, a in 1u32..64, b in 1u32..64) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let low = TierThresholds { w_warp: lo, ..Default::default() };
            let high = TierThresholds { w_warp: hi, ..Default::default() };
            if low.classify(w, g) == Tier::Solo {
                prop_assert_eq!(high.classify(w, g), Tier::Solo);
            }
        }
    }
}
