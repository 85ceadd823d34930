//! Sliding-window ingestion.
//!
//! The active set after a batch is every edge with
//! `t_high - duration <= time <= t_high`, where `t_high` is the largest
//! timestamp seen so far. Each batch is merged with the surviving suffix of
//! the previous snapshot and the whole index is rebuilt from scratch, so
//! the cost of a batch depends on the retained edge count only.

use std::borrow::Cow;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::edge_store::{DirectionMode, EdgeStore, EdgeStoreError, TemporalEdge};
use crate::{mem, Timestamp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    /// Window length in timestamp units. `Timestamp::MAX` keeps everything.
    pub duration: Timestamp,
    pub mode: DirectionMode,
}

impl WindowConfig {
    pub fn new(duration: Timestamp, mode: DirectionMode) -> Self {
        assert!(duration > 0, "window duration must be positive");
        Self { duration, mode }
    }

    pub fn unbounded(mode: DirectionMode) -> Self {
        Self::new(Timestamp::MAX, mode)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchStats {
    pub ingested: u64,
    pub dropped_late: u64,
    pub evicted: u64,
    pub retained: u64,
    /// Wall time of the whole ingest: eviction, merge and index rebuild.
    #[serde(with = "secs")]
    pub rebuild_duration: Duration,
    /// Heap high-water mark during the ingest. Measured when the counting
    /// allocator is installed, otherwise estimated from the two snapshots
    /// and the merge buffer.
    pub peak_bytes: u64,
}

mod secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        f64::deserialize(d).map(Duration::from_secs_f64)
    }
}

/// Single-writer owner of the current snapshot. Readers take an
/// `Arc<EdgeStore>` via [`WindowManager::snapshot`] and may keep using it
/// while later batches are ingested.
#[derive(Debug)]
pub struct WindowManager {
    config: WindowConfig,
    store: Arc<EdgeStore>,
    t_high: Option<Timestamp>,
    batch_count: u64,
    last_batch_stats: BatchStats,
}

impl WindowManager {
    pub fn new(config: WindowConfig) -> Self {
        Self {
            config,
            store: Arc::new(EdgeStore::empty(config.mode)),
            t_high: None,
            batch_count: 0,
            last_batch_stats: BatchStats::default(),
        }
    }

    pub fn config(&self) -> &WindowConfig {
        &self.config
    }

    pub fn store(&self) -> &EdgeStore {
        &self.store
    }

    pub fn snapshot(&self) -> Arc<EdgeStore> {
        Arc::clone(&self.store)
    }

    pub fn t_high(&self) -> Option<Timestamp> {
        self.t_high
    }

    pub fn batch_count(&self) -> u64 {
        self.batch_count
    }

    pub fn last_batch_stats(&self) -> &BatchStats {
        &self.last_batch_stats
    }

    /// `(t_low, t_high)` of the active window; `None` before any edge has
    /// been seen. `t_low` clamps at 0.
    pub fn window_bounds(&self) -> Option<(Timestamp, Timestamp)> {
        self.t_high.map(|hi| (hi.saturating_sub(self.config.duration), hi))
    }

    /// Merge `batch` (any order) into the window and rebuild the snapshot.
    /// Edges older than the new cutoff are counted as late and dropped.
    pub fn ingest_batch(&mut self, batch: &[TemporalEdge]) -> Result<&BatchStats, EdgeStoreError> {
        let started = Instant::now();
        mem::reset_peak();
        self.batch_count += 1;

        let Some(batch_max) = batch.iter().map(|e| e.time).max() else {
            self.last_batch_stats = BatchStats {
                retained: self.store.edge_count() as u64,
                rebuild_duration: started.elapsed(),
                ..BatchStats::default()
            };
            return Ok(&self.last_batch_stats);
        };
        let t_high = self.t_high.map_or(batch_max, |t| t.max(batch_max));
        let cutoff = t_high.saturating_sub(self.config.duration);

        let old = &self.store;
        let keep_from = old
            .ts_group_offsets()
            .get(old.first_group_at_or_after(cutoff))
            .map_or(old.edge_count(), |&o| o as usize);
        let evicted = keep_from;
        let admitted = batch.iter().filter(|e| e.time >= cutoff).count();

        // A batch that replaces the whole window is built in place.
        let merged: Cow<[TemporalEdge]> = if keep_from == old.edge_count() && admitted == batch.len() {
            Cow::Borrowed(batch)
        } else {
            let mut v = Vec::with_capacity(old.edge_count() - keep_from + admitted);
            v.extend((keep_from..old.edge_count()).map(|i| old.external_edge(i)));
            v.extend(batch.iter().filter(|e| e.time >= cutoff).copied());
            Cow::Owned(v)
        };
        let merge_bytes = match &merged {
            Cow::Owned(v) => v.capacity() * std::mem::size_of::<TemporalEdge>(),
            Cow::Borrowed(_) => 0,
        };

        let next = EdgeStore::build(&merged, self.config.mode)?;
        drop(merged);
        let estimate = old.heap_bytes() + merge_bytes + next.heap_bytes();
        self.store = Arc::new(next);
        self.t_high = Some(t_high);

        let peak_bytes = if mem::is_tracking() { mem::peak() } else { estimate };
        self.last_batch_stats = BatchStats {
            ingested: batch.len() as u64,
            dropped_late: (batch.len() - admitted) as u64,
            evicted: evicted as u64,
            retained: self.store.edge_count() as u64,
            rebuild_duration: started.elapsed(),
            peak_bytes: peak_bytes as u64,
        };
        Ok(&self.last_batch_stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn edges(times: &[u64]) -> Vec<TemporalEdge> {
        times
            .iter()
            .enumerate()
            .map(|(i, &t)| TemporalEdge::new(i as u64 % 5, (i as u64 + 1) % 5, t))
            .collect()
    }

    fn store_times(m: &WindowManager) -> Vec<u64> {
        m.store().edges().iter().map(|e| e.time).collect()
    }

    #[test]
    fn late_edges_are_dropped_and_old_ones_evicted() {
        let mut m = WindowManager::new(WindowConfig::new(10, DirectionMode::DirectedForward));
        m.ingest_batch(&edges(&[15, 19, 20, 25])).unwrap();
        assert_eq!(m.window_bounds(), Some((15, 25)));
        let s = *m.ingest_batch(&edges(&[18, 26, 30])).unwrap();
        assert_eq!(m.window_bounds(), Some((20, 30)));
        assert_eq!(s.ingested, 3);
        assert_eq!(s.dropped_late, 1);
        assert_eq!(s.evicted, 2);
        assert_eq!(s.retained, 4);
        assert_eq!(store_times(&m), vec![20, 25, 26, 30]);
    }

    #[test]
    fn first_batch_keeps_only_the_window() {
        let mut m = WindowManager::new(WindowConfig::new(10, DirectionMode::Undirected));
        let times: Vec<u64> = (1..=100).collect();
        m.ingest_batch(&edges(&times)).unwrap();
        assert_eq!(store_times(&m), (90..=100).collect::<Vec<_>>());
        assert_eq!(m.last_batch_stats().dropped_late, 89);
    }

    #[test]
    fn empty_batch_only_counts() {
        let mut m = WindowManager::new(WindowConfig::new(10, DirectionMode::DirectedForward));
        assert_eq!(m.window_bounds(), None);
        m.ingest_batch(&[]).unwrap();
        assert_eq!(m.window_bounds(), None);
        m.ingest_batch(&edges(&[5, 6])).unwrap();
        let before = store_times(&m);
        let s = *m.ingest_batch(&[]).unwrap();
        assert_eq!(m.batch_count(), 3);
        assert_eq!(store_times(&m), before);
        assert_eq!((s.ingested, s.evicted, s.retained), (0, 0, 2));
    }

    #[test]
    fn bounds_clamp_at_zero() {
        let mut m = WindowManager::new(WindowConfig::new(10, DirectionMode::DirectedForward));
        m.ingest_batch(&edges(&[7])).unwrap();
        assert_eq!(m.window_bounds(), Some((0, 7)));
        let mut u = WindowManager::new(WindowConfig::unbounded(DirectionMode::DirectedForward));
        u.ingest_batch(&edges(&[3, 1_000_000])).unwrap();
        assert_eq!(u.window_bounds(), Some((0, 1_000_000)));
        assert_eq!(u.store().edge_count(), 2);
    }

    #[test]
    fn batch_inside_window_is_admitted() {
        let mut m = WindowManager::new(WindowConfig::new(10, DirectionMode::DirectedForward));
        m.ingest_batch(&edges(&[20])).unwrap();
        m.ingest_batch(&edges(&[12, 15])).unwrap();
        assert_eq!(m.t_high(), Some(20));
        assert_eq!(store_times(&m), vec![12, 15, 20]);
    }

    #[test]
    fn old_snapshots_survive_ingest() {
        let mut m = WindowManager::new(WindowConfig::new(5, DirectionMode::DirectedForward));
        m.ingest_batch(&edges(&[1, 2, 3])).unwrap();
        let held = m.snapshot();
        m.ingest_batch(&edges(&[100])).unwrap();
        assert_eq!(held.edge_count(), 3);
        assert_eq!(m.store().edge_count(), 1);
    }

    proptest! {
        #[test]
        fn store_equals_brute_force_filter(
            batches in proptest::collection::vec(proptest::collection::vec((0u64..6, 0u64..6, 0u64..200), 0..30), 1..8),
            duration in 1u64..80,
        ) {
            let mut m = WindowManager::new(WindowConfig::new(duration, DirectionMode::DirectedForward));
            let mut admitted: Vec<TemporalEdge> = Vec::new();
            for raw in &batches {
                let batch: Vec<TemporalEdge> = raw.iter().map(|&(s, t, ts)| TemporalEdge::new(s, t, ts)).collect();
                let s = *m.ingest_batch(&batch).unwrap();
                let (lo, hi) = m.window_bounds().unwrap_or((0, 0));
                admitted.extend(batch.iter().filter(|e| e.time >= lo).copied());
                let mut expect: Vec<TemporalEdge> = admitted.iter().filter(|e| e.time >= lo && e.time <= hi).copied().collect();
                expect.sort();
                let mut got: Vec<TemporalEdge> = (0..m.store().edge_count()).map(|i| m.store().external_edge(i)).collect();
                got.sort();
                prop_assert_eq!(&got, &expect);
                prop_assert_eq!(s.retained as usize, got.len());
                prop_assert!(s.dropped_late <= s.ingested);
            }
        }
    }
}
