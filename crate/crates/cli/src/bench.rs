//! Benchmark suites. Each returns a serialisable report; the binary prints
//! it as a table and optionally writes JSON.

use std::time::{Duration, Instant};

use anyhow::{bail, Result};
use serde::Serialize;
use temporal_walk::synth::{uniform_random, EdgeStream, HubSkewed};
use temporal_walk::walk::{run_variant, TierCounts};
use temporal_walk::{
    generate_walks, BiasKind, DirectionMode, EdgeStore, StartMode, TierThresholds, Variant, WalkConfig, WindowConfig,
    WindowManager,
};

pub const SUITES: [&str; 5] = ["scaling", "wwarp-sweep", "ablation", "memory", "window-sweep"];

/// Run `f` `reps` times and keep the fastest wall time.
pub fn best_of<T>(reps: usize, mut f: impl FnMut() -> T) -> (Duration, T) {
    let mut best: Option<(Duration, T)> = None;
    for _ in 0..reps.max(1) {
        let t0 = Instant::now();
        let out = f();
        let dt = t0.elapsed();
        if best.as_ref().is_none_or(|(b, _)| dt < *b) {
            best = Some((dt, out));
        }
    }
    best.unwrap()
}

/// Least-squares slope of `ys` against `0, 1, 2, ...`.
pub fn slope(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    let mx = (n - 1.0) / 2.0;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, &y) in ys.iter().enumerate() {
        let dx = i as f64 - mx;
        sxy += dx * (y - my);
        sxx += dx * dx;
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingRow {
    pub edges: usize,
    pub nodes: u64,
    pub ingest_secs: f64,
    pub walks: u64,
    pub hops: u64,
    pub walk_secs: f64,
    pub per_walk_us: f64,
}

#[derive(Clone, Debug)]
pub struct ScalingParams {
    pub sizes: Vec<usize>,
    /// Average degree is held fixed: `nodes = edges / degree`.
    pub degree: usize,
    pub walks: u64,
    pub walk_length: u32,
    pub bias: BiasKind,
    pub reps: usize,
    pub seed: u64,
}

impl Default for ScalingParams {
    fn default() -> Self {
        Self {
            sizes: vec![1_000, 10_000, 100_000, 1_000_000],
            degree: 10,
            walks: 10_000,
            walk_length: 80,
            bias: BiasKind::ExponentialWeight,
            reps: 5,
            seed: 1,
        }
    }
}

pub fn scaling(p: &ScalingParams) -> Result<Vec<ScalingRow>> {
    let mut rows = Vec::new();
    for &m in &p.sizes {
        let nodes = (m / p.degree).max(2) as u64;
        let edges = uniform_random(nodes, m, m as u64, p.seed);
        let (ingest, store) = best_of(p.reps, || {
            let mut wm = WindowManager::new(WindowConfig::unbounded(DirectionMode::DirectedForward));
            wm.ingest_batch(&edges)?;
            anyhow::Ok(wm.snapshot())
        });
        let store = store?;
        let mut cfg = WalkConfig::new(p.walk_length, StartMode::Sampled { num_walks: p.walks });
        cfg.bias = p.bias;
        cfg.start_bias = BiasKind::UniformIndex;
        cfg.seed = p.seed;
        let (dt, out) = best_of(p.reps, || generate_walks(&store, &cfg, &TierThresholds::default()));
        let (_, stats) = out?;
        rows.push(ScalingRow {
            edges: m,
            nodes,
            ingest_secs: ingest.as_secs_f64(),
            walks: stats.walks,
            hops: stats.hops,
            walk_secs: dt.as_secs_f64(),
            per_walk_us: dt.as_secs_f64() * 1e6 / stats.walks.max(1) as f64,
        });
    }
    Ok(rows)
}

/// The skewed graph used by the ablation and w_warp sweep. Its hubs pull
/// thousands of co-located walks while lighter nodes carry a few, and in-
/// and out-degree are decorrelated below the top ranks, so every cell of
/// the dispatch plane is populated.
#[derive(Clone, Copy, Debug)]
pub struct SkewedWorkload {
    pub graph: HubSkewed,
    pub walks_per_node: u32,
    pub walk_length: u32,
    pub seed: u64,
}

impl SkewedWorkload {
    pub fn full() -> Self {
        Self {
            graph: HubSkewed {
                nodes: 100_000,
                edges: 1_000_000,
                exponent: 1.0,
                shared_hubs: 8,
                time_span: 10_000_000,
            },
            walks_per_node: 10,
            walk_length: 80,
            seed: 7,
        }
    }

    pub fn quick() -> Self {
        Self {
            graph: HubSkewed {
                nodes: 20_000,
                edges: 200_000,
                ..Self::full().graph
            },
            walk_length: 20,
            ..Self::full()
        }
    }

    pub fn build(&self) -> Result<EdgeStore> {
        Ok(EdgeStore::build(
            &self.graph.generate(self.seed),
            DirectionMode::DirectedForward,
        )?)
    }

    pub fn config(&self) -> WalkConfig {
        let mut cfg = WalkConfig::new(
            self.walk_length,
            StartMode::PerNode {
                walks_per_node: self.walks_per_node,
            },
        );
        cfg.bias = BiasKind::UniformIndex;
        cfg.seed = self.seed;
        cfg
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TierShare {
    pub tier: &'static str,
    pub tasks: u64,
    pub percent: f64,
}

fn shares(c: &TierCounts) -> Vec<TierShare> {
    let total = c.total().max(1) as f64;
    c.as_pairs()
        .into_iter()
        .map(|(tier, tasks)| TierShare {
            tier,
            tasks,
            percent: 100.0 * tasks as f64 / total,
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct AblationRow {
    pub variant: &'static str,
    pub secs: f64,
    pub hops_per_sec: f64,
    pub steps: u32,
    pub tiers: Vec<TierShare>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AblationReport {
    pub edges: usize,
    pub walks: u64,
    pub hops: u64,
    pub identical_outputs: bool,
    pub rows: Vec<AblationRow>,
    pub tier_counts: TierCounts,
}

pub fn ablation(w: &SkewedWorkload, reps: usize) -> Result<AblationReport> {
    let store = w.build()?;
    let cfg = w.config();
    let th = TierThresholds::default();
    let mut rows = Vec::new();
    let mut outputs = Vec::new();
    let mut coop_counts = TierCounts::default();
    let (mut walks, mut hops) = (0, 0);
    for v in Variant::ALL {
        let (dt, out) = best_of(reps, || run_variant(&store, &cfg, &th, v));
        let (set, stats) = out?;
        if v == Variant::Coop {
            coop_counts = stats.tasks;
        }
        walks = stats.walks;
        hops = stats.hops;
        rows.push(AblationRow {
            variant: v.name(),
            secs: dt.as_secs_f64(),
            hops_per_sec: stats.hops as f64 / dt.as_secs_f64(),
            steps: stats.steps,
            tiers: shares(&stats.tasks),
        });
        outputs.push(set);
    }
    Ok(AblationReport {
        edges: store.edge_count(),
        walks,
        hops,
        identical_outputs: outputs.windows(2).all(|p| p[0] == p[1]),
        rows,
        tier_counts: coop_counts,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub w_warp: u32,
    pub secs: f64,
    pub hops_per_sec: f64,
    pub tiers: TierCounts,
}

pub fn wwarp_sweep(w: &SkewedWorkload, reps: usize) -> Result<Vec<SweepRow>> {
    let store = w.build()?;
    let cfg = w.config();
    let mut rows = Vec::new();
    for w_warp in [1, 2, 4, 8, 16, 32, 64] {
        let th = TierThresholds {
            w_warp,
            ..TierThresholds::default()
        };
        let (dt, out) = best_of(reps, || generate_walks(&store, &cfg, &th));
        let (_, stats) = out?;
        rows.push(SweepRow {
            w_warp,
            secs: dt.as_secs_f64(),
            hops_per_sec: stats.hops as f64 / dt.as_secs_f64(),
            tiers: stats.tasks,
        });
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug)]
pub struct StreamParams {
    pub batches: u64,
    pub batch_size: usize,
    pub nodes: u64,
    /// Window length in batches.
    pub window_batches: u64,
    pub seed: u64,
}

impl StreamParams {
    pub fn full() -> Self {
        Self {
            batches: 100,
            batch_size: 100_000,
            nodes: 100_000,
            window_batches: 3,
            seed: 3,
        }
    }

    pub fn quick() -> Self {
        Self {
            batches: 40,
            batch_size: 10_000,
            nodes: 10_000,
            ..Self::full()
        }
    }

    fn stream(&self) -> EdgeStream {
        EdgeStream {
            nodes: self.nodes,
            batch_size: self.batch_size,
            batch_span: self.batch_size as u64,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MemoryRow {
    pub batch: u64,
    pub retained: u64,
    pub peak_bytes: u64,
    pub ingest_secs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MemoryReport {
    /// Whether `peak_bytes` came from the counting allocator.
    pub measured: bool,
    pub rows: Vec<MemoryRow>,
    /// Over batches from the tenth on (1-based).
    pub peak_max_over_min: f64,
    pub peak_last_over_tenth: f64,
    pub ingest_mean_secs: f64,
    pub ingest_slope_secs_per_batch: f64,
}

/// Ingest a long stream under a fixed window and record per-batch memory
/// and ingest time. Only the ingest itself is timed.
pub fn memory(p: &StreamParams) -> Result<MemoryReport> {
    let stream = p.stream();
    let span = stream.batch_span;
    let mut wm = WindowManager::new(WindowConfig::new(
        p.window_batches * span,
        DirectionMode::DirectedForward,
    ));
    let mut rows = Vec::with_capacity(p.batches as usize);
    for k in 0..p.batches {
        let batch = stream.batch(k);
        let s = *wm.ingest_batch(&batch)?;
        drop(batch);
        rows.push(MemoryRow {
            batch: k + 1,
            retained: s.retained,
            peak_bytes: s.peak_bytes,
            ingest_secs: s.rebuild_duration.as_secs_f64(),
        });
    }
    if rows.len() < 10 {
        bail!("the memory suite needs at least 10 batches");
    }
    let tail = &rows[9..];
    let peaks: Vec<f64> = tail.iter().map(|r| r.peak_bytes as f64).collect();
    let max = peaks.iter().cloned().fold(f64::MIN, f64::max);
    let min = peaks.iter().cloned().fold(f64::MAX, f64::min);
    let times: Vec<f64> = tail.iter().map(|r| r.ingest_secs).collect();
    Ok(MemoryReport {
        measured: temporal_walk::mem::is_tracking(),
        peak_max_over_min: max / min,
        peak_last_over_tenth: peaks[peaks.len() - 1] / peaks[0],
        ingest_mean_secs: times.iter().sum::<f64>() / times.len() as f64,
        ingest_slope_secs_per_batch: slope(&times),
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowRow {
    pub window_batches: u64,
    pub retained: u64,
    pub walks: u64,
    pub walk_secs: f64,
    pub per_walk_us: f64,
}

/// Sampling latency for a fixed number of walks as the window grows from
/// one to ten batches.
pub fn window_sweep(p: &StreamParams, walks: u64, reps: usize) -> Result<Vec<WindowRow>> {
    let stream = p.stream();
    let span = stream.batch_span;
    let feed = 12u64;
    let batches: Vec<_> = (0..feed).map(|k| stream.batch(k)).collect();
    let mut rows = Vec::new();
    for wb in 1..=10u64 {
        let mut wm = WindowManager::new(WindowConfig::new(wb * span, DirectionMode::DirectedForward));
        for b in &batches {
            wm.ingest_batch(b)?;
        }
        let store = wm.snapshot();
        let mut cfg = WalkConfig::new(80, StartMode::Sampled { num_walks: walks });
        cfg.seed = p.seed;
        let (dt, out) = best_of(reps, || generate_walks(&store, &cfg, &TierThresholds::default()));
        let (_, stats) = out?;
        rows.push(WindowRow {
            window_batches: wb,
            retained: store.edge_count() as u64,
            walks: stats.walks,
            walk_secs: dt.as_secs_f64(),
            per_walk_us: dt.as_secs_f64() * 1e6 / stats.walks.max(1) as f64,
        });
    }
    Ok(rows)
}
