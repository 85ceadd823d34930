use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use serde::Serialize;
use temporal_walk::io::{
    create_buffered, read_edges_file, read_walks_file, write_edges_binary, write_edges_text, write_walks_binary,
    write_walks_text,
};
use temporal_walk::synth::{uniform_random, EdgeStream, HubSkewed, MegaHub};
use temporal_walk::validity::{check_timed_walk, check_untimed_walk_greedy, summarize, CheckOptions, EdgeOracle};
use temporal_walk::walk::{run_variant, TierCounts};
use temporal_walk::{BatchStats, EdgeStore, TemporalEdge, Timestamp, WalkSet, WalkStats, WindowConfig, WindowManager};

use crate::options::{DirectionArg, InputArgs, OutputArgs, WalkArgs, WindowArg};

#[derive(Args, Clone, Debug)]
pub struct WalkCommand {
    #[command(flatten)]
    pub input: InputArgs,
    /// Window duration, `all` or `auto` (a third of the input's time span).
    #[arg(long, default_value = "all")]
    pub window: WindowArg,
    #[command(flatten)]
    pub walk: WalkArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Clone, Debug)]
pub struct ReplayCommand {
    #[command(flatten)]
    pub input: InputArgs,
    /// Time covered by each batch.
    #[arg(long)]
    pub batch_duration: Timestamp,
    /// Window duration, `all` or `auto` (a third of the input's time span).
    #[arg(long, default_value = "all")]
    pub window: WindowArg,
    #[command(flatten)]
    pub walk: WalkArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Clone, Debug)]
pub struct ValidateCommand {
    /// Walk file (text or binary).
    #[arg(long)]
    pub walks: PathBuf,
    /// Edge file the walks were drawn from.
    #[arg(long)]
    pub edges: PathBuf,
    #[arg(long)]
    pub undirected: bool,
    #[arg(long, value_enum, default_value_t = DirectionArg::Forward)]
    pub direction: DirectionArg,
    /// Accept equal consecutive timestamps.
    #[arg(long)]
    pub non_strict: bool,
    /// Ignore recorded times and assign the earliest feasible ones.
    #[arg(long)]
    pub untimed: bool,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
    /// Exit nonzero unless every walk is valid.
    #[arg(long)]
    pub require_valid: bool,
}

#[derive(Args, Clone, Debug)]
pub struct GenerateCommand {
    #[command(subcommand)]
    pub graph: GraphKind,
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub binary: bool,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Subcommand, Clone, Debug)]
pub enum GraphKind {
    /// Uniform endpoints and times.
    Uniform {
        #[arg(long)]
        nodes: u64,
        #[arg(long)]
        edges: usize,
        #[arg(long)]
        time_span: Timestamp,
    },
    /// Power-law degrees with a few shared in/out hubs.
    HubSkewed {
        #[arg(long)]
        nodes: u64,
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 1.0)]
        exponent: f64,
        #[arg(long, default_value_t = 8)]
        shared_hubs: u64,
        #[arg(long)]
        time_span: Timestamp,
    },
    /// One hub that every leaf feeds into.
    MegaHub {
        #[arg(long)]
        leaves: u64,
        #[arg(long, default_value_t = 1000)]
        outer: u64,
        #[arg(long, default_value_t = 10_000)]
        hub_out: usize,
        #[arg(long, default_value_t = 10_000)]
        background: usize,
    },
    /// Equal batches with evenly spaced times.
    Stream {
        #[arg(long)]
        nodes: u64,
        #[arg(long)]
        batches: u64,
        #[arg(long)]
        batch_size: usize,
        #[arg(long)]
        batch_span: Timestamp,
    },
}

/// One line of the stats stream.
#[derive(Clone, Debug, Serialize)]
pub struct StatsRecord {
    pub batch: u64,
    pub t_low: Option<Timestamp>,
    pub t_high: Option<Timestamp>,
    #[serde(flatten)]
    pub window: BatchStats,
    pub walks: u64,
    pub hops: u64,
    pub steps: u32,
    pub walk_time: f64,
    #[serde(flatten)]
    pub tiers: TierCounts,
}

impl StatsRecord {
    fn new(batch: u64, wm: &WindowManager, ws: &WalkStats) -> Self {
        let bounds = wm.window_bounds();
        Self {
            batch,
            t_low: bounds.map(|b| b.0),
            t_high: bounds.map(|b| b.1),
            window: *wm.last_batch_stats(),
            walks: ws.walks,
            hops: ws.hops,
            steps: ws.steps,
            walk_time: ws.wall_time.as_secs_f64(),
            tiers: ws.tasks,
        }
    }
}

enum WalkSink {
    Text(Box<dyn Write>),
    Binary(Box<dyn Write>),
}

impl WalkSink {
    fn open(out: &OutputArgs) -> Result<Self> {
        let w: Box<dyn Write> = match &out.output {
            Some(p) => Box::new(create_buffered(p).with_context(|| format!("creating {}", p.display()))?),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(if out.binary {
            WalkSink::Binary(w)
        } else {
            WalkSink::Text(w)
        })
    }

    fn write(&mut self, store: &EdgeStore, walks: &WalkSet) -> io::Result<()> {
        match self {
            WalkSink::Text(w) => write_walks_text(w, store, walks),
            WalkSink::Binary(w) => write_walks_binary(w, store, walks),
        }
    }
}

fn open_stats(path: &Option<PathBuf>) -> Result<Option<BufWriter<File>>> {
    path.as_ref()
        .map(|p| create_buffered(p).with_context(|| format!("creating {}", p.display())))
        .transpose()
}

fn write_record(stats: &mut Option<BufWriter<File>>, rec: &StatsRecord) -> Result<()> {
    if let Some(w) = stats {
        serde_json::to_writer(&mut *w, rec)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

fn load_edges(path: &Path) -> Result<Vec<TemporalEdge>> {
    read_edges_file(path).with_context(|| format!("reading {}", path.display()))
}

fn time_span(edges: &[TemporalEdge]) -> Timestamp {
    match (edges.iter().map(|e| e.time).min(), edges.iter().map(|e| e.time).max()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => 0,
    }
}

/// Split edges in file order into batches of `duration` time units. A new
/// batch starts at the first edge at or beyond the current boundary; edges
/// that arrive out of order stay in the batch they arrive in.
pub fn split_batches(edges: &[TemporalEdge], duration: Timestamp) -> Vec<&[TemporalEdge]> {
    assert!(duration > 0);
    let mut out = Vec::new();
    let Some(first) = edges.first() else { return out };
    let mut end = first.time.saturating_add(duration);
    let mut start = 0;
    for (i, e) in edges.iter().enumerate() {
        if e.time >= end {
            out.push(&edges[start..i]);
            start = i;
            let skipped = (e.time - end) / duration + 1;
            end = end.saturating_add(skipped.saturating_mul(duration));
        }
    }
    out.push(&edges[start..]);
    out
}

pub struct RunSummary {
    pub batches: u64,
    pub walks: u64,
    pub hops: u64,
}

/// Bulk mode: one window over the whole input.
pub fn cmd_walk(cmd: &WalkCommand) -> Result<RunSummary> {
    let edges = load_edges(&cmd.input.input)?;
    let mut wm = WindowManager::new(WindowConfig::new(
        cmd.window.resolve(time_span(&edges)),
        cmd.input.mode(),
    ));
    wm.ingest_batch(&edges)?;
    drop(edges);
    let cfg = cmd.walk.config(cmd.input.direction.into())?;
    let th = cmd.walk.thresholds()?;
    let store = wm.snapshot();
    let (walks, ws) = run_variant(&store, &cfg, &th, cmd.walk.variant.into())?;
    let mut sink = WalkSink::open(&cmd.out)?;
    sink.write(&store, &walks)?;
    let mut stats = open_stats(&cmd.out.stats)?;
    write_record(&mut stats, &StatsRecord::new(0, &wm, &ws))?;
    if let Some(w) = stats.as_mut() {
        w.flush()?;
    }
    Ok(RunSummary {
        batches: 1,
        walks: ws.walks,
        hops: ws.hops,
    })
}

/// Streaming mode: ingest batch by batch and generate walks after each.
pub fn cmd_replay(cmd: &ReplayCommand) -> Result<RunSummary> {
    if cmd.batch_duration == 0 {
        bail!("--batch-duration must be positive");
    }
    let edges = load_edges(&cmd.input.input)?;
    let window = cmd.window.resolve(time_span(&edges));
    if window < cmd.batch_duration {
        bail!(
            "--window ({window}) must be at least --batch-duration ({})",
            cmd.batch_duration
        );
    }
    let mut wm = WindowManager::new(WindowConfig::new(window, cmd.input.mode()));
    let mut cfg = cmd.walk.config(cmd.input.direction.into())?;
    let th = cmd.walk.thresholds()?;
    let mut sink = WalkSink::open(&cmd.out)?;
    let mut stats = open_stats(&cmd.out.stats)?;
    let mut summary = RunSummary {
        batches: 0,
        walks: 0,
        hops: 0,
    };
    let base_seed = cfg.seed;
    for (k, batch) in split_batches(&edges, cmd.batch_duration).into_iter().enumerate() {
        wm.ingest_batch(batch)?;
        let store = wm.snapshot();
        cfg.seed = base_seed.wrapping_add(k as u64);
        let (walks, ws) = if store.is_empty() {
            (WalkSet::default(), WalkStats::default())
        } else {
            run_variant(&store, &cfg, &th, cmd.walk.variant.into())?
        };
        sink.write(&store, &walks)?;
        write_record(&mut stats, &StatsRecord::new(k as u64, &wm, &ws))?;
        summary.batches += 1;
        summary.walks += ws.walks;
        summary.hops += ws.hops;
    }
    if let Some(w) = stats.as_mut() {
        w.flush()?;
    }
    Ok(summary)
}

pub fn cmd_validate(cmd: &ValidateCommand) -> Result<temporal_walk::validity::ValidityReport> {
    let edges = load_edges(&cmd.edges)?;
    let oracle = EdgeOracle::new(&edges, cmd.undirected);
    drop(edges);
    let walks = read_walks_file(&cmd.walks).with_context(|| format!("reading {}", cmd.walks.display()))?;
    let opts = CheckOptions {
        direction: cmd.direction.into(),
        strict: !cmd.non_strict,
    };
    let mut nodes = Vec::new();
    let report = summarize(walks.iter().map(|w| {
        if cmd.untimed {
            nodes.clear();
            nodes.extend(w.iter().map(|&(v, _)| v));
            check_untimed_walk_greedy(&nodes, &oracle, &opts)
        } else {
            check_timed_walk(w, &oracle, &opts)
        }
    }));
    Ok(report)
}

pub fn cmd_generate(cmd: &GenerateCommand) -> Result<usize> {
    let seed = cmd.seed;
    let edges = match cmd.graph {
        GraphKind::Uniform {
            nodes,
            edges,
            time_span,
        } => {
            if nodes == 0 || time_span == 0 {
                bail!("--nodes and --time-span must be positive");
            }
            uniform_random(nodes, edges, time_span, seed)
        }
        GraphKind::HubSkewed {
            nodes,
            edges,
            exponent,
            shared_hubs,
            time_span,
        } => {
            if nodes < 2 || time_span == 0 || shared_hubs > nodes || exponent <= 0.0 {
                bail!("invalid hub-skewed parameters");
            }
            HubSkewed {
                nodes,
                edges,
                exponent,
                shared_hubs,
                time_span,
            }
            .generate(seed)
        }
        GraphKind::MegaHub {
            leaves,
            outer,
            hub_out,
            background,
        } => {
            if leaves == 0 || outer < 2 {
                bail!("need at least one leaf and two outer nodes");
            }
            MegaHub {
                leaves,
                outer,
                hub_out,
                background,
            }
            .generate(seed)
        }
        GraphKind::Stream {
            nodes,
            batches,
            batch_size,
            batch_span,
        } => {
            if nodes == 0 || batch_size == 0 || batch_span == 0 {
                bail!("--nodes, --batch-size and --batch-span must be positive");
            }
            EdgeStream {
                nodes,
                batch_size,
                batch_span,
                seed,
            }
            .edges(batches)
        }
    };
    let w: Box<dyn Write> = match &cmd.output {
        Some(p) => Box::new(create_buffered(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    if cmd.binary {
        write_edges_binary(w, &edges)?;
    } else {
        write_edges_text(w, &edges)?;
    }
    Ok(edges.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn times(ts: &[u64]) -> Vec<TemporalEdge> {
        ts.iter().map(|&t| TemporalEdge::new(0, 1, t)).collect()
    }

    #[test]
    fn batches_follow_file_order() {
        let e = times(&[0, 3, 9, 10, 4, 35, 36]);
        let b: Vec<usize> = split_batches(&e, 10).iter().map(|s| s.len()).collect();
        // [0,10) gets 0,3,9; [10,20) gets 10 and the late 4; 35 skips ahead.
        assert_eq!(b, vec![3, 2, 2]);
        assert!(split_batches(&[], 5).is_empty());
        assert_eq!(split_batches(&e, 1_000).len(), 1);
    }
}
