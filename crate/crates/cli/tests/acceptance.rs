//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). Pass criterion numbers as
//! arguments to run a subset, e.g. `cargo test --test acceptance -- 3 4`.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use anyhow::{anyhow, ensure, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use temporal_walk::io::{create_buffered, write_edges_text, write_walks_binary, write_walks_text};
use temporal_walk::mem::CountingAllocator;
use temporal_walk::samplers::{
    oracle_pick, pick_index_exponential, pick_index_linear, pick_index_uniform, OracleTable, EXP_EXACT_LIMIT,
};
use temporal_walk::synth::{uniform_random, EdgeStream, HubSkewed, MegaHub};
use temporal_walk::validity::{
    check_untimed_walk_greedy, check_walkset, exhaustive_feasible, CheckOptions, EdgeOracle,
};
use temporal_walk::walk::{init_walks, run_variant, sample_hop, schedule_step, WalkState};
use temporal_walk::{
    generate_walks, BiasKind, Direction, DirectionMode, EdgeStore, Node2VecParams, StartMode, TemporalEdge,
    TierThresholds, Variant, WalkConfig, WalkSet, WindowConfig, WindowManager,
};
use temporal_walk_cli::bench::{
    ablation, memory, scaling, MemoryReport, ScalingParams, ScalingRow, SkewedWorkload, StreamParams,
};

#[global_allocator]
static ALLOC: CountingAllocator = CountingAllocator;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

type Criterion = (u32, &'static str, fn() -> Result<Verdict>);

fn main() -> ExitCode {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [Criterion; 12] = [
        (1, "causality soundness", causality_soundness),
        (2, "closed-form sampler exactness", closed_form_exactness),
        (3, "weight-based sampler", weight_sampler),
        (4, "node2vec rejection sampling", node2vec_distribution),
        (5, "scheduler neutrality", scheduler_neutrality),
        (6, "dispatch-plane coverage", dispatch_coverage),
        (7, "bounded memory", bounded_memory),
        (8, "no cost accumulation", no_cost_accumulation),
        (9, "near-linear rebuild", near_linear_rebuild),
        (10, "flat per-walk cost", flat_per_walk),
        (11, "greedy checker optimality", greedy_optimality),
        (12, "streaming/bulk equivalence", streaming_bulk_equivalence),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let t0 = Instant::now();
        let verdict = run().unwrap_or_else(|e| Verdict::new(false, format!("error: {e:#}")));
        let tag = if verdict.pass { "PASS" } else { "FAIL" };
        println!(
            "{tag} {id:>2} {name}: {} [{:.1}s]",
            verdict.detail,
            t0.elapsed().as_secs_f64()
        );
        failed += usize::from(!verdict.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

fn normalized(w: &[f64]) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

// 1 ---------------------------------------------------------------------

fn causality_soundness() -> Result<Verdict> {
    let t0 = Instant::now();
    let stream = EdgeStream {
        nodes: 100_000,
        batch_size: 100_000,
        batch_span: 100_000,
        seed: 21,
    };
    let mut wm = WindowManager::new(WindowConfig::unbounded(DirectionMode::DirectedForward));
    let mut all = Vec::new();
    for k in 0..10 {
        let batch = stream.batch(k);
        wm.ingest_batch(&batch)?;
        all.extend(batch);
    }
    let store = wm.snapshot();
    ensure!(
        store.edge_count() == 1_000_000,
        "stream holds {} edges",
        store.edge_count()
    );
    let oracle = EdgeOracle::new(&all, false);
    let opts = CheckOptions {
        direction: Direction::Forward,
        strict: true,
    };

    let mut pass = true;
    let mut parts = Vec::new();
    for bias in BiasKind::ALL {
        let mut cfg = WalkConfig::new(80, StartMode::Sampled { num_walks: 100_000 });
        cfg.bias = bias;
        // A uniform start spreads walks over the whole stream; an
        // exponential one would park them at its end.
        cfg.start_bias = BiasKind::UniformIndex;
        cfg.seed = 5;
        let (walks, _) = generate_walks(&store, &cfg, &TierThresholds::default())?;
        let r = check_walkset(&store, &walks, &oracle, &opts);
        pass &= r.all_valid() && r.total_walks == 100_000 && r.total_hops > r.total_walks;
        parts.push(format!(
            "{:?}: {:.2}% hops / {:.2}% walks of {} hops",
            bias,
            r.hop_percent(),
            r.walk_percent(),
            r.total_hops
        ));
    }
    let elapsed = t0.elapsed();
    pass &= elapsed < Duration::from_secs(120);
    Ok(Verdict::new(
        pass,
        format!("{}; {:.1}s < 120s", parts.join(", "), elapsed.as_secs_f64()),
    ))
}

// 2 ---------------------------------------------------------------------

/// Mismatches of `pick` against the oracle over `pairs`, checking every pair
/// with a precomputed boundary table and a sample with the linear-scan form.
fn oracle_mismatches(
    pairs: &[(f64, usize)],
    weight: impl Fn(usize) -> f64,
    pick: impl Fn(f64, usize) -> usize,
) -> usize {
    let mut by_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for &(u, n) in pairs {
        by_n.entry(n).or_default().push(u);
    }
    let mut bad = 0;
    for (n, us) in by_n {
        let weights: Vec<f64> = (0..n).map(&weight).collect();
        let table = OracleTable::new(&weights);
        for (i, &u) in us.iter().enumerate() {
            let want = table.pick(u);
            if i == 0 {
                assert_eq!(want, oracle_pick(u, &weights), "oracle table disagrees with the scan");
            }
            bad += usize::from(pick(u, n) != want);
        }
    }
    bad
}

fn closed_form_exactness() -> Result<Verdict> {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut pairs = |max_n: usize| -> Vec<(f64, usize)> {
        (0..1_000_000)
            .map(|_| (rng.random::<f64>(), rng.random_range(1..=max_n)))
            .collect()
    };
    let uniform = oracle_mismatches(&pairs(10_000), |_| 1.0, pick_index_uniform);
    let linear = oracle_mismatches(&pairs(10_000), |i| (i + 1) as f64, pick_index_linear);
    let exp_small = oracle_mismatches(&pairs(EXP_EXACT_LIMIT), |i| (i as f64).exp(), pick_index_exponential);

    // Large n: goodness of fit against P(i) = e^i / sum_j e^j.
    let mut fits = Vec::new();
    let mut fit_ok = true;
    for n in [1_000usize, 10_000] {
        let draws = 1_000_000u64;
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for _ in 0..draws {
            *counts
                .entry(pick_index_exponential(rng.random::<f64>(), n))
                .or_default() += 1;
        }
        // Depth d = n - 1 - i has mass (1 - 1/e) e^-d (up to e^-n).
        let norm = (1.0 - (-1.0f64).exp()) / (1.0 - (-(n as f64)).exp());
        let mut observed = Vec::new();
        let mut expected = Vec::new();
        let mut tail_mass = 1.0;
        let mut d = 0;
        loop {
            let p = norm * (-(d as f64)).exp();
            if p * (draws as f64) < 5.0 {
                break;
            }
            observed.push(counts.get(&(n - 1 - d)).copied().unwrap_or(0) as f64);
            expected.push(p * draws as f64);
            tail_mass -= p;
            d += 1;
        }
        let tail_obs: u64 = counts.range(..n - d).map(|(_, &c)| c).sum();
        observed.push(tail_obs as f64);
        expected.push(tail_mass.max(0.0) * draws as f64);
        let stat: f64 = observed.iter().zip(&expected).map(|(o, e)| (o - e) * (o - e) / e).sum();
        let dof = (observed.len() - 1) as f64;
        let p = ChiSquared::new(dof)?.sf(stat);
        fit_ok &= p > 0.001;
        fits.push(format!("n={n} chi2={stat:.1} dof={dof} p={p:.3}"));
    }
    let elapsed = t0.elapsed();
    let pass = uniform == 0 && linear == 0 && exp_small == 0 && fit_ok && elapsed < Duration::from_secs(60);
    Ok(Verdict::new(
        pass,
        format!(
            "mismatches uniform={uniform} linear={linear} exp(n<=700)={exp_small}; {}; {:.1}s < 60s",
            fits.join(", "),
            elapsed.as_secs_f64()
        ),
    ))
}

// 3 ---------------------------------------------------------------------

fn weight_sampler() -> Result<Verdict> {
    let times: [u64; 16] = [10, 11, 13, 14, 17, 18, 22, 23, 24, 27, 28, 30, 31, 32, 34, 35];
    let edges: Vec<TemporalEdge> = times
        .iter()
        .enumerate()
        .map(|(i, &t)| TemporalEdge::new(0, 100 + i as u64, t))
        .collect();
    let store = EdgeStore::build(&edges, DirectionMode::DirectedForward)?;
    let mut cfg = WalkConfig::new(1, StartMode::PerNode { walks_per_node: 1 });
    cfg.bias = BiasKind::ExponentialWeight;
    cfg.seed = 3;
    let source = store.internal_id(0).context("source node")?;
    let state = WalkState::at(source);

    let draws = 1_000_000u64;
    let mut counts = [0u64; 16];
    for w in 0..draws {
        let hop = sample_hop(&store, &cfg, w, &state).context("non-empty neighbourhood")?;
        let i = (store.external_id(hop.node) - 100) as usize;
        ensure!(times[i] == hop.time, "hop time does not match its edge");
        counts[i] += 1;
    }
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / draws as f64).collect();
    let want = normalized(&times.iter().map(|&t| ((t - times[0]) as f64).exp()).collect::<Vec<_>>());
    let tv = total_variation(&empirical, &want);
    Ok(Verdict::new(tv < 0.01, format!("TV={tv:.5} < 0.01 over {draws} draws")))
}

// 4 ---------------------------------------------------------------------

fn node2vec_distribution() -> Result<Verdict> {
    // Walk arrived at c from a at time 1. Out-edges of c after time 1 reach
    // a (return), b and e (both also out-neighbours of a) and d (neither).
    let (a, b, c, d, e) = (1u64, 2, 3, 4, 5);
    let edges = vec![
        TemporalEdge::new(a, c, 1),
        TemporalEdge::new(a, b, 0),
        TemporalEdge::new(a, e, 6),
        TemporalEdge::new(c, a, 2),
        TemporalEdge::new(c, b, 3),
        TemporalEdge::new(c, d, 3),
        TemporalEdge::new(c, e, 4),
        TemporalEdge::new(c, d, 5),
        TemporalEdge::new(c, b, 1),
        TemporalEdge::new(d, e, 2),
    ];
    let store = EdgeStore::build(&edges, DirectionMode::DirectedForward)?;
    let id = |x: u64| store.internal_id(x).unwrap();
    let state = WalkState {
        current_node: id(c),
        current_time: Some(1),
        prev_node: Some(id(a)),
        prev_time: None,
        alive: true,
        hops_taken: 1,
    };
    let eligible: Vec<&TemporalEdge> = edges.iter().filter(|x| x.source == c && x.time > 1).collect();
    let t_min = eligible.iter().map(|x| x.time).min().unwrap();
    let adjacent_to_a = |v: u64| edges.iter().any(|x| x.source == a && x.target == v);

    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (p, q) in [(0.5, 2.0), (2.0, 0.5), (1.0, 1.0)] {
        let beta = |v: u64| {
            if v == a {
                1.0 / p
            } else if adjacent_to_a(v) {
                1.0
            } else {
                1.0 / q
            }
        };
        let want = normalized(
            &eligible
                .iter()
                .map(|x| beta(x.target) * ((x.time - t_min) as f64).exp())
                .collect::<Vec<_>>(),
        );
        let mut cfg = WalkConfig::new(5, StartMode::PerNode { walks_per_node: 1 });
        cfg.bias = BiasKind::ExponentialWeight;
        cfg.node2vec = Some(Node2VecParams::new(p, q)?);
        cfg.seed = 17;
        let draws = 1_000_000u64;
        let mut counts = vec![0u64; eligible.len()];
        for w in 0..draws {
            let hop = sample_hop(&store, &cfg, w, &state).context("non-empty neighbourhood")?;
            let got = store.external_edge(hop.edge as usize);
            let k = eligible
                .iter()
                .position(|x| **x == got)
                .context("hop outside the causal neighbourhood")?;
            counts[k] += 1;
        }
        let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / draws as f64).collect();
        let tv = total_variation(&empirical, &want);
        worst = worst.max(tv);
        parts.push(format!("(p={p}, q={q}) TV={tv:.5}"));
    }
    Ok(Verdict::new(worst < 0.02, format!("{} < 0.02", parts.join(", "))))
}

// 5 ---------------------------------------------------------------------

fn walk_bytes(store: &EdgeStore, walks: &WalkSet) -> Result<(Vec<u8>, Vec<u8>)> {
    let mut text = Vec::new();
    let mut binary = Vec::new();
    write_walks_text(&mut text, store, walks)?;
    write_walks_binary(&mut binary, store, walks)?;
    Ok((text, binary))
}

fn scheduler_neutrality() -> Result<Verdict> {
    let mega = MegaHub {
        leaves: 6_000,
        outer: 2_000,
        hub_out: 20_000,
        background: 10_000,
    };
    let skewed = HubSkewed {
        nodes: 20_000,
        edges: 200_000,
        exponent: 1.0,
        shared_hubs: 8,
        time_span: 1_000_000,
    };
    let graphs: [(&str, Vec<TemporalEdge>, DirectionMode); 3] = [
        (
            "uniform",
            uniform_random(2_000, 40_000, 5_000, 9),
            DirectionMode::Undirected,
        ),
        ("hub-skewed", skewed.generate(4), DirectionMode::DirectedForward),
        ("mega-hub", mega.generate(2), DirectionMode::DirectedForward),
    ];
    let th = TierThresholds::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, edges, mode) in &graphs {
        let store = EdgeStore::build(edges, *mode)?;
        let mut configs = Vec::new();
        for (i, bias) in BiasKind::ALL.into_iter().enumerate() {
            let mut cfg = WalkConfig::new(20, StartMode::PerNode { walks_per_node: 5 });
            cfg.bias = bias;
            cfg.seed = 100 + i as u64;
            configs.push(cfg);
        }
        let mut sampled = WalkConfig::new(20, StartMode::Sampled { num_walks: 20_000 });
        sampled.node2vec = Some(Node2VecParams::new(0.5, 2.0)?);
        sampled.seed = 7;
        configs.push(sampled);

        let mut identical = true;
        let mut multi_block = 0;
        for cfg in &configs {
            let (coop, stats) = run_variant(&store, cfg, &th, Variant::Coop)?;
            multi_block = multi_block.max(stats.tasks.multi_block);
            let reference = walk_bytes(&store, &coop)?;
            for v in [Variant::CoopDirect, Variant::FullWalk] {
                let (other, _) = run_variant(&store, cfg, &th, v)?;
                identical &= walk_bytes(&store, &other)? == reference;
            }
        }
        pass &= identical;
        let mut part = format!("{name}: {}", if identical { "identical" } else { "DIFFERENT" });
        if *name == "mega-hub" {
            let cfg = &configs[0];
            let (states, _) = init_walks(&store, cfg)?;
            let plan = schedule_step(&states, &store, &th);
            let hub = store.internal_id(mega.hub()).context("hub node")?;
            let sub_tasks = plan.all_tasks().filter(|t| t.node == hub).count();
            pass &= sub_tasks >= 3;
            part.push_str(&format!(
                " (hub split into {sub_tasks} >= 3 sub-tasks, {multi_block} multi-block launches)"
            ));
        }
        parts.push(part);
    }
    Ok(Verdict::new(pass, parts.join(", ")))
}

// 6 ---------------------------------------------------------------------

fn dispatch_coverage() -> Result<Verdict> {
    let report = ablation(&SkewedWorkload::full(), 1)?;
    let pairs = report.tier_counts.as_pairs();
    let pass = pairs.iter().all(|&(_, c)| c > 0) && report.identical_outputs;
    let listed: Vec<String> = pairs.iter().map(|(t, c)| format!("{t}={c}")).collect();
    Ok(Verdict::new(
        pass,
        format!(
            "{} over {} walks; variants identical={}",
            listed.join(" "),
            report.walks,
            report.identical_outputs
        ),
    ))
}

// 7, 8 ------------------------------------------------------------------

/// Criteria 7 and 8 read the same 100-batch run.
fn stream_report() -> Result<&'static (MemoryReport, Duration)> {
    static RUN: OnceLock<Result<(MemoryReport, Duration), String>> = OnceLock::new();
    RUN.get_or_init(|| {
        let t0 = Instant::now();
        let report = memory(&StreamParams::full()).map_err(|e| format!("{e:#}"))?;
        Ok((report, t0.elapsed()))
    })
    .as_ref()
    .map_err(|e| anyhow!("{e}"))
}

fn bounded_memory() -> Result<Verdict> {
    let (r, elapsed) = stream_report()?;
    let elapsed = *elapsed;
    let ratio = r.peak_last_over_tenth;
    let pass = r.measured && (ratio - 1.0).abs() <= 0.05 && elapsed < Duration::from_secs(180);
    Ok(Verdict::new(
        pass,
        format!(
            "peak@100 / peak@10 = {ratio:.4} (|1 - ratio| <= 0.05, max/min over 10..100 = {:.4}, measured={}); {:.1}s < 180s",
            r.peak_max_over_min,
            r.measured,
            elapsed.as_secs_f64()
        ),
    ))
}

fn no_cost_accumulation() -> Result<Verdict> {
    let (r, _) = stream_report()?;
    let rel = r.ingest_slope_secs_per_batch / r.ingest_mean_secs;
    Ok(Verdict::new(
        rel.abs() <= 0.02,
        format!(
            "slope {:.3e} s/batch = {:+.4} x mean {:.2} ms (|.| <= 0.02)",
            r.ingest_slope_secs_per_batch,
            rel,
            r.ingest_mean_secs * 1e3
        ),
    ))
}

// 9, 10 -----------------------------------------------------------------

/// Criteria 9 and 10 share one scaling run.
fn scaling_rows() -> Result<&'static [ScalingRow]> {
    static RUN: OnceLock<Result<Vec<ScalingRow>, String>> = OnceLock::new();
    RUN.get_or_init(|| {
        scaling(&ScalingParams {
            reps: 7,
            ..ScalingParams::default()
        })
        .map_err(|e| format!("{e:#}"))
    })
    .as_deref()
    .map_err(|e| anyhow!("{e}"))
}

fn near_linear_rebuild() -> Result<Verdict> {
    let rows = scaling_rows()?;
    let at = |m: usize| {
        rows.iter()
            .find(|r| r.edges == m)
            .map(|r| r.ingest_secs)
            .context("missing size")
    };
    let (small, large) = (at(100_000)?, at(1_000_000)?);
    let ratio = large / small;
    Ok(Verdict::new(
        ratio <= 15.0,
        format!(
            "ingest 1e6 / 1e5 = {:.1} ms / {:.2} ms = {ratio:.2} <= 15",
            large * 1e3,
            small * 1e3
        ),
    ))
}

fn flat_per_walk() -> Result<Verdict> {
    let rows = scaling_rows()?;
    let per_walk: Vec<f64> = rows.iter().map(|r| r.per_walk_us).collect();
    let max = per_walk.iter().cloned().fold(f64::MIN, f64::max);
    let min = per_walk.iter().cloned().fold(f64::MAX, f64::min);
    let listed: Vec<String> = rows
        .iter()
        .map(|r| format!("{}: {:.3} us", r.edges, r.per_walk_us))
        .collect();
    Ok(Verdict::new(
        max / min <= 2.0,
        format!("{}; max/min = {:.2} <= 2", listed.join(", "), max / min),
    ))
}

// 11 --------------------------------------------------------------------

fn greedy_optimality() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut mismatches, mut feasible) = (0, 0);
    let instances = 10_000;
    for _ in 0..instances {
        let nodes = rng.random_range(2..=5u64);
        let m = rng.random_range(1..=12usize);
        let edges: Vec<TemporalEdge> = (0..m)
            .map(|_| {
                TemporalEdge::new(
                    rng.random_range(0..nodes),
                    rng.random_range(0..nodes),
                    rng.random_range(0..6),
                )
            })
            .collect();
        let undirected = rng.random_bool(0.3);
        let opts = CheckOptions {
            direction: if rng.random_bool(0.5) {
                Direction::Forward
            } else {
                Direction::Backward
            },
            strict: rng.random_bool(0.7),
        };
        // Half the walks follow edges (ignoring time) so feasibility is mixed.
        let len = rng.random_range(2..=6usize);
        let mut walk = vec![rng.random_range(0..nodes)];
        while walk.len() < len {
            let last = *walk.last().unwrap();
            let follow: Vec<u64> = edges
                .iter()
                .filter_map(|e| {
                    let (from, to) = match opts.direction {
                        Direction::Forward => (e.source, e.target),
                        Direction::Backward => (e.target, e.source),
                    };
                    if from == last {
                        Some(to)
                    } else if undirected && to == last {
                        Some(from)
                    } else {
                        None
                    }
                })
                .collect();
            let next = if !follow.is_empty() && rng.random_bool(0.8) {
                follow[rng.random_range(0..follow.len())]
            } else {
                rng.random_range(0..nodes)
            };
            walk.push(next);
        }
        let oracle = EdgeOracle::new(&edges, undirected);
        let greedy = check_untimed_walk_greedy(&walk, &oracle, &opts).is_valid();
        let exhaustive = exhaustive_feasible(&walk, &oracle, &opts);
        mismatches += usize::from(greedy != exhaustive);
        feasible += usize::from(exhaustive);
    }
    Ok(Verdict::new(
        mismatches == 0,
        format!("{mismatches} mismatches over {instances} instances ({feasible} feasible)"),
    ))
}

// 12 --------------------------------------------------------------------

fn streaming_bulk_equivalence() -> Result<Verdict> {
    let dir = tempfile::tempdir()?;
    let input = dir.path().join("edges.tsv");
    let edges = uniform_random(300, 5_000, 2_000, 12);
    write_edges_text(create_buffered(&input)?, &edges)?;
    let span = edges.iter().map(|e| e.time).max().unwrap() - edges.iter().map(|e| e.time).min().unwrap();

    let twalk = env!("CARGO_BIN_EXE_twalk");
    let common = ["--walk-length", "12", "--walks-per-node", "3", "--seed", "41"];
    let mut pass = true;
    let mut parts = Vec::new();
    for binary in [false, true] {
        let ext = if binary { "bin" } else { "txt" };
        let bulk = dir.path().join(format!("bulk.{ext}"));
        let replay = dir.path().join(format!("replay.{ext}"));
        let mut walk_cmd = Command::new(twalk);
        walk_cmd
            .arg("walk")
            .arg("--input")
            .arg(&input)
            .arg("--output")
            .arg(&bulk)
            .args(common);
        let mut replay_cmd = Command::new(twalk);
        replay_cmd
            .arg("replay")
            .arg("--input")
            .arg(&input)
            .arg("--output")
            .arg(&replay)
            .arg("--batch-duration")
            .arg((span + 1).to_string())
            .args(common);
        if binary {
            walk_cmd.arg("--binary");
            replay_cmd.arg("--binary");
        }
        for cmd in [&mut walk_cmd, &mut replay_cmd] {
            let out = cmd.output()?;
            ensure!(
                out.status.success(),
                "{cmd:?} failed: {}",
                String::from_utf8_lossy(&out.stderr)
            );
        }
        let (a, b) = (std::fs::read(&bulk)?, std::fs::read(&replay)?);
        let same = !a.is_empty() && a == b;
        pass &= same;
        parts.push(format!(
            "{ext}: {} bytes {}",
            a.len(),
            if same { "identical" } else { "DIFFERENT" }
        ));
    }
    Ok(Verdict::new(pass, parts.join(", ")))
}
