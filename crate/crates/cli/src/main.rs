use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use temporal_walk::mem::CountingAllocator;
use temporal_walk_cli::bench::{self, ScalingParams, SkewedWorkload, StreamParams};
use temporal_walk_cli::commands::{
    cmd_generate, cmd_replay, cmd_validate, cmd_walk, GenerateCommand, ReplayCommand, ValidateCommand, WalkCommand,
};

#[global_allocator]
static ALLOC: CountingAllocator = CountingAllocator;

#[derive(Parser)]
#[command(
    name = "twalk",
    version,
    about = "Temporal random walks over sliding-window edge streams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build one window over the whole input and generate walks.
    Walk(WalkCommand),
    /// Replay the input as timed batches, generating walks after each.
    Replay(ReplayCommand),
    /// Audit walks against an edge file.
    Validate(ValidateCommand),
    /// Write a synthetic edge file.
    Generate(GenerateCommand),
    /// Run a benchmark suite: scaling, wwarp-sweep, ablation, memory, window-sweep.
    Bench {
        suite: String,
        /// Smaller inputs for a fast run.
        #[arg(long)]
        quick: bool,
        /// Repetitions per timing (best is kept).
        #[arg(long, default_value_t = 3)]
        reps: usize,
        /// Write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn emit<T: Serialize>(report: &T, json: &Option<PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    match json {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run_bench(suite: &str, quick: bool, reps: usize, json: &Option<PathBuf>) -> Result<()> {
    let skewed = if quick {
        SkewedWorkload::quick()
    } else {
        SkewedWorkload::full()
    };
    let stream = if quick {
        StreamParams::quick()
    } else {
        StreamParams::full()
    };
    match suite {
        "scaling" => {
            let mut p = ScalingParams {
                reps,
                ..Default::default()
            };
            if quick {
                p.sizes.truncate(3);
            }
            let rows = bench::scaling(&p)?;
            eprintln!(
                "{:>10} {:>12} {:>12} {:>14}",
                "edges", "ingest_s", "walk_s", "per_walk_us"
            );
            for r in &rows {
                eprintln!(
                    "{:>10} {:>12.4} {:>12.4} {:>14.3}",
                    r.edges, r.ingest_secs, r.walk_secs, r.per_walk_us
                );
            }
            emit(&rows, json)
        }
        "wwarp-sweep" => {
            let rows = bench::wwarp_sweep(&skewed, reps)?;
            eprintln!("{:>7} {:>10} {:>14}", "w_warp", "secs", "hops_per_sec");
            for r in &rows {
                eprintln!("{:>7} {:>10.4} {:>14.0}", r.w_warp, r.secs, r.hops_per_sec);
            }
            emit(&rows, json)
        }
        "ablation" => {
            let rep = bench::ablation(&skewed, reps)?;
            for r in &rep.rows {
                eprintln!("{:<12} {:>9.4}s {:>14.0} hops/s", r.variant, r.secs, r.hops_per_sec);
            }
            for (tier, n) in rep.tier_counts.as_pairs() {
                eprintln!("  {tier:<13} {n}");
            }
            eprintln!("identical outputs: {}", rep.identical_outputs);
            emit(&rep, json)
        }
        "memory" => {
            let rep = bench::memory(&stream)?;
            eprintln!(
                "peak max/min after batch 10: {:.4}; last/tenth: {:.4}; ingest slope {:.3e} s/batch (mean {:.4} s)",
                rep.peak_max_over_min, rep.peak_last_over_tenth, rep.ingest_slope_secs_per_batch, rep.ingest_mean_secs
            );
            emit(&rep, json)
        }
        "window-sweep" => {
            let rows = bench::window_sweep(&stream, 10_000, reps)?;
            eprintln!("{:>8} {:>10} {:>14}", "window", "retained", "per_walk_us");
            for r in &rows {
                eprintln!("{:>8} {:>10} {:>14.3}", r.window_batches, r.retained, r.per_walk_us);
            }
            emit(&rows, json)
        }
        other => bail!("unknown suite {other:?}; expected one of {}", bench::SUITES.join(", ")),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Walk(cmd) => {
            let s = cmd_walk(&cmd)?;
            eprintln!("{} walks, {} hops", s.walks, s.hops);
        }
        Command::Replay(cmd) => {
            let s = cmd_replay(&cmd)?;
            eprintln!("{} batches, {} walks, {} hops", s.batches, s.walks, s.hops);
        }
        Command::Validate(cmd) => {
            let report = cmd_validate(&cmd)?;
            if cmd.json {
                let mut v = serde_json::to_value(&report)?;
                v["valid_hop_percent"] = report.hop_percent().into();
                v["valid_walk_percent"] = report.walk_percent().into();
                if let Some(obj) = v.as_object_mut() {
                    obj.remove("first_violation_per_walk");
                }
                println!("{v}");
            } else {
                println!("{report}");
            }
            if cmd.require_valid && !report.all_valid() {
                return Ok(false);
            }
        }
        Command::Generate(cmd) => {
            let n = cmd_generate(&cmd)?;
            eprintln!("{n} edges");
        }
        Command::Bench {
            suite,
            quick,
            reps,
            json,
        } => run_bench(&suite, quick, reps, &json)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
