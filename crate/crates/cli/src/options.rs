use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use temporal_walk::samplers::AdjacencyScope;
use temporal_walk::{
    BiasKind, Direction, DirectionMode, Node2VecParams, StartMode, TierThresholds, Timestamp, Variant, WalkConfig,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BiasArg {
    Uniform,
    Linear,
    ExpIndex,
    ExpWeight,
    /// Second-order rejection sampling over an exp-weight proposal.
    Node2vec,
}

impl BiasArg {
    fn kind(self) -> BiasKind {
        match self {
            BiasArg::Uniform => BiasKind::UniformIndex,
            BiasArg::Linear => BiasKind::LinearIndex,
            BiasArg::ExpIndex => BiasKind::ExponentialIndex,
            BiasArg::ExpWeight | BiasArg::Node2vec => BiasKind::ExponentialWeight,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Forward,
    Backward,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Forward => Direction::Forward,
            DirectionArg::Backward => Direction::Backward,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Coop,
    CoopDirect,
    Fullwalk,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Coop => Variant::Coop,
            VariantArg::CoopDirect => Variant::CoopDirect,
            VariantArg::Fullwalk => Variant::FullWalk,
        }
    }
}

/// `--window` value: a duration, `all` (keep every edge) or `auto`
/// (one third of the input's time span).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowArg {
    All,
    Auto,
    Duration(Timestamp),
}

impl FromStr for WindowArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(WindowArg::All),
            "auto" => Ok(WindowArg::Auto),
            _ => match s.parse::<Timestamp>() {
                Ok(0) => Err("window must be positive".into()),
                Ok(d) => Ok(WindowArg::Duration(d)),
                Err(e) => Err(format!("expected a duration, `all` or `auto`: {e}")),
            },
        }
    }
}

impl WindowArg {
    pub fn resolve(self, span: Timestamp) -> Timestamp {
        match self {
            WindowArg::All => Timestamp::MAX,
            WindowArg::Auto => span.div_ceil(3).max(1),
            WindowArg::Duration(d) => d,
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct InputArgs {
    /// Edge file: `src<TAB>dst<TAB>time` text or packed binary.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Treat edges as undirected.
    #[arg(long)]
    pub undirected: bool,
    #[arg(long, value_enum, default_value_t = DirectionArg::Forward)]
    pub direction: DirectionArg,
}

impl InputArgs {
    pub fn mode(&self) -> DirectionMode {
        if self.undirected {
            DirectionMode::Undirected
        } else {
            match self.direction {
                DirectionArg::Forward => DirectionMode::DirectedForward,
                DirectionArg::Backward => DirectionMode::DirectedBackward,
            }
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct WalkArgs {
    /// Maximum hops per walk.
    #[arg(long, default_value_t = 80)]
    pub walk_length: u32,
    /// Walks from every node with edges in the walk direction (default 10).
    #[arg(long, conflicts_with = "num_walks")]
    pub walks_per_node: Option<u32>,
    /// Total walks seeded from sampled start edges.
    #[arg(long)]
    pub num_walks: Option<u64>,
    #[arg(long, value_enum, default_value_t = BiasArg::ExpWeight)]
    pub bias: BiasArg,
    /// Bias of start-edge selection in sampled mode (defaults to --bias).
    #[arg(long, value_enum)]
    pub start_bias: Option<BiasArg>,
    /// Node2vec return parameter.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Node2vec in-out parameter.
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    /// Count only edges still usable after the previous hop as node2vec adjacency.
    #[arg(long)]
    pub causal_adjacency: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = VariantArg::Coop)]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 4)]
    pub w_warp: u32,
    #[arg(long, default_value_t = 256)]
    pub block_dim: u32,
    #[arg(long, default_value_t = 8192)]
    pub w_max: u32,
    #[arg(long, default_value_t = 512)]
    pub g_warp_cap: u32,
    #[arg(long, default_value_t = 4096)]
    pub g_block_cap: u32,
}

impl WalkArgs {
    pub fn config(&self, direction: Direction) -> Result<WalkConfig> {
        if self.walk_length == 0 {
            bail!("--walk-length must be at least 1");
        }
        let start = match (self.walks_per_node, self.num_walks) {
            (_, Some(n)) => StartMode::Sampled { num_walks: n },
            (Some(0), None) => bail!("--walks-per-node must be positive"),
            (Some(k), None) => StartMode::PerNode { walks_per_node: k },
            (None, None) => StartMode::PerNode { walks_per_node: 10 },
        };
        let node2vec = match self.bias {
            BiasArg::Node2vec => {
                let scope = if self.causal_adjacency {
                    AdjacencyScope::Causal
                } else {
                    AdjacencyScope::Window
                };
                Some(Node2VecParams::new(self.p, self.q)?.with_adjacency(scope))
            }
            _ => None,
        };
        Ok(WalkConfig {
            walk_length: self.walk_length,
            start,
            bias: self.bias.kind(),
            start_bias: self.start_bias.unwrap_or(self.bias).kind(),
            node2vec,
            direction,
            seed: self.seed,
        })
    }

    pub fn thresholds(&self) -> Result<TierThresholds> {
        let th = TierThresholds {
            w_warp: self.w_warp,
            block_dim: self.block_dim,
            w_max: self.w_max,
            g_warp_cap: self.g_warp_cap,
            g_block_cap: self.g_block_cap,
            cache_metadata: true,
        };
        th.validate()?;
        Ok(th)
    }
}

#[derive(Args, Clone, Debug)]
pub struct OutputArgs {
    /// Walk output file.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Write walks in the binary format.
    #[arg(long)]
    pub binary: bool,
    /// Newline-delimited JSON stats file.
    #[arg(long)]
    pub stats: Option<PathBuf>,
}
