//! Temporal bias pickers.
//!
//! Index pickers map one uniform draw to an index in `[0, n)` in O(1) by
//! inverting a closed-form CDF over ordinal position. The weight picker
//! inverts a cumulative `exp(t - t_min)` array by binary search. All pickers
//! share one boundary convention with [`oracle_pick`]: index `k` owns the
//! half-open cell `[F(k), F(k + 1))`.

use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edge_store::{Direction, EdgeStore};
use crate::Timestamp;

/// Above this size `e^n` leaves double range and the exponential picker
/// switches to its asymptotic form.
pub const EXP_EXACT_LIMIT: usize = 700;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BiasKind {
    UniformIndex,
    LinearIndex,
    ExponentialIndex,
    ExponentialWeight,
}

impl BiasKind {
    pub const ALL: [BiasKind; 4] = [
        BiasKind::UniformIndex,
        BiasKind::LinearIndex,
        BiasKind::ExponentialIndex,
        BiasKind::ExponentialWeight,
    ];
}

#[derive(Debug, Error, PartialEq)]
pub enum SamplerError {
    #[error("cannot build cumulative weights from an empty neighbourhood")]
    EmptyWeights,
    #[error("cannot sample a start edge from an empty store")]
    EmptyStore,
    #[error("the store does not index {0:?} walks")]
    UnsupportedDirection(Direction),
    #[error("node2vec parameters must be finite and positive (p = {p}, q = {q})")]
    InvalidNode2Vec { p: f64, q: f64 },
}

// Move a candidate index to the unique cell with F(k) <= u < F(k + 1).
// The closed forms land within one cell of the answer; this absorbs
// rounding in sqrt/ln so results match the oracle exactly.
#[inline]
fn settle(mut i: usize, n: usize, u: f64, cdf: impl Fn(usize) -> f64) -> usize {
    while i + 1 < n && cdf(i + 1) <= u {
        i += 1;
    }
    while i > 0 && cdf(i) > u {
        i -= 1;
    }
    i
}

#[inline]
fn triangular(k: usize) -> f64 {
    (k as u128 * (k as u128 + 1) / 2) as f64
}

/// `i = floor(u * n)`.
#[inline]
pub fn pick_index_uniform(u: f64, n: usize) -> usize {
    assert!(n > 0, "cannot pick from an empty range");
    let nf = n as f64;
    let i = ((u * nf) as usize).min(n - 1);
    settle(i, n, u, |k| k as f64 / nf)
}

/// Index with mass proportional to `i + 1`:
/// `i = floor((-1 + sqrt(1 + 4 u n (n + 1))) / 2)`.
#[inline]
pub fn pick_index_linear(u: f64, n: usize) -> usize {
    assert!(n > 0, "cannot pick from an empty range");
    let nf = n as f64;
    let x = (-1.0 + (1.0 + 4.0 * u * nf * (nf + 1.0)).sqrt()) / 2.0;
    let i = (x.max(0.0) as usize).min(n - 1);
    let total = triangular(n);
    settle(i, n, u, |k| triangular(k) / total)
}

/// Index with mass proportional to `e^i`, via the exact inverse
/// `floor(ln(1 + u (e^n - 1)))`. Past [`EXP_EXACT_LIMIT`] it uses
/// `floor(n + ln u)`, which differs only in mass far below `n - 40`.
#[inline]
pub fn pick_index_exponential(u: f64, n: usize) -> usize {
    assert!(n > 0, "cannot pick from an empty range");
    let nf = n as f64;
    if n <= EXP_EXACT_LIMIT {
        let scale = nf.exp_m1();
        let x = (u * scale).ln_1p();
        let i = (x.max(0.0) as usize).min(n - 1);
        settle(i, n, u, |k| (k as f64).exp_m1() / scale)
    } else {
        let x = nf + u.ln();
        (x.max(0.0) as usize).min(n - 1)
    }
}

/// Dispatch to the closed-form picker for an index bias. Returns `None` for
/// [`BiasKind::ExponentialWeight`], which needs timestamps.
#[inline]
pub fn pick_index(bias: BiasKind, u: f64, n: usize) -> Option<usize> {
    match bias {
        BiasKind::UniformIndex => Some(pick_index_uniform(u, n)),
        BiasKind::LinearIndex => Some(pick_index_linear(u, n)),
        BiasKind::ExponentialIndex => Some(pick_index_exponential(u, n)),
        BiasKind::ExponentialWeight => None,
    }
}

/// Cumulative `exp(t_j - t_min)` over a time-sorted neighbourhood.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulativeWeights {
    prefix: Vec<f64>,
}

impl CumulativeWeights {
    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn total(&self) -> f64 {
        *self.prefix.last().unwrap()
    }
}

pub fn build_cumulative_weights(times: &[Timestamp]) -> Result<CumulativeWeights, SamplerError> {
    let &t_min = times.first().ok_or(SamplerError::EmptyWeights)?;
    let mut acc = 0.0;
    let prefix = times
        .iter()
        .map(|&t| {
            acc += ((t - t_min) as f64).exp();
            acc
        })
        .collect();
    Ok(CumulativeWeights { prefix })
}

/// Smallest `k` with `prefix[k] >= u * total`.
pub fn pick_weighted(u: f64, cw: &CumulativeWeights) -> usize {
    let prefix = cw.prefix();
    let r = u * cw.total();
    prefix.partition_point(|&p| p < r).min(prefix.len() - 1)
}

/// Weighted pick restricted to `range`, where `prefix` accumulates from
/// `region_start` (so a sub-range is recovered by subtracting its base).
#[inline]
pub fn pick_weighted_range(u: f64, prefix: &[f64], region_start: usize, range: Range<usize>) -> usize {
    assert!(!range.is_empty(), "cannot pick from an empty range");
    let base = if range.start > region_start {
        prefix[range.start - 1]
    } else {
        0.0
    };
    let total = prefix[range.end - 1] - base;
    let r = base + u * total;
    let slice = &prefix[range.clone()];
    range.start + slice.partition_point(|&p| p < r).min(slice.len() - 1)
}

/// Choose a start edge: `u1` picks a timestamp group under `bias`, `u2`
/// picks uniformly inside the group's slice. Backward walks mirror the
/// group order so the bias favours groups far from the walk's direction of
/// travel, as forward walks do.
pub fn sample_start_edge(
    store: &EdgeStore,
    bias: BiasKind,
    direction: Direction,
    u1: f64,
    u2: f64,
) -> Result<usize, SamplerError> {
    let group = sample_start_group(store, bias, direction, u1)?;
    Ok(start_edge_in_group(store, group, u2))
}

/// The group half of [`sample_start_edge`].
pub fn sample_start_group(
    store: &EdgeStore,
    bias: BiasKind,
    direction: Direction,
    u1: f64,
) -> Result<usize, SamplerError> {
    if store.is_empty() {
        return Err(SamplerError::EmptyStore);
    }
    if !store.mode().supports(direction) {
        return Err(SamplerError::UnsupportedDirection(direction));
    }
    let g = store.ts_group_count();
    Ok(match pick_index(bias, u1, g) {
        Some(i) => match direction {
            Direction::Forward => i,
            Direction::Backward => g - 1 - i,
        },
        None => pick_weighted_range(u1, store.group_weights(direction), 0, 0..g),
    })
}

/// The edge half of [`sample_start_edge`]. Panics if `group` is out of range.
#[inline]
pub fn start_edge_in_group(store: &EdgeStore, group: usize, u2: f64) -> usize {
    let slice = store.edge_slice_for_ts_group(group).expect("picked group is in range");
    slice.start + pick_index_uniform(u2, slice.len())
}

/// Which edges count when testing whether a candidate neighbours the
/// previous node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AdjacencyScope {
    /// Any edge in the current window.
    Window,
    /// Only edges the walk could still have taken from the previous node.
    Causal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node2VecParams {
    p: f64,
    q: f64,
    beta_max: f64,
    /// Proposals per hop before the last one is accepted unconditionally.
    pub max_attempts: u32,
    pub adjacency: AdjacencyScope,
}

impl Node2VecParams {
    pub const DEFAULT_MAX_ATTEMPTS: u32 = 64;

    pub fn new(p: f64, q: f64) -> Result<Self, SamplerError> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(p) || !ok(q) {
            return Err(SamplerError::InvalidNode2Vec { p, q });
        }
        Ok(Self {
            p,
            q,
            beta_max: (1.0 / p).max(1.0).max(1.0 / q),
            max_attempts: Self::DEFAULT_MAX_ATTEMPTS,
            adjacency: AdjacencyScope::Window,
        })
    }

    pub fn with_max_attempts(mut self, attempts: u32) -> Self {
        self.max_attempts = attempts.max(1);
        self
    }

    pub fn with_adjacency(mut self, scope: AdjacencyScope) -> Self {
        self.adjacency = scope;
        self
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn beta_max(&self) -> f64 {
        self.beta_max
    }

    /// Second-order bias: `1/p` to return, `1` to a neighbour of the
    /// previous node, `1/q` otherwise.
    pub fn beta(&self, returns: bool, adjacent: bool) -> f64 {
        if returns {
            1.0 / self.p
        } else if adjacent {
            1.0
        } else {
            1.0 / self.q
        }
    }
}

/// Accept a proposal with probability `beta(prev, candidate) / beta_max`.
pub fn node2vec_accept<N, F>(prev: N, candidate: N, params: &Node2VecParams, adjacent: F, u_accept: f64) -> bool
where
    N: PartialEq + Copy,
    F: FnOnce(N, N) -> bool,
{
    let returns = candidate == prev;
    let beta = params.beta(returns, !returns && adjacent(prev, candidate));
    u_accept < beta / params.beta_max
}

/// Reference inverse-transform pick by linear scan: with
/// `F(k) = sum(w[..k]) / sum(w)`, the unique `k` with `F(k) <= u < F(k+1)`.
pub fn oracle_pick(u: f64, weights: &[f64]) -> usize {
    assert!(!weights.is_empty(), "oracle needs at least one weight");
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    let mut k = 0;
    for (j, &w) in weights.iter().enumerate() {
        if acc / total <= u {
            k = j;
        } else {
            break;
        }
        acc += w;
    }
    k
}

/// [`oracle_pick`] with the cell boundaries precomputed, for bulk checks.
#[derive(Clone, Debug)]
pub struct OracleTable {
    boundaries: Vec<f64>,
}

impl OracleTable {
    pub fn new(weights: &[f64]) -> Self {
        assert!(!weights.is_empty(), "oracle needs at least one weight");
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let boundaries = weights
            .iter()
            .map(|&w| {
                let f = acc / total;
                acc += w;
                f
            })
            .collect();
        Self { boundaries }
    }

    pub fn pick(&self, u: f64) -> usize {
        self.boundaries.partition_point(|&f| f <= u) - 1
    }

    pub fn len(&self) -> usize {
        self.boundaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundaries.is_empty()
    }
}
