//! Seeded synthetic temporal graphs for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use crate::edge_store::TemporalEdge;
use crate::Timestamp;

fn endpoint_pair<R: Rng>(rng: &mut R, nodes: u64) -> (u64, u64) {
    let s = rng.random_range(0..nodes);
    let mut t = rng.random_range(0..nodes);
    if t == s && nodes > 1 {
        t = (t + 1) % nodes;
    }
    (s, t)
}

/// `edges` edges with uniform endpoints over `nodes` ids (no self-loops)
/// and uniform times in `[0, time_span)`.
pub fn uniform_random(nodes: u64, edges: usize, time_span: Timestamp, seed: u64) -> Vec<TemporalEdge> {
    assert!(nodes > 0 && time_span > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..edges)
        .map(|_| {
            let (s, t) = endpoint_pair(&mut rng, nodes);
            TemporalEdge::new(s, t, rng.random_range(0..time_span))
        })
        .collect()
}

/// Power-law graph: sources and targets are drawn from Zipf ranks. The
/// `shared_hubs` top ranks map to the same node on both sides (nodes that
/// attract many walks and also have many distinct timestamps); below that,
/// in-rank and out-rank are independent, so heavily visited nodes with few
/// timestamps and lightly visited nodes with many both occur.
#[derive(Clone, Copy, Debug)]
pub struct HubSkewed {
    pub nodes: u64,
    pub edges: usize,
    pub exponent: f64,
    pub shared_hubs: u64,
    pub time_span: Timestamp,
}

impl HubSkewed {
    pub fn generate(&self, seed: u64) -> Vec<TemporalEdge> {
        let n = self.nodes;
        assert!(n > 1 && self.time_span > 0 && self.shared_hubs <= n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out_rank: Vec<u64> = (0..n).collect();
        out_rank.shuffle(&mut rng);
        let h = self.shared_hubs as usize;
        let mut in_rank: Vec<u64> = out_rank[h..].to_vec();
        in_rank.shuffle(&mut rng);
        in_rank.splice(0..0, out_rank[..h].iter().copied());

        let zipf = Zipf::new(n as f64, self.exponent).expect("valid Zipf parameters");
        let draw = |rng: &mut ChaCha8Rng| (zipf.sample(rng) as u64).clamp(1, n) as usize - 1;
        (0..self.edges)
            .map(|_| {
                let s = out_rank[draw(&mut rng)];
                let mut t = in_rank[draw(&mut rng)];
                if t == s {
                    t = in_rank[rng.random_range(0..n as usize)];
                }
                TemporalEdge::new(s, t, rng.random_range(0..self.time_span))
            })
            .collect()
    }
}

/// One hub fed by every leaf early on and fanning out later, so per-node
/// walks from the leaves all meet at the hub after their first hop. Leaves
/// have no other out-edges; the hub's targets and the background edges
/// live on a separate set of outer nodes.
#[derive(Clone, Copy, Debug)]
pub struct MegaHub {
    pub leaves: u64,
    pub outer: u64,
    /// Out-edges of the hub, at times after all leaf-to-hub edges.
    pub hub_out: usize,
    /// Random outer-to-outer edges in the later period.
    pub background: usize,
}

impl MegaHub {
    /// External id of the hub; leaves are `0..leaves`, outer nodes follow
    /// the hub.
    pub fn hub(&self) -> u64 {
        self.leaves
    }

    pub fn generate(&self, seed: u64) -> Vec<TemporalEdge> {
        assert!(self.leaves > 0 && self.outer > 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let early = 1_000;
        let late = early + 100_000;
        let hub = self.hub();
        let first_outer = hub + 1;
        let mut edges: Vec<TemporalEdge> = (0..self.leaves)
            .map(|v| TemporalEdge::new(v, hub, rng.random_range(0..early)))
            .collect();
        edges.extend((0..self.hub_out).map(|_| {
            let t = first_outer + rng.random_range(0..self.outer);
            TemporalEdge::new(hub, t, rng.random_range(early..late))
        }));
        edges.extend((0..self.background).map(|_| {
            let (s, t) = endpoint_pair(&mut rng, self.outer);
            TemporalEdge::new(first_outer + s, first_outer + t, rng.random_range(early..late))
        }));
        edges
    }
}

/// A stream of equal batches. Batch `k` covers times
/// `[k * batch_span, (k + 1) * batch_span)` with edges evenly spaced in
/// time, so a fixed window holds a fixed number of edges once it is full.
#[derive(Clone, Copy, Debug)]
pub struct EdgeStream {
    pub nodes: u64,
    pub batch_size: usize,
    pub batch_span: Timestamp,
    pub seed: u64,
}

impl EdgeStream {
    pub fn batch(&self, k: u64) -> Vec<TemporalEdge> {
        assert!(self.nodes > 0 && self.batch_size > 0);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ k.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let base = k * self.batch_span;
        let step = self.batch_span as u128;
        (0..self.batch_size)
            .map(|i| {
                let (s, t) = endpoint_pair(&mut rng, self.nodes);
                let offset = (i as u128 * step / self.batch_size as u128) as u64;
                TemporalEdge::new(s, t, base + offset)
            })
            .collect()
    }

    pub fn edges(&self, batches: u64) -> Vec<TemporalEdge> {
        (0..batches).flat_map(|k| self.batch(k)).collect()
    }
}
