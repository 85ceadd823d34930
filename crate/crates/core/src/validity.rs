//! Post-hoc causality audit. The checker keeps its own edge table and never
//! consults [`EdgeStore`](crate::EdgeStore), so it can audit walks from any
//! engine.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::edge_store::{Direction, EdgeStore, TemporalEdge};
use crate::walk::WalkSet;
use crate::{Timestamp, NO_TIME};

/// `(source, target)` to the sorted, de-duplicated times of its edges.
#[derive(Clone, Debug, Default)]
pub struct EdgeOracle {
    times: HashMap<(u64, u64), Vec<Timestamp>>,
}

impl EdgeOracle {
    /// Undirected graphs register each edge under both orientations.
    pub fn new(edges: &[TemporalEdge], undirected: bool) -> Self {
        let mut times: HashMap<(u64, u64), Vec<Timestamp>> = HashMap::new();
        for e in edges {
            times.entry((e.source, e.target)).or_default().push(e.time);
            if undirected && e.source != e.target {
                times.entry((e.target, e.source)).or_default().push(e.time);
            }
        }
        for v in times.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
        Self { times }
    }

    pub fn times(&self, source: u64, target: u64) -> &[Timestamp] {
        self.times.get(&(source, target)).map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, source: u64, target: u64, time: Timestamp) -> bool {
        self.times(source, target).binary_search(&time).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub direction: Direction,
    /// Require strictly increasing (forward) times. When false, equal
    /// consecutive times are accepted.
    pub strict: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            direction: Direction::Forward,
            strict: true,
        }
    }
}

impl CheckOptions {
    // Does a hop at `next` respect the walk's previous time?
    #[inline]
    fn follows(&self, prev: Option<Timestamp>, next: Timestamp) -> bool {
        let Some(prev) = prev else { return true };
        match (self.direction, self.strict) {
            (Direction::Forward, true) => next > prev,
            (Direction::Forward, false) => next >= prev,
            (Direction::Backward, true) => next < prev,
            (Direction::Backward, false) => next <= prev,
        }
    }

    // Orientation of the edge traversed from `from` to `to`.
    #[inline]
    fn edge(&self, from: u64, to: u64) -> (u64, u64) {
        match self.direction {
            Direction::Forward => (from, to),
            Direction::Backward => (to, from),
        }
    }
}

/// Outcome for one walk. Hops are numbered from 0: hop `j` goes from entry
/// `j` to entry `j + 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkCheck {
    pub hops: u32,
    pub valid_hops: u32,
    pub first_violation: Option<u32>,
}

impl WalkCheck {
    pub fn is_valid(&self) -> bool {
        self.first_violation.is_none()
    }

    fn push(&mut self, ok: bool) {
        if ok {
            self.valid_hops += 1;
        } else if self.first_violation.is_none() {
            self.first_violation = Some(self.hops);
        }
        self.hops += 1;
    }
}

/// Check a walk whose hops carry times. `None` marks a start entry with no
/// time; such an entry places no constraint on the following hop.
pub fn check_timed_walk(walk: &[(u64, Option<Timestamp>)], oracle: &EdgeOracle, opts: &CheckOptions) -> WalkCheck {
    let mut out = WalkCheck::default();
    for pair in walk.windows(2) {
        let ((a, ta), (b, tb)) = (pair[0], pair[1]);
        let ok = tb.is_some_and(|t| {
            let (s, d) = opts.edge(a, b);
            oracle.contains(s, d, t) && opts.follows(ta, t)
        });
        out.push(ok);
    }
    out
}

/// Check a walk given only its node sequence by assigning each hop the
/// earliest time that keeps the walk causal (latest, for backward walks).
/// An infeasible hop is counted and the assignment restarts after it, so
/// later hops are still scored.
pub fn check_untimed_walk_greedy(nodes: &[u64], oracle: &EdgeOracle, opts: &CheckOptions) -> WalkCheck {
    let mut out = WalkCheck::default();
    let mut prev: Option<Timestamp> = None;
    for pair in nodes.windows(2) {
        let (s, d) = opts.edge(pair[0], pair[1]);
        let times = oracle.times(s, d);
        match greedy_pick(times, prev, opts) {
            Some(t) => {
                out.push(true);
                prev = Some(t);
            }
            None => {
                out.push(false);
                prev = None;
            }
        }
    }
    out
}

/// Assigned times for an untimed walk, or the index of the first hop that
/// cannot be placed.
pub fn greedy_assignment(nodes: &[u64], oracle: &EdgeOracle, opts: &CheckOptions) -> Result<Vec<Timestamp>, u32> {
    let mut assigned = Vec::with_capacity(nodes.len().saturating_sub(1));
    let mut prev = None;
    for (j, pair) in nodes.windows(2).enumerate() {
        let (s, d) = opts.edge(pair[0], pair[1]);
        let t = greedy_pick(oracle.times(s, d), prev, opts).ok_or(j as u32)?;
        assigned.push(t);
        prev = Some(t);
    }
    Ok(assigned)
}

fn greedy_pick(times: &[Timestamp], prev: Option<Timestamp>, opts: &CheckOptions) -> Option<Timestamp> {
    match opts.direction {
        Direction::Forward => {
            let i = match prev {
                None => 0,
                Some(p) if opts.strict => times.partition_point(|&t| t <= p),
                Some(p) => times.partition_point(|&t| t < p),
            };
            times.get(i).copied()
        }
        Direction::Backward => {
            let i = match prev {
                None => times.len(),
                Some(p) if opts.strict => times.partition_point(|&t| t < p),
                Some(p) => times.partition_point(|&t| t <= p),
            };
            i.checked_sub(1).map(|i| times[i])
        }
    }
}

/// Reference feasibility by trying every timestamp combination.
pub fn exhaustive_feasible(nodes: &[u64], oracle: &EdgeOracle, opts: &CheckOptions) -> bool {
    fn go(nodes: &[u64], prev: Option<Timestamp>, oracle: &EdgeOracle, opts: &CheckOptions) -> bool {
        if nodes.len() < 2 {
            return true;
        }
        let (s, d) = opts.edge(nodes[0], nodes[1]);
        oracle
            .times(s, d)
            .iter()
            .any(|&t| opts.follows(prev, t) && go(&nodes[1..], Some(t), oracle, opts))
    }
    go(nodes, None, oracle, opts)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub total_walks: u64,
    pub valid_walks: u64,
    pub total_hops: u64,
    pub valid_hops: u64,
    pub first_violation_per_walk: Vec<Option<u32>>,
}

impl ValidityReport {
    /// Percentage of valid hops; 100 when there are none.
    pub fn hop_percent(&self) -> f64 {
        percent(self.valid_hops, self.total_hops)
    }

    /// Percentage of valid walks; 100 when there are none.
    pub fn walk_percent(&self) -> f64 {
        percent(self.valid_walks, self.total_walks)
    }

    pub fn all_valid(&self) -> bool {
        self.valid_walks == self.total_walks && self.valid_hops == self.total_hops
    }
}

fn percent(num: u64, den: u64) -> f64 {
    if den == 0 {
        100.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "total_walks={}", self.total_walks)?;
        writeln!(f, "valid_walks={}", self.valid_walks)?;
        writeln!(f, "total_hops={}", self.total_hops)?;
        writeln!(f, "valid_hops={}", self.valid_hops)?;
        writeln!(f, "valid_walk_percent={:.4}", self.walk_percent())?;
        write!(f, "valid_hop_percent={:.4}", self.hop_percent())
    }
}

pub fn summarize<I: IntoIterator<Item = WalkCheck>>(checks: I) -> ValidityReport {
    let mut r = ValidityReport::default();
    for c in checks {
        r.total_walks += 1;
        r.valid_walks += u64::from(c.is_valid());
        r.total_hops += u64::from(c.hops);
        r.valid_hops += u64::from(c.valid_hops);
        r.first_violation_per_walk.push(c.first_violation);
    }
    r
}

/// Audit every walk of `walks`, translating the store's dense ids back to
/// external ids first.
pub fn check_walkset(store: &EdgeStore, walks: &WalkSet, oracle: &EdgeOracle, opts: &CheckOptions) -> ValidityReport {
    let checks: Vec<WalkCheck> = (0..walks.len())
        .into_par_iter()
        .map_init(Vec::new, |buf, i| {
            buf.clear();
            buf.extend(
                walks
                    .nodes(i)
                    .iter()
                    .zip(walks.times(i))
                    .map(|(&v, &t)| (store.external_id(v), (t != NO_TIME).then_some(t))),
            );
            check_timed_walk(buf, oracle, opts)
        })
        .collect();
    summarize(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const A: u64 = 1;
    const B: u64 = 2;
    const C: u64 = 3;

    fn oracle(edges: &[(u64, u64, u64)]) -> EdgeOracle {
        let e: Vec<TemporalEdge> = edges.iter().map(|&(s, t, ts)| TemporalEdge::new(s, t, ts)).collect();
        EdgeOracle::new(&e, false)
    }

    #[test]
    fn timed_examples() {
        let o = oracle(&[(A, B, 1), (B, C, 2)]);
        let opts = CheckOptions::default();
        let single = check_timed_walk(&[(A, Some(0))], &o, &opts);
        assert_eq!((single.hops, single.valid_hops, single.is_valid()), (0, 0, true));

        let ok = check_timed_walk(&[(A, Some(0)), (B, Some(1)), (C, Some(2))], &o, &opts);
        assert_eq!((ok.hops, ok.valid_hops), (2, 2));

        let o = oracle(&[(A, B, 1), (B, C, 1)]);
        let bad = check_timed_walk(&[(A, Some(0)), (B, Some(1)), (C, Some(1))], &o, &opts);
        assert_eq!(bad.first_violation, Some(1));
        assert_eq!(bad.valid_hops, 1);
        let loose = CheckOptions { strict: false, ..opts };
        assert!(check_timed_walk(&[(A, Some(0)), (B, Some(1)), (C, Some(1))], &o, &loose).is_valid());
    }

    #[test]
    fn start_sentinel_and_missing_edges() {
        let o = oracle(&[(A, B, 1)]);
        let opts = CheckOptions::default();
        assert!(check_timed_walk(&[(A, None), (B, Some(1))], &o, &opts).is_valid());
        assert!(!check_timed_walk(&[(A, None), (B, Some(2))], &o, &opts).is_valid());
        assert!(!check_timed_walk(&[(B, None), (A, Some(1))], &o, &opts).is_valid());
        let undirected = EdgeOracle::new(&[TemporalEdge::new(A, B, 1)], true);
        assert!(check_timed_walk(&[(B, None), (A, Some(1))], &undirected, &opts).is_valid());
    }

    #[test]
    fn backward_walks_reverse_edges_and_time() {
        let o = oracle(&[(A, B, 1), (B, C, 2)]);
        let opts = CheckOptions {
            direction: Direction::Backward,
            strict: true,
        };
        assert!(check_timed_walk(&[(C, None), (B, Some(2)), (A, Some(1))], &o, &opts).is_valid());
        assert!(check_untimed_walk_greedy(&[C, B, A], &o, &opts).is_valid());
        assert_eq!(greedy_assignment(&[C, B, A], &o, &opts), Ok(vec![2, 1]));
    }

    #[test]
    fn greedy_examples() {
        let opts = CheckOptions::default();
        let o = oracle(&[(A, B, 1), (A, B, 5), (B, C, 3), (B, C, 7)]);
        assert_eq!(greedy_assignment(&[A, B, C], &o, &opts), Ok(vec![1, 3]));
        let o = oracle(&[(A, B, 5), (B, C, 3)]);
        assert_eq!(greedy_assignment(&[A, B, C], &o, &opts), Err(1));
        assert_eq!(
            check_untimed_walk_greedy(&[A, B, C], &o, &opts).first_violation,
            Some(1)
        );
        assert!(check_untimed_walk_greedy(&[A], &o, &opts).is_valid());
    }

    #[test]
    fn greedy_restarts_after_a_violation() {
        // Hop 1 is infeasible; hop 2 is scored fresh.
        let o = oracle(&[(A, B, 5), (B, C, 3), (C, A, 4)]);
        let c = check_untimed_walk_greedy(&[A, B, C, A], &o, &CheckOptions::default());
        assert_eq!((c.hops, c.valid_hops, c.first_violation), (3, 2, Some(1)));
    }

    #[test]
    fn summaries() {
        let empty = summarize(Vec::new());
        assert_eq!((empty.hop_percent(), empty.walk_percent()), (100.0, 100.0));
        let mixed = summarize([
            WalkCheck {
                hops: 4,
                valid_hops: 1,
                first_violation: Some(0),
            },
            WalkCheck {
                hops: 2,
                valid_hops: 0,
                first_violation: Some(0),
            },
        ]);
        assert_eq!(mixed.walk_percent(), 0.0);
        assert!(mixed.hop_percent() > 0.0);
        assert_eq!(mixed.first_violation_per_walk, vec![Some(0), Some(0)]);
        let text = mixed.to_string();
        assert!(text.contains("valid_walks=0"));
    }

    proptest! {
        #[test]
        fn greedy_matches_exhaustive(
            edges in proptest::collection::vec((0u64..4, 0u64..4, 0u64..6), 0..=12),
            walk in proptest::collection::vec(0u64..4, 1..6),
            backward in any::<bool>(),
            strict in any::<bool>(),
        ) {
            let o = oracle(&edges);
            let direction = if backward { Direction::Backward } else { Direction::Forward };
            let opts = CheckOptions { direction, strict };
            prop_assert_eq!(
                greedy_assignment(&walk, &o, &opts).is_ok(),
                exhaustive_feasible(&walk, &o, &opts)
            );
            if let Ok(times) = greedy_assignment(&walk, &o, &opts) {
                let timed: Vec<(u64, Option<u64>)> = walk
                    .iter()
                    .zip(std::iter::once(None).chain(times.into_iter().map(Some)))
                    .map(|(&v, t)| (v, t))
                    .collect();
                prop_assert!(check_timed_walk(&timed, &o, &opts).is_valid());
            }
        }
    }
}
