//! Anchor bootstrapping, central/vantage anchor selection and vantage pairing.
//!
//! All selection steps work in graph-1 id space. Distances come from BFS rows
//! cached in a [`DistanceTable`], keyed by anchor pair so that a graph-1 row and
//! the counterpart graph-2 row are computed together and exactly once.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;

use crate::graph::{AnchorMap, AnchorSource, AttributedGraph, VertexId};
use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AnchorError {
    #[error("cannot bootstrap anchors on an empty graph")]
    EmptyGraph,
    #[error("bootstrap found no pair with a positive similarity")]
    NoBootstrapPairs,
    #[error("need at least 2 mutually reachable vantage anchors, have {0}; supply more anchors or use bootstrapped ones")]
    TooFewVantageAnchors(usize),
}

/// Logarithm base for the size heuristics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
            LogBase::Ten => x.log10(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LogBase::Natural => "e",
            LogBase::Two => "2",
            LogBase::Ten => "10",
        }
    }
}

impl serde::Serialize for LogBase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl std::str::FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "e" | "ln" | "natural" => Ok(LogBase::Natural),
            "2" | "log2" => Ok(LogBase::Two),
            "10" | "log10" => Ok(LogBase::Ten),
            other => Err(format!("unknown log base {other:?} (expected e, 2 or 10)")),
        }
    }
}

/// Hop distances from one source. Stored as bytes when every finite distance fits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistanceRow {
    Narrow(Vec<u8>),
    Wide(Vec<u32>),
}

impl DistanceRow {
    const NARROW_NONE: u8 = u8::MAX;
    const WIDE_NONE: u32 = u32::MAX;

    /// Distance to `v`, or `None` when unreachable.
    #[inline]
    pub fn get(&self, v: VertexId) -> Option<u32> {
        match self {
            DistanceRow::Narrow(d) => match d[v as usize] {
                Self::NARROW_NONE => None,
                x => Some(x as u32),
            },
            DistanceRow::Wide(d) => match d[v as usize] {
                Self::WIDE_NONE => None,
                x => Some(x),
            },
        }
    }

    pub fn len(&self) -> usize {
        match self {
            DistanceRow::Narrow(d) => d.len(),
            DistanceRow::Wide(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Breadth-first hop distances from `source`.
pub fn bfs(g: &AttributedGraph, source: VertexId) -> DistanceRow {
    let n = g.vertex_count();
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    dist[source as usize] = 0;
    queue.push_back(source);
    let mut max = 0;
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        for &w in g.neighbors(u) {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = du + 1;
                max = du + 1;
                queue.push_back(w);
            }
        }
    }
    if max < DistanceRow::NARROW_NONE as u32 {
        DistanceRow::Narrow(
            dist.into_iter()
                .map(|d| if d == u32::MAX { DistanceRow::NARROW_NONE } else { d as u8 })
                .collect(),
        )
    } else {
        DistanceRow::Wide(dist)
    }
}

/// BFS rows of one anchor pair: from `u` in G1 and from its counterpart in G2.
#[derive(Debug, Clone)]
pub struct AnchorRows {
    pub g1: DistanceRow,
    pub g2: DistanceRow,
}

/// Cache of BFS rows keyed by anchor pair. Rows are never evicted.
#[derive(Debug, Default)]
pub struct DistanceTable {
    rows: HashMap<(VertexId, VertexId), AnchorRows>,
}

impl DistanceTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Computes rows for every pair not yet cached, in parallel. Returns how
    /// many pairs were computed.
    pub fn ensure(&mut self, g1: &AttributedGraph, g2: &AttributedGraph, pairs: &[(VertexId, VertexId)]) -> usize {
        let mut missing: Vec<(VertexId, VertexId)> =
            pairs.iter().copied().filter(|p| !self.rows.contains_key(p)).collect();
        missing.sort_unstable();
        missing.dedup();
        let computed: Vec<_> = missing
            .par_iter()
            .map(|&(u, v)| {
                (
                    (u, v),
                    AnchorRows {
                        g1: bfs(g1, u),
                        g2: bfs(g2, v),
                    },
                )
            })
            .collect();
        let n = computed.len();
        self.rows.extend(computed);
        n
    }

    pub fn get(&self, pair: (VertexId, VertexId)) -> Option<&AnchorRows> {
        self.rows.get(&pair)
    }

    /// Number of cached anchor pairs (each holds one BFS row per graph).
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Graph-1 distance view over the given anchor pairs.
    ///
    /// Panics if a pair has no cached rows.
    pub fn view<'a>(&'a self, pairs: &[(VertexId, VertexId)]) -> AnchorView<'a> {
        let rows = pairs
            .iter()
            .map(|p| (p.0, self.rows.get(p).expect("anchor rows computed before use")))
            .collect();
        AnchorView { rows }
    }
}

/// Distance from an anchor (graph-1 id) to any graph-1 vertex.
pub trait AnchorMetric {
    fn distance(&self, anchor: VertexId, other: VertexId) -> Option<u32>;
}

/// Graph-1 rows of the current anchor set, keyed by graph-1 anchor id.
pub struct AnchorView<'a> {
    rows: HashMap<VertexId, &'a AnchorRows>,
}

impl<'a> AnchorView<'a> {
    pub fn rows(&self, anchor: VertexId) -> &'a AnchorRows {
        self.rows[&anchor]
    }
}

impl AnchorMetric for AnchorView<'_> {
    fn distance(&self, anchor: VertexId, other: VertexId) -> Option<u32> {
        self.rows[&anchor].g1.get(other)
    }
}

/// Tunables for anchor selection.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SelectionConfig {
    /// Base of the log in the bootstrap size `ceil(4 log max(|V1|, |V2|))`.
    pub bootstrap_log: LogBase,
    /// Base of the log in the central anchor count `ceil(log |S|)`.
    pub central_log: LogBase,
    /// Anchors within this many hops of an already kept one are not central candidates.
    pub central_threshold: u32,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            bootstrap_log: LogBase::Natural,
            central_log: LogBase::Two,
            central_threshold: 1,
        }
    }
}

/// Target number of bootstrapped anchors, at least one.
pub fn bootstrap_size(n1: usize, n2: usize, base: LogBase) -> usize {
    let n = n1.max(n2).max(1) as f64;
    ((4.0 * base.log(n)).ceil() as usize).max(1)
}

fn top_degree(g: &AttributedGraph, count: usize) -> Vec<VertexId> {
    let mut vs: Vec<VertexId> = g.vertices().collect();
    vs.sort_by_key(|&u| (std::cmp::Reverse(g.degree(u)), u));
    vs.truncate(count);
    vs
}

/// Builds an anchor map when none is supplied: scores all cross pairs among the
/// `2|S|` highest-degree vertices of each graph with `score` and keeps the best
/// `|S|` pairs greedily, each time taking the highest remaining pair whose
/// endpoints are both unused.
pub fn bootstrap_anchors<T, F>(
    g1: &AttributedGraph,
    g2: &AttributedGraph,
    score: F,
    base: LogBase,
) -> Result<AnchorMap, AnchorError>
where
    T: Scalar,
    F: Fn(VertexId, VertexId) -> T + Sync,
{
    if g1.is_empty() || g2.is_empty() {
        return Err(AnchorError::EmptyGraph);
    }
    let target = bootstrap_size(g1.vertex_count(), g2.vertex_count(), base);
    let left = top_degree(g1, 2 * target);
    let right = top_degree(g2, 2 * target);
    let mut scored: Vec<(T, VertexId, VertexId)> = left
        .par_iter()
        .flat_map_iter(|&u| right.iter().map(move |&v| (u, v)))
        .map(|(u, v)| (score(u, v), u, v))
        .filter(|(s, _, _)| *s > T::zero())
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut used_left = std::collections::HashSet::new();
    let mut used_right = std::collections::HashSet::new();
    let mut pairs = Vec::with_capacity(target);
    for (_, u, v) in scored {
        if pairs.len() == target {
            break;
        }
        if !used_left.contains(&u) && !used_right.contains(&v) {
            used_left.insert(u);
            used_right.insert(v);
            pairs.push((u, v));
        }
    }
    if pairs.is_empty() {
        return Err(AnchorError::NoBootstrapPairs);
    }
    Ok(AnchorMap::new(pairs, AnchorSource::Bootstrapped).expect("greedy selection is injective"))
}

/// Picks up to `ceil(log |S|)` (at least one) high-degree anchors that are
/// pairwise more than `threshold` hops apart. `anchors` is scanned in the
/// given order; the result is ordered by degree, descending, ties by id.
pub fn find_central_anchors<M: AnchorMetric>(
    g: &AttributedGraph,
    anchors: &[VertexId],
    metric: &M,
    threshold: u32,
    base: LogBase,
) -> Vec<VertexId> {
    if anchors.is_empty() {
        return Vec::new();
    }
    let mut spread: Vec<VertexId> = Vec::new();
    for &u in anchors {
        let far_from_all = spread
            .iter()
            .all(|&v| metric.distance(v, u).is_none_or(|d| d > threshold));
        if far_from_all {
            spread.push(u);
        }
    }
    let limit = (base.log(anchors.len() as f64).ceil() as usize).max(1);
    spread.sort_by_key(|&u| (std::cmp::Reverse(g.degree(u)), u));
    spread.truncate(limit);
    spread
}

/// Result of vantage anchor selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VantageSelection {
    pub anchors: Vec<VertexId>,
    /// Some central anchor had no assignee, so one farthest assignee was taken
    /// per non-empty central anchor instead.
    pub degenerate: bool,
}

/// Assigns every non-central anchor to its nearest central anchor and takes,
/// per central anchor, the `a` farthest assignees, where `a` is the smallest
/// assignment list size.
pub fn find_vantage_anchors<M: AnchorMetric>(non_central: &[VertexId], central: &[VertexId], metric: &M) -> VantageSelection {
    let mut assigned: Vec<Vec<VertexId>> = vec![Vec::new(); central.len()];
    for &u in non_central {
        let nearest = central
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| metric.distance(c, u).map(|d| (d, c, i)))
            .min();
        if let Some((_, _, i)) = nearest {
            assigned[i].push(u);
        }
    }
    let quota = assigned.iter().map(Vec::len).min().unwrap_or(0);
    let degenerate = quota == 0;
    let per_central = if degenerate { 1 } else { quota };

    let far = |d: Option<u32>| d.map_or(u64::from(u32::MAX), u64::from);
    let mut anchors = Vec::new();
    for (i, &c) in central.iter().enumerate() {
        let mut list = assigned[i].clone();
        list.sort_by_key(|&u| {
            let own = far(metric.distance(c, u));
            let others: u64 = central
                .iter()
                .filter(|&&o| o != c)
                .map(|&o| far(metric.distance(o, u)))
                .sum();
            (std::cmp::Reverse(own), std::cmp::Reverse(others), u)
        });
        anchors.extend(list.into_iter().take(per_central));
    }
    if degenerate {
        log::warn!(
            "a central anchor has no assigned anchors; falling back to {} vantage anchor(s)",
            anchors.len()
        );
    }
    VantageSelection { anchors, degenerate }
}

/// Ordered vantage anchor pairs, in graph-1 ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VantagePairList {
    pub pairs: Vec<(VertexId, VertexId)>,
}

impl VantagePairList {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Pairs each vantage anchor (ascending id) with its farthest remaining
/// reachable anchor, then orders the pairs so that each pair's first anchor is
/// the closest remaining one to the previous pair's first anchor.
///
/// An anchor with no reachable remaining partner is dropped, as is an odd leftover.
pub fn pair_and_order<M: AnchorMetric>(vantage: &[VertexId], metric: &M) -> Result<VantagePairList, AnchorError> {
    if vantage.len() < 2 {
        return Err(AnchorError::TooFewVantageAnchors(vantage.len()));
    }
    let mut remaining: Vec<VertexId> = vantage.to_vec();
    remaining.sort_unstable();
    remaining.dedup();
    let mut pairs = Vec::new();
    while remaining.len() > 1 {
        let u = remaining.remove(0);
        let partner = remaining
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| metric.distance(u, v).map(|d| (d, std::cmp::Reverse(v), i)))
            .max();
        if let Some((_, _, i)) = partner {
            let v = remaining.remove(i);
            pairs.push((u, v));
        }
    }
    if pairs.is_empty() {
        return Err(AnchorError::TooFewVantageAnchors(vantage.len()));
    }
    for i in 1..pairs.len() {
        let prev = pairs[i - 1].0;
        let j = (i..pairs.len())
            .min_by_key(|&j| (metric.distance(prev, pairs[j].0).unwrap_or(u32::MAX), j))
            .unwrap();
        pairs.swap(i, j);
    }
    Ok(VantagePairList { pairs })
}
