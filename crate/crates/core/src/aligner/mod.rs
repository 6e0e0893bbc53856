//! Iterative alignment driver.
//!
//! Each iteration computes BFS rows for new anchors, selects and pairs vantage
//! anchors, embeds both graphs, buckets the positions, keeps the top-k
//! bucket-local candidates per graph-2 vertex and matches them greedily. The
//! best mapped pairs then join the anchor set, whose growth doubles every
//! iteration until it passes a cap and restarts from the initial anchors.
//! The loop ends after a fixed number of iterations or once the mapping grows
//! by no more than a set ratio.

mod candidates;
mod greedy;
mod output;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::Instant;

use serde::Serialize;

pub use candidates::{comparison_scopes, top_similars, CandidateLists, TopSimilars};
pub use greedy::{greedy_map, GreedyStats, Matching};
pub use output::{parse_mapping, read_mapping, write_mapping, MappingRow};

use crate::anchors::{
    bootstrap_anchors, find_central_anchors, find_vantage_anchors, pair_and_order, AnchorError, DistanceTable,
    SelectionConfig, VantagePairList,
};
use crate::embedding::{EmbeddingFrame, LeafId, Positions, Side};
use crate::graph::{AnchorMap, AnchorSource, AttributedGraph, VertexId};
use crate::scalar::Scalar;
use crate::similarity::{AnchorIndex, Components, SimilarityConfig, SimilarityContext};

/// Driver tunables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignConfig {
    /// Quadtree leaf capacity.
    pub bucket_size: usize,
    /// Candidates kept per graph-2 vertex.
    pub top_k: usize,
    pub max_iterations: usize,
    /// Stop once `|mapping| / |previous mapping|` is at most this.
    pub convergence: f64,
    /// Anchor growth past this restarts from the initial anchors.
    pub anchor_cap: usize,
    /// Compare against touching buckets as well as the own bucket.
    pub neighbors: bool,
    pub selection: SelectionConfig,
    /// Keep per-iteration bucket assignments and mappings for evaluation.
    #[serde(skip)]
    pub record_trace: bool,
}

impl Default for AlignConfig {
    fn default() -> Self {
        Self {
            bucket_size: 500,
            top_k: 3,
            max_iterations: 20,
            convergence: 1.02,
            anchor_cap: 1000,
            neighbors: true,
            selection: SelectionConfig::default(),
            record_trace: false,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("convergence ratio must be greater than 1, got {0}")]
    Convergence(f64),
}

impl AlignConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.bucket_size == 0 {
            return Err(ConfigError::NotPositive("bucket size"));
        }
        if self.top_k == 0 {
            return Err(ConfigError::NotPositive("top-k"));
        }
        if self.anchor_cap == 0 {
            return Err(ConfigError::NotPositive("anchor cap"));
        }
        if !(self.convergence > 1.0) || !self.convergence.is_finite() {
            return Err(ConfigError::Convergence(self.convergence));
        }
        Ok(())
    }
}

/// Why the driver stopped.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum StopReason {
    /// Mapping growth fell to the convergence ratio.
    Converged,
    IterationLimit,
    /// No usable vantage anchor pair; the mapping is partial.
    Aborted { reason: String },
}

/// Counters of one iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationReport {
    pub iteration: usize,
    pub anchors: usize,
    pub new_bfs_rows: usize,
    pub central_anchors: usize,
    pub vantage_anchors: usize,
    pub vantage_pairs: usize,
    pub degenerate_vantage: bool,
    pub leaves: usize,
    pub tree_depth: u32,
    pub unpositioned: usize,
    /// Pairs in bucket scope: sum over buckets of `|B ∩ V2| * |scope(B) ∩ V1|`.
    pub compared: u64,
    pub gain: f64,
    pub candidates: usize,
    pub sweeps: usize,
    pub proposals: usize,
    /// Mapping size after this iteration, anchors included.
    pub mapped: usize,
    /// Mapping size before this iteration.
    pub previous: usize,
    /// Pairs also present before this iteration.
    pub retained: usize,
}

/// Summary of a run. Contains no timings, so equal inputs give equal reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub vertices: [usize; 2],
    pub edges: [usize; 2],
    pub anchor_source: &'static str,
    pub initial_anchors: usize,
    pub components: ComponentsEcho,
    pub iterations: usize,
    pub stop: StopReason,
    pub mapped: usize,
    /// Largest per-iteration compared count.
    pub compared: u64,
    pub compared_total: u64,
    /// `1 - compared / (|V1| |V2|)` for the largest per-iteration count.
    pub gain: f64,
    /// Anchor pairs with cached BFS rows.
    pub bfs_rows: usize,
    /// Distinct anchor pairs used by some iteration.
    pub distinct_anchors: usize,
    pub per_iteration: Vec<IterationReport>,
    pub config: AlignConfig,
}

/// Active similarity components, for the report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentsEcho {
    pub vertex_types: bool,
    pub edge_types: bool,
    pub vertex_attrs: bool,
    pub edge_attrs: bool,
}

impl From<Components> for ComponentsEcho {
    fn from(c: Components) -> Self {
        Self {
            vertex_types: c.vertex_types,
            edge_types: c.edge_types,
            vertex_attrs: c.vertex_attrs,
            edge_attrs: c.edge_attrs,
        }
    }
}

/// Wall time per phase of one iteration, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PhaseTimes {
    pub bfs: f64,
    pub anchor_selection: f64,
    pub embedding: f64,
    pub bucketing: f64,
    pub candidates: f64,
    pub mapping: f64,
    pub growth: f64,
}

/// Per-iteration data needed to recover which pairs were compared.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct IterationTrace {
    /// Bucket of every vertex, per side.
    pub buckets: [Vec<Option<LeafId>>; 2],
    /// Sorted buckets each bucket was compared against, itself included.
    pub scopes: Vec<Vec<LeafId>>,
    /// Images after the iteration, indexed by graph-1 vertex.
    pub mapping: Vec<Option<VertexId>>,
}

impl IterationTrace {
    /// Whether `(u, v)` fell in the comparison scope of this iteration.
    pub fn compared(&self, u: VertexId, v: VertexId) -> bool {
        match (self.buckets[0][u as usize], self.buckets[1][v as usize]) {
            (Some(bu), Some(bv)) => self.scopes[bv].binary_search(&bu).is_ok(),
            _ => false,
        }
    }

    /// Sum over buckets of `|B ∩ V2| * |scope(B) ∩ V1|`, from the assignments alone.
    pub fn compared_pairs(&self) -> u64 {
        let mut count = [vec![0u64; self.scopes.len()], vec![0u64; self.scopes.len()]];
        for side in 0..2 {
            for b in self.buckets[side].iter().flatten() {
                count[side][*b] += 1;
            }
        }
        self.scopes
            .iter()
            .enumerate()
            .map(|(b, scope)| count[1][b] * scope.iter().map(|&s| count[0][s]).sum::<u64>())
            .sum()
    }
}

/// Result of a run.
#[derive(Debug, Clone)]
pub struct Alignment<T> {
    pub mapping: Matching<T>,
    /// Iteration in which each mapped pair first appeared; 0 for initial anchors.
    pub found: HashMap<(VertexId, VertexId), usize>,
    pub anchors: AnchorMap,
    pub report: RunReport,
    pub timings: Vec<PhaseTimes>,
    pub trace: Option<Vec<IterationTrace>>,
}

impl<T: Scalar> Alignment<T> {
    pub fn aborted(&self) -> bool {
        matches!(self.report.stop, StopReason::Aborted { .. })
    }

    /// `(u, v, score, iteration found)` in ascending `u`.
    pub fn rows(&self) -> impl Iterator<Item = (VertexId, VertexId, T, usize)> + '_ {
        self.mapping
            .pairs()
            .map(|(u, v, s)| (u, v, s, self.found.get(&(u, v)).copied().unwrap_or(0)))
    }
}

struct Selection {
    pairs: VantagePairList,
    central: usize,
    vantage: usize,
    degenerate: bool,
}

fn select_vantage(g1: &AttributedGraph, table: &DistanceTable, anchors: &[(VertexId, VertexId)], cfg: &SelectionConfig) -> Result<Selection, AnchorError> {
    let view = table.view(anchors);
    let mut s1: Vec<VertexId> = anchors.iter().map(|p| p.0).collect();
    s1.sort_unstable();
    let central = find_central_anchors(g1, &s1, &view, cfg.central_threshold, cfg.central_log);
    let non_central: Vec<VertexId> = s1.iter().copied().filter(|u| !central.contains(u)).collect();
    if central.is_empty() {
        return Err(AnchorError::TooFewVantageAnchors(0));
    }
    let vantage = find_vantage_anchors(&non_central, &central, &view);
    let pairs = pair_and_order(&vantage.anchors, &view)?;
    Ok(Selection {
        pairs,
        central: central.len(),
        vantage: vantage.anchors.len(),
        degenerate: vantage.degenerate,
    })
}

/// Anchor set of the driver and the number of anchors the next growth step adds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorGrowth {
    pub initial: Vec<(VertexId, VertexId)>,
    pub current: Vec<(VertexId, VertexId)>,
    pub size: usize,
}

impl AnchorGrowth {
    pub fn new(initial: Vec<(VertexId, VertexId)>) -> Self {
        Self {
            size: initial.len(),
            current: initial.clone(),
            initial,
        }
    }
}

/// Restarts from the initial anchors when the growth size exceeds `cap`, then
/// adds up to `size` mapped non-anchor pairs by score (descending, ties to the
/// lower graph-1 id) and doubles the size. Returns how many were added.
pub fn grow_anchors<T: Scalar>(state: &mut AnchorGrowth, mu: &Matching<T>, cap: usize) -> usize {
    if state.size > cap {
        state.current = state.initial.clone();
        state.size = state.initial.len();
    }
    let held: HashSet<VertexId> = state.current.iter().map(|p| p.0).collect();
    let mut eligible: Vec<(VertexId, VertexId, T)> = mu.pairs().filter(|(u, _, _)| !held.contains(u)).collect();
    eligible.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
    let before = state.current.len();
    state
        .current
        .extend(eligible.into_iter().take(state.size).map(|(u, v, _)| (u, v)));
    state.size *= 2;
    state.current.len() - before
}

/// Aligner over a fixed pair of graphs.
pub struct Aligner<'g, T> {
    g1: &'g AttributedGraph,
    g2: &'g AttributedGraph,
    ctx: SimilarityContext<'g, T>,
    cfg: AlignConfig,
}

impl<'g, T: Scalar> Aligner<'g, T> {
    pub fn new(g1: &'g AttributedGraph, g2: &'g AttributedGraph, cfg: AlignConfig, sim: &SimilarityConfig<T>) -> Self {
        Self {
            g1,
            g2,
            ctx: SimilarityContext::new(g1, g2, sim),
            cfg,
        }
    }

    pub fn context(&self) -> &SimilarityContext<'g, T> {
        &self.ctx
    }

    pub fn config(&self) -> &AlignConfig {
        &self.cfg
    }

    /// Anchors from the best anchor-free scores among high-degree vertices.
    pub fn bootstrap(&self) -> Result<AnchorMap, AnchorError> {
        let empty = AnchorIndex::empty(self.g1, self.g2);
        bootstrap_anchors(self.g1, self.g2, |u, v| self.ctx.score(u, v, &empty), self.cfg.selection.bootstrap_log)
    }

    /// Positions of both graphs computed from `anchors` alone, as in a first iteration.
    pub fn embed(&self, anchors: &AnchorMap) -> Result<Positions<T>, AnchorError> {
        let (n1, n2) = (self.g1.vertex_count(), self.g2.vertex_count());
        let mut table = DistanceTable::new();
        table.ensure(self.g1, self.g2, anchors.pairs());
        let selection = select_vantage(self.g1, &table, anchors.pairs(), &self.cfg.selection)?;
        let mut image = vec![None; n1];
        for &(u, v) in anchors.pairs() {
            image[u as usize] = Some(v);
        }
        let frame = EmbeddingFrame::<T>::new(&selection.pairs, &table, |u| image[u as usize].expect("anchor image"));
        Ok(frame.embed_all(n1, n2))
    }

    /// Runs the iterations from the given anchors, or from bootstrapped ones.
    pub fn run(&self, anchors: Option<&AnchorMap>) -> Result<Alignment<T>, AnchorError> {
        let (g1, g2, cfg) = (self.g1, self.g2, &self.cfg);
        let (n1, n2) = (g1.vertex_count(), g2.vertex_count());
        let initial_map = match anchors {
            Some(a) => a.clone(),
            None => self.bootstrap()?,
        };
        let mut growth = AnchorGrowth::new(initial_map.pairs().to_vec());
        let mut fallback_tried = initial_map.source() == AnchorSource::Bootstrapped;

        let mut mu = Matching::new(n1, n2);
        for &(u, v) in &growth.current {
            mu.pin(u, v);
        }
        let mut found: HashMap<(VertexId, VertexId), usize> = growth.current.iter().map(|&p| (p, 0)).collect();
        let mut previous: Option<usize> = None;
        let mut table = DistanceTable::new();
        let mut used: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
        let mut per_iteration = Vec::new();
        let mut timings = Vec::new();
        let mut trace = cfg.record_trace.then(Vec::new);
        let mut stop = StopReason::IterationLimit;
        let total_pairs = n1 as f64 * n2 as f64;
        let gain_of = |compared: u64| if total_pairs > 0.0 { 1.0 - compared as f64 / total_pairs } else { 1.0 };

        for iteration in 1..=cfg.max_iterations {
            if let Some(p) = previous {
                if p > 0 && mu.len() as f64 / p as f64 <= cfg.convergence {
                    stop = StopReason::Converged;
                    break;
                }
            }
            let mut times = PhaseTimes::default();

            let clock = Instant::now();
            let anchors = growth.current.clone();
            let mut new_rows = table.ensure(g1, g2, &anchors);
            times.bfs = clock.elapsed().as_secs_f64();

            let clock = Instant::now();
            let selection = match select_vantage(g1, &table, &growth.current, &cfg.selection) {
                Ok(s) => Ok(s),
                Err(e) if !fallback_tried => {
                    fallback_tried = true;
                    log::warn!("{e}; adding bootstrapped anchors");
                    let extra = self.bootstrap()?;
                    for &(u, v) in extra.pairs() {
                        if mu.image(u).is_none() && mu.owner(v).is_none() {
                            growth.initial.push((u, v));
                            growth.current.push((u, v));
                            mu.pin(u, v);
                            found.insert((u, v), 0);
                        }
                    }
                    new_rows += table.ensure(g1, g2, &growth.current);
                    select_vantage(g1, &table, &growth.current, &cfg.selection)
                }
                Err(e) => Err(e),
            };
            let selection = match selection {
                Ok(s) => s,
                Err(e) => {
                    log::error!("iteration {iteration}: {e}");
                    stop = StopReason::Aborted { reason: e.to_string() };
                    break;
                }
            };
            let anchors = growth.current.clone();
            used.extend(anchors.iter().copied());
            times.anchor_selection = clock.elapsed().as_secs_f64();

            let clock = Instant::now();
            let mut image = vec![None; n1];
            for &(u, v) in &anchors {
                image[u as usize] = Some(v);
            }
            let frame = EmbeddingFrame::<T>::new(&selection.pairs, &table, |u| image[u as usize].expect("anchor image"));
            let positions = frame.embed_all(n1, n2);
            times.embedding = clock.elapsed().as_secs_f64();

            let clock = Instant::now();
            let tree = positions.bucket_tree(cfg.bucket_size);
            let scopes = comparison_scopes(&tree, cfg.neighbors);
            times.bucketing = clock.elapsed().as_secs_f64();

            let clock = Instant::now();
            let index = AnchorIndex::new(g1, g2, &anchors);
            let mut next = Matching::new(n1, n2);
            for &(u, v) in &anchors {
                next.pin(u, v);
            }
            let top = top_similars(
                &tree,
                &scopes,
                n2,
                cfg.top_k,
                |side, x| match side {
                    Side::G1 => !next.is_pinned(x),
                    Side::G2 => next.owner(x).is_none(),
                },
                |u, v| self.ctx.score(u, v, &index),
            );
            times.candidates = clock.elapsed().as_secs_f64();

            let clock = Instant::now();
            let stats = greedy_map(&top.lists, &mut next);
            let retained = next.pairs().filter(|&(u, v, _)| mu.image(u) == Some(v)).count();
            for (u, v, _) in next.pairs() {
                found.entry((u, v)).or_insert(iteration);
            }
            times.mapping = clock.elapsed().as_secs_f64();

            let report = IterationReport {
                iteration,
                anchors: anchors.len(),
                new_bfs_rows: new_rows,
                central_anchors: selection.central,
                vantage_anchors: selection.vantage,
                vantage_pairs: selection.pairs.len(),
                degenerate_vantage: selection.degenerate,
                leaves: tree.leaf_count(),
                tree_depth: tree.depth(),
                unpositioned: positions.unpositioned(),
                compared: top.compared,
                gain: gain_of(top.compared),
                candidates: top.lists.entries(),
                sweeps: stats.sweeps,
                proposals: stats.proposals,
                mapped: next.len(),
                previous: mu.len(),
                retained,
            };
            log::info!(
                "iteration {iteration}: {} anchors, {} vantage pairs, {} leaves, {} compared, {} mapped",
                report.anchors,
                report.vantage_pairs,
                report.leaves,
                report.compared,
                report.mapped
            );
            if let Some(t) = trace.as_mut() {
                t.push(IterationTrace {
                    buckets: tree.assignments(n1, n2),
                    scopes,
                    mapping: next.images(),
                });
            }
            per_iteration.push(report);
            previous = Some(mu.len());
            mu = next;

            let clock = Instant::now();
            grow_anchors(&mut growth, &mu, cfg.anchor_cap);
            times.growth = clock.elapsed().as_secs_f64();
            timings.push(times);
        }

        let compared = per_iteration.iter().map(|r| r.compared).max().unwrap_or(0);
        let report = RunReport {
            vertices: [n1, n2],
            edges: [g1.edge_count(), g2.edge_count()],
            anchor_source: match initial_map.source() {
                AnchorSource::UserProvided => "user",
                AnchorSource::Bootstrapped => "bootstrapped",
            },
            initial_anchors: growth.initial.len(),
            components: self.ctx.components().into(),
            iterations: per_iteration.len(),
            stop,
            mapped: mu.len(),
            compared,
            compared_total: per_iteration.iter().map(|r| r.compared).sum(),
            gain: gain_of(compared),
            bfs_rows: table.len(),
            distinct_anchors: used.len(),
            per_iteration,
            config: cfg.clone(),
        };
        Ok(Alignment {
            mapping: mu,
            found,
            anchors: initial_map,
            report,
            timings,
            trace,
        })
    }
}

/// Aligns `g1` to `g2`. Bootstraps anchors when none are given.
pub fn align<T: Scalar>(
    g1: &AttributedGraph,
    g2: &AttributedGraph,
    anchors: Option<&AnchorMap>,
    cfg: &AlignConfig,
    sim: &SimilarityConfig<T>,
) -> Result<Alignment<T>, AnchorError> {
    Aligner::new(g1, g2, cfg.clone(), sim).run(anchors)
}

#[cfg(test)]
mod tests;
