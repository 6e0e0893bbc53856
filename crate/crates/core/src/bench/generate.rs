//! Synthetic graphs, priors and anchor samples.

use rand::seq::index::sample;
use rand::Rng;

use crate::graph::{AnchorMap, AnchorSource, AttributedGraph, GraphBuilder, GroundTruth, VertexId};
use crate::similarity::ExternalSimilarity;

/// Parameters of a connected random graph with labeled vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub vertices: usize,
    pub avg_degree: f64,
    /// 0 leaves vertices untyped.
    pub vertex_types: usize,
    pub tokens_per_vertex: usize,
    /// Distinct tokens to draw from.
    pub token_pool: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            vertices: 1000,
            avg_degree: 8.0,
            vertex_types: 64,
            tokens_per_vertex: 3,
            token_pool: 1000,
        }
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        parent[x as usize] = parent[parent[x as usize] as usize];
        x = parent[x as usize];
    }
    x
}

/// Uniform random graph with `round(n * avg_degree / 2)` edges, made connected
/// by linking every smaller component to a random vertex of the largest one.
/// Vertex types and tokens are drawn uniformly.
pub fn synthetic_graph<R: Rng>(spec: &SyntheticSpec, rng: &mut R) -> AttributedGraph {
    let n = spec.vertices;
    let mut b = GraphBuilder::default();
    for i in 0..n {
        let t = if spec.vertex_types > 0 {
            format!("t{}", rng.gen_range(0..spec.vertex_types))
        } else {
            String::new()
        };
        let tokens: Vec<String> = if spec.token_pool > 0 {
            (0..spec.tokens_per_vertex)
                .map(|_| format!("w{}", rng.gen_range(0..spec.token_pool)))
                .collect()
        } else {
            Vec::new()
        };
        b.set_vertex(&i.to_string(), &t, &tokens);
    }
    if n < 2 {
        return b.build();
    }
    let max_edges = n * (n - 1) / 2;
    let target = ((n as f64 * spec.avg_degree / 2.0).round() as usize).min(max_edges);
    let mut parent: Vec<u32> = (0..n as u32).collect();
    let mut added = 0;
    while added < target {
        let (u, v) = (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32));
        if b.add_edge(u, v, "", Vec::new()) {
            added += 1;
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            parent[ru as usize] = rv;
        }
    }
    let mut members: std::collections::BTreeMap<u32, Vec<u32>> = Default::default();
    for u in 0..n as u32 {
        let r = find(&mut parent, u);
        members.entry(r).or_default().push(u);
    }
    let giant = members
        .iter()
        .max_by_key(|(r, m)| (m.len(), std::cmp::Reverse(**r)))
        .map(|(_, m)| m.clone())
        .expect("non-empty graph");
    for (_, comp) in members {
        if comp[0] == giant[0] {
            continue;
        }
        let u = comp[rng.gen_range(0..comp.len())];
        let v = giant[rng.gen_range(0..giant.len())];
        b.add_edge(u, v, "", Vec::new());
    }
    b.build()
}

/// Prior table for a known correspondence: each true pair gets a value in
/// `[0.5, 1]` and `decoys` random other targets per vertex get values in `(0, 0.5)`.
pub fn clone_prior<R: Rng>(truth: &GroundTruth, n2: usize, decoys: usize, rng: &mut R) -> ExternalSimilarity<f64> {
    let mut table = ExternalSimilarity::new();
    for &(u, v) in truth.pairs() {
        table.set(u, v, rng.gen_range(0.5..=1.0));
        for _ in 0..decoys {
            let w = rng.gen_range(0..n2 as VertexId);
            if w != v {
                table.set(u, w, rng.gen_range(f64::MIN_POSITIVE..0.5));
            }
        }
    }
    table
}

/// `count` pairs of `truth` chosen uniformly, in ground-truth order.
pub fn sample_anchors<R: Rng>(truth: &GroundTruth, count: usize, rng: &mut R) -> AnchorMap {
    let count = count.min(truth.len());
    let mut idx = sample(rng, truth.len(), count).into_vec();
    idx.sort_unstable();
    let pairs = idx.into_iter().map(|i| truth.pairs()[i]).collect();
    AnchorMap::new(pairs, AnchorSource::UserProvided).expect("subset of an injective map")
}
