//! Structural and attribute noise with a known ground truth.

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{stream_rng, Stream};
use crate::graph::{AttributedGraph, GraphBuilder, GroundTruth, VertexId};
use crate::scalar::Scalar;
use crate::similarity::ExternalSimilarity;

/// Noise fractions, each in `[0, 1]`. Edge counts are taken from the input graph.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PerturbationSpec {
    pub edge_removal: f64,
    pub vertex_addition: f64,
    pub edge_addition: f64,
    pub attr_noise: f64,
    pub seed: u64,
}

impl PerturbationSpec {
    /// Relabeling only.
    pub fn identity(seed: u64) -> Self {
        Self {
            edge_removal: 0.0,
            vertex_addition: 0.0,
            edge_addition: 0.0,
            attr_noise: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        for (name, value) in [
            ("edge_removal", self.edge_removal),
            ("vertex_addition", self.vertex_addition),
            ("edge_addition", self.edge_addition),
            ("attr_noise", self.attr_noise),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(SpecError { name, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("{name} must lie in [0, 1], got {value}")]
pub struct SpecError {
    pub name: &'static str,
    pub value: f64,
}

fn count(fraction: f64, of: usize) -> usize {
    (fraction * of as f64).floor() as usize
}

/// Replaces `floor(p * total)` uniformly chosen tokens with tokens drawn from `pool`.
fn noisy_tokens<R: Rng>(lists: &mut [Vec<String>], pool: &[String], p: f64, rng: &mut R) {
    let total: usize = lists.iter().map(Vec::len).sum();
    let k = count(p, total);
    if k == 0 || pool.is_empty() {
        return;
    }
    let mut slots: Vec<(usize, usize)> = Vec::with_capacity(total);
    for (i, l) in lists.iter().enumerate() {
        slots.extend((0..l.len()).map(|j| (i, j)));
    }
    let mut chosen = sample(rng, total, k).into_vec();
    chosen.sort_unstable();
    for s in chosen {
        let (i, j) = slots[s];
        lists[i][j] = pool[rng.gen_range(0..pool.len())].clone();
    }
}

fn token_lists(g: &AttributedGraph) -> Vec<Vec<String>> {
    g.vertices()
        .map(|u| g.vertex_attr_names(u).map(str::to_owned).collect())
        .collect()
}

/// Draws a random non-edge, or `None` once the graph is complete.
fn random_non_edge<R: Rng>(b: &GraphBuilder, edges: usize, rng: &mut R) -> Option<(VertexId, VertexId)> {
    let n = b.vertex_count();
    if n < 2 || edges >= n * (n - 1) / 2 {
        return None;
    }
    loop {
        let (u, v) = (rng.gen_range(0..n as VertexId), rng.gen_range(0..n as VertexId));
        if u != v && !b.has_edge(u, v) {
            return Some((u, v));
        }
    }
}

/// Relabeled noisy copy of `g` and the ground truth `u -> perm[u]`.
///
/// Removes `floor(p_e |E|)` edges without replacement, adds `floor(p_v |V|)`
/// vertices that copy the labels of a random original vertex, and adds
/// `floor(p_a |E|)` random new edges. Each added vertex first receives
/// `floor(avg degree)` of those edges, or at least one when the budget is
/// spent. A fraction `p_attr` of vertex tokens is then redrawn from the token
/// pool. Added edges carry no type and blank attributes.
pub fn perturb(g: &AttributedGraph, spec: &PerturbationSpec) -> Result<(AttributedGraph, GroundTruth), SpecError> {
    spec.validate()?;
    if spec.edge_removal == 1.0 {
        log::warn!("removing every edge leaves the copy without structure");
    }
    let n = g.vertex_count();
    let m = g.edge_count();
    let mut rng = stream_rng(spec.seed, Stream::PerturbEdges);
    let mut perm: Vec<VertexId> = (0..n as VertexId).collect();
    perm.shuffle(&mut rng);
    let mut inv = vec![0 as VertexId; n];
    for (u, &p) in perm.iter().enumerate() {
        inv[p as usize] = u as VertexId;
    }

    let added_vertices = count(spec.vertex_addition, n);
    let originals: Vec<VertexId> = (0..added_vertices).map(|_| rng.gen_range(0..n.max(1) as VertexId)).collect();
    let mut types: Vec<&str> = Vec::with_capacity(n + added_vertices);
    let source = |p: usize| if p < n { inv[p] } else { originals[p - n] };
    let mut tokens = token_lists(g);
    let mut labels: Vec<Vec<String>> = Vec::with_capacity(n + added_vertices);
    for p in 0..n + added_vertices {
        let u = source(p);
        types.push(g.vertex_type_names().name(g.vertex_type(u)));
        labels.push(if p < n {
            std::mem::take(&mut tokens[u as usize])
        } else {
            g.vertex_attr_names(u).map(str::to_owned).collect()
        });
    }
    let mut attr_rng = stream_rng(spec.seed, Stream::PerturbAttrs);
    noisy_tokens(&mut labels, g.vertex_tokens().names(), spec.attr_noise, &mut attr_rng);

    let mut b = GraphBuilder::new(g.edge_schema().to_vec());
    for (p, (t, attrs)) in types.iter().zip(&labels).enumerate() {
        b.set_vertex(&p.to_string(), t, attrs);
    }

    let removed = count(spec.edge_removal, m);
    let mut drop = vec![false; m];
    for e in sample(&mut rng, m, removed) {
        drop[e] = true;
    }
    let mut edges = 0;
    for (e, u, v) in g.edges() {
        if !drop[e as usize] {
            let t = g.edge_type_names().name(g.edge_type(e));
            b.add_edge(perm[u as usize], perm[v as usize], t, g.edge_attr_inputs(e));
            edges += 1;
        }
    }

    let mut budget = count(spec.edge_addition, m);
    let per_vertex = if n > 0 { (2 * m / n).max(1) } else { 1 };
    for i in 0..added_vertices {
        let w = (n + i) as VertexId;
        let want = per_vertex.min(budget).max(1).min(w as usize);
        let mut attached = 0;
        while attached < want {
            let x = rng.gen_range(0..w);
            if b.add_edge(w, x, "", b.blank_attrs()) {
                attached += 1;
                edges += 1;
            }
        }
        budget = budget.saturating_sub(attached);
    }
    while budget > 0 {
        let Some((u, v)) = random_non_edge(&b, edges, &mut rng) else {
            break;
        };
        b.add_edge(u, v, "", b.blank_attrs());
        edges += 1;
        budget -= 1;
    }

    let truth = GroundTruth::new((0..n as VertexId).map(|u| (u, perm[u as usize])).collect())
        .expect("a permutation is injective");
    Ok((b.build(), truth))
}

/// Copy of `g` with `floor(p * tokens)` vertex tokens redrawn from its token pool.
pub fn perturb_tokens<R: Rng>(g: &AttributedGraph, p: f64, rng: &mut R) -> AttributedGraph {
    let mut labels = token_lists(g);
    noisy_tokens(&mut labels, g.vertex_tokens().names(), p, rng);
    let mut b = GraphBuilder::new(g.edge_schema().to_vec());
    for u in g.vertices() {
        b.set_vertex(g.ext_id(u), g.vertex_type_names().name(g.vertex_type(u)), &labels[u as usize]);
    }
    for (e, u, v) in g.edges() {
        b.add_edge(u, v, g.edge_type_names().name(g.edge_type(e)), g.edge_attr_inputs(e));
    }
    b.build()
}

/// Copy of `table` with `floor(p * nnz)` non-zero entries set to fresh values in `(0, 1]`.
pub fn perturb_external<T: Scalar, R: Rng>(table: &ExternalSimilarity<T>, p: f64, rng: &mut R) -> ExternalSimilarity<T> {
    let nonzero: Vec<(VertexId, VertexId)> = table.iter().filter(|&(_, x)| x > T::zero()).map(|(k, _)| k).collect();
    let mut out = table.clone();
    let k = count(p.clamp(0.0, 1.0), nonzero.len());
    let mut chosen = sample(rng, nonzero.len(), k).into_vec();
    chosen.sort_unstable();
    for i in chosen {
        let (u, v) = nonzero[i];
        out.set(u, v, T::of_f64(1.0 - rng.gen::<f64>()));
    }
    out
}
