//! Composite vertex-pair similarity.
//!
//! The score of `(u in G1, v in G2)` is the type gate times the mean of the
//! active components: anchor similarity and relative degree distance are
//! always active; neighbor vertex-type and edge-type similarity and vertex and
//! edge attribute similarity join when the inputs carry that metadata.
//!
//! Empty-evidence conventions: anchor similarity 0, degree similarity 1 when
//! both degrees are 0, type histograms 1 when both are empty, attribute
//! similarities 0.

mod external;
mod profile;

use std::collections::HashMap;

pub use external::{
    load_external_similarity, load_weights, parse_external_similarity, parse_weights, ExternalSimilarity,
};
pub use profile::Vocabulary;

use crate::graph::{AttributedGraph, VertexId};
use crate::scalar::Scalar;
use profile::{NumericEdges, Profile};

/// Which optional components take part in the average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Components {
    pub vertex_types: bool,
    pub edge_types: bool,
    pub vertex_attrs: bool,
    pub edge_attrs: bool,
}

impl Components {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn all() -> Self {
        Self {
            vertex_types: true,
            edge_types: true,
            vertex_attrs: true,
            edge_attrs: true,
        }
    }

    /// Activates each component when either graph carries the metadata it
    /// needs (or, for vertex attributes, an external table is configured).
    pub fn detect(g1: &AttributedGraph, g2: &AttributedGraph, external: bool) -> Self {
        let vocab = Vocabulary::new(g1, g2);
        Self {
            vertex_types: g1.has_vertex_types() || g2.has_vertex_types(),
            edge_types: g1.has_edge_types() || g2.has_edge_types(),
            vertex_attrs: external || g1.has_vertex_attrs() || g2.has_vertex_attrs(),
            edge_attrs: !vocab.numeric_columns().is_empty() || !vocab.set_columns().is_empty(),
        }
    }

    /// Number of averaged components, the two structural ones included.
    pub fn count(&self) -> usize {
        2 + [self.vertex_types, self.edge_types, self.vertex_attrs, self.edge_attrs]
            .iter()
            .filter(|&&b| b)
            .count()
    }
}

/// Similarity tunables.
#[derive(Debug, Clone)]
pub struct SimilarityConfig<T> {
    /// Weight per vertex attribute token; unlisted tokens weigh 1.
    pub token_weights: HashMap<String, T>,
    /// Two numeric edge values are close when they differ by less than this.
    pub closeness: T,
    /// Forces the component mask instead of detecting it from the graphs.
    pub components: Option<Components>,
    /// Replaces vertex attribute similarity when present.
    pub external: Option<ExternalSimilarity<T>>,
}

impl<T: Scalar> Default for SimilarityConfig<T> {
    fn default() -> Self {
        Self {
            token_weights: HashMap::new(),
            closeness: T::one(),
            components: None,
            external: None,
        }
    }
}

/// Anchor set in the form the anchor similarity needs.
#[derive(Debug, Clone)]
pub struct AnchorIndex {
    image: Vec<Option<VertexId>>,
    is_image: Vec<bool>,
    /// Per G1 vertex: sorted images of its anchor neighbors.
    neighbor_images: Vec<Vec<VertexId>>,
    /// Per G2 vertex: number of anchor images among its neighbors.
    image_neighbors: Vec<u32>,
}

impl AnchorIndex {
    pub fn new(g1: &AttributedGraph, g2: &AttributedGraph, pairs: &[(VertexId, VertexId)]) -> Self {
        let mut image = vec![None; g1.vertex_count()];
        let mut is_image = vec![false; g2.vertex_count()];
        for &(u, v) in pairs {
            image[u as usize] = Some(v);
            is_image[v as usize] = true;
        }
        let neighbor_images = g1
            .vertices()
            .map(|u| {
                let mut imgs: Vec<VertexId> = g1.neighbors(u).iter().filter_map(|&w| image[w as usize]).collect();
                imgs.sort_unstable();
                imgs
            })
            .collect();
        let image_neighbors = g2
            .vertices()
            .map(|v| g2.neighbors(v).iter().filter(|&&x| is_image[x as usize]).count() as u32)
            .collect();
        Self {
            image,
            is_image,
            neighbor_images,
            image_neighbors,
        }
    }

    /// Index over no anchors.
    pub fn empty(g1: &AttributedGraph, g2: &AttributedGraph) -> Self {
        Self::new(g1, g2, &[])
    }

    pub fn image(&self, u: VertexId) -> Option<VertexId> {
        self.image[u as usize]
    }

    pub fn is_image(&self, v: VertexId) -> bool {
        self.is_image[v as usize]
    }
}

/// Score with its per-component breakdown. Inactive components are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityScore<T> {
    pub total: T,
    pub tau: T,
    pub anchor: T,
    pub degree: T,
    pub vertex_types: Option<T>,
    pub edge_types: Option<T>,
    pub vertex_attrs: Option<T>,
    pub edge_attrs: Option<T>,
}

impl<T: Scalar> SimilarityScore<T> {
    /// `tau / m * sum(active components)`.
    pub fn combine(
        tau: T,
        anchor: T,
        degree: T,
        vertex_types: Option<T>,
        edge_types: Option<T>,
        vertex_attrs: Option<T>,
        edge_attrs: Option<T>,
    ) -> Self {
        let optional = [vertex_types, edge_types, vertex_attrs, edge_attrs];
        let m = 2 + optional.iter().filter(|c| c.is_some()).count();
        let sum = anchor + degree + optional.iter().flatten().copied().sum::<T>();
        Self {
            total: tau * sum / T::of_usize(m),
            tau,
            anchor,
            degree,
            vertex_types,
            edge_types,
            vertex_attrs,
            edge_attrs,
        }
    }
}

/// Relative degree distance `(1 + 2 |d1 - d2| / (d1 + d2))^-1`; 1 when both are 0.
pub fn relative_degree_distance<T: Scalar>(d1: usize, d2: usize) -> T {
    if d1 + d2 == 0 {
        return T::one();
    }
    let two = T::of_f64(2.0);
    T::one() / (T::one() + two * T::of_usize(d1.abs_diff(d2)) / T::of_usize(d1 + d2))
}

/// `sum_l min / sum_l max` over two sorted `(label, count)` histograms; 1 when both are empty.
pub fn histogram_similarity<T: Scalar>(a: &[(u32, u32)], b: &[(u32, u32)]) -> T {
    let (mut i, mut j) = (0, 0);
    let (mut lo, mut hi) = (0usize, 0usize);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(ka, ca)), Some(&(kb, cb))) if ka == kb => {
                lo += ca.min(cb) as usize;
                hi += ca.max(cb) as usize;
                i += 1;
                j += 1;
            }
            (Some(&(ka, ca)), Some(&(kb, _))) if ka < kb => {
                hi += ca as usize;
                i += 1;
            }
            (Some(&(_, ca)), None) => {
                hi += ca as usize;
                i += 1;
            }
            (_, Some(&(_, cb))) => {
                hi += cb as usize;
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    T::ratio_or(lo, hi, T::one())
}

/// Weighted Jaccard over two sorted token sets; 0 when both are empty.
fn weighted_jaccard<T: Scalar>(a: &[u32], b: &[u32], weight: impl Fn(u32) -> T) -> T {
    let (mut i, mut j) = (0, 0);
    let (mut inter, mut union) = (T::zero(), T::zero());
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                inter += weight(x);
                union += weight(x);
                i += 1;
                j += 1;
            }
            (Some(&x), Some(&y)) if x < y => {
                union += weight(x);
                i += 1;
            }
            (Some(&x), None) => {
                union += weight(x);
                i += 1;
            }
            (_, Some(&y)) => {
                union += weight(y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    if union == T::zero() {
        T::zero()
    } else {
        inter / union
    }
}

/// Number of pairs `(x, y)` with `|x - y| < eps` between two sorted lists.
fn close_pairs(a: &[f64], b: &[f64], eps: f64) -> usize {
    // {y : x - y < eps} is a suffix of b and {y : y - x < eps} a prefix;
    // both boundaries only move right as x grows.
    let (mut lo, mut hi) = (0, 0);
    let mut count = 0;
    for &x in a {
        while lo < b.len() && !(x - b[lo] < eps) {
            lo += 1;
        }
        while hi < b.len() && b[hi] - x < eps {
            hi += 1;
        }
        count += hi.saturating_sub(lo);
    }
    count
}

/// Immutable scoring context for one pair of graphs.
pub struct SimilarityContext<'g, T> {
    g1: &'g AttributedGraph,
    g2: &'g AttributedGraph,
    profiles: [Profile; 2],
    components: Components,
    weights: Option<Vec<T>>,
    closeness: T,
    external: Option<HashMap<(VertexId, VertexId), T>>,
}

impl<'g, T: Scalar> SimilarityContext<'g, T> {
    pub fn new(g1: &'g AttributedGraph, g2: &'g AttributedGraph, cfg: &SimilarityConfig<T>) -> Self {
        let vocab = Vocabulary::new(g1, g2);
        let components = cfg
            .components
            .unwrap_or_else(|| Components::detect(g1, g2, cfg.external.is_some()));
        let weights = (!cfg.token_weights.is_empty()).then(|| {
            vocab
                .vertex_token_names()
                .iter()
                .map(|t| cfg.token_weights.get(t).copied().unwrap_or_else(T::one))
                .collect()
        });
        Self {
            g1,
            g2,
            profiles: [Profile::new(g1, &vocab, 0), Profile::new(g2, &vocab, 1)],
            components,
            weights,
            closeness: cfg.closeness,
            external: cfg.external.as_ref().map(ExternalSimilarity::index),
        }
    }

    pub fn components(&self) -> Components {
        self.components
    }

    pub fn graphs(&self) -> (&'g AttributedGraph, &'g AttributedGraph) {
        (self.g1, self.g2)
    }

    #[inline]
    pub fn tau(&self, u: VertexId, v: VertexId) -> T {
        if self.profiles[0].vertex_type[u as usize] == self.profiles[1].vertex_type[v as usize] {
            T::one()
        } else {
            T::zero()
        }
    }

    /// Fraction of anchors around `u` and `v` that correspond; a matched
    /// anchor pair counts once in the denominator.
    pub fn anchor_similarity(&self, u: VertexId, v: VertexId, anchors: &AnchorIndex) -> T {
        let imgs = &anchors.neighbor_images[u as usize];
        let nv = self.g2.neighbors(v);
        let common = imgs.iter().filter(|&x| nv.binary_search(x).is_ok()).count();
        let total = imgs.len() + anchors.image_neighbors[v as usize] as usize - common;
        T::ratio_or(common, total, T::zero())
    }

    pub fn relative_degree(&self, u: VertexId, v: VertexId) -> T {
        relative_degree_distance(self.g1.degree(u), self.g2.degree(v))
    }

    pub fn neighbor_vertex_types(&self, u: VertexId, v: VertexId) -> T {
        histogram_similarity(self.profiles[0].neighbor_types.get(u), self.profiles[1].neighbor_types.get(v))
    }

    pub fn neighbor_edge_types(&self, u: VertexId, v: VertexId) -> T {
        histogram_similarity(self.profiles[0].edge_types.get(u), self.profiles[1].edge_types.get(v))
    }

    pub fn vertex_attr_similarity(&self, u: VertexId, v: VertexId) -> T {
        if let Some(table) = &self.external {
            return table.get(&(u, v)).copied().unwrap_or_else(T::zero);
        }
        let (a, b) = (self.profiles[0].attrs.get(u), self.profiles[1].attrs.get(v));
        match &self.weights {
            Some(w) => weighted_jaccard(a, b, |t| w[t as usize]),
            None => weighted_jaccard(a, b, |_| T::one()),
        }
    }

    pub fn edge_attr_similarity(&self, u: VertexId, v: VertexId) -> T {
        let (d1, d2) = (self.g1.degree(u), self.g2.degree(v));
        if d1 == 0 || d2 == 0 {
            return T::zero();
        }
        let eps = self.closeness.as_f64();
        match (&self.profiles[0].numeric, &self.profiles[1].numeric) {
            (NumericEdges::Single(a), NumericEdges::Single(b)) => {
                T::ratio_or(close_pairs(a.get(u), b.get(v), eps), d1 * d2, T::zero())
            }
            (NumericEdges::Multi { width, rows: a }, NumericEdges::Multi { rows: b, .. }) => {
                let close = |x: &[Option<f64>], y: &[Option<f64>]| {
                    x.iter()
                        .zip(y)
                        .all(|(p, q)| matches!((p, q), (Some(p), Some(q)) if (p - q).abs() < eps))
                };
                let count: usize = a
                    .get(u)
                    .chunks(*width)
                    .map(|x| b.get(v).chunks(*width).filter(|y| close(x, y)).count())
                    .sum();
                T::ratio_or(count, d1 * d2, T::zero())
            }
            _ => {
                let (a, b) = (self.profiles[0].edge_tokens.get(u), self.profiles[1].edge_tokens.get(v));
                histogram_similarity_or_zero(a, b)
            }
        }
    }

    /// Full breakdown.
    pub fn sigma(&self, u: VertexId, v: VertexId, anchors: &AnchorIndex) -> SimilarityScore<T> {
        let c = self.components;
        SimilarityScore::combine(
            self.tau(u, v),
            self.anchor_similarity(u, v, anchors),
            self.relative_degree(u, v),
            c.vertex_types.then(|| self.neighbor_vertex_types(u, v)),
            c.edge_types.then(|| self.neighbor_edge_types(u, v)),
            c.vertex_attrs.then(|| self.vertex_attr_similarity(u, v)),
            c.edge_attrs.then(|| self.edge_attr_similarity(u, v)),
        )
    }

    /// Total score only; skips the components when the type gate is closed.
    #[inline]
    pub fn score(&self, u: VertexId, v: VertexId, anchors: &AnchorIndex) -> T {
        if self.tau(u, v) == T::zero() {
            return T::zero();
        }
        self.sigma(u, v, anchors).total
    }
}

/// Multiset Jaccard with the 0/0 case mapped to 0.
fn histogram_similarity_or_zero<T: Scalar>(a: &[(u32, u32)], b: &[(u32, u32)]) -> T {
    if a.is_empty() && b.is_empty() {
        T::zero()
    } else {
        histogram_similarity(a, b)
    }
}

#[cfg(test)]
mod tests;
