//! Per-vertex top-k candidate lists from bucket-local comparisons.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::embedding::{BucketTree, LeafId, Side};
use crate::graph::VertexId;
use crate::scalar::Scalar;

/// Up to `k` graph-1 candidates per graph-2 vertex, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateLists<T> {
    k: usize,
    lists: Vec<Vec<(VertexId, T)>>,
}

/// Candidate order: higher score first, then lower id.
#[inline]
fn better<T: Scalar>(a: (VertexId, T), b: (VertexId, T)) -> Ordering {
    b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0))
}

fn insert_bounded<T: Scalar>(list: &mut Vec<(VertexId, T)>, k: usize, item: (VertexId, T)) {
    if list.len() == k && better(item, list[k - 1]) != Ordering::Less {
        return;
    }
    let at = list.partition_point(|&x| better(x, item) == Ordering::Less);
    list.insert(at, item);
    list.truncate(k);
}

impl<T: Scalar> CandidateLists<T> {
    pub fn new(n2: usize, k: usize) -> Self {
        Self {
            k,
            lists: vec![Vec::new(); n2],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Offers `u` to `v`'s list. Non-positive scores are ignored.
    pub fn insert(&mut self, v: VertexId, u: VertexId, score: T) {
        if score > T::zero() && self.k > 0 {
            insert_bounded(&mut self.lists[v as usize], self.k, (u, score));
        }
    }

    pub fn get(&self, v: VertexId) -> &[(VertexId, T)] {
        &self.lists[v as usize]
    }

    /// Number of graph-2 vertices (list slots).
    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    /// Total number of stored candidates.
    pub fn entries(&self) -> usize {
        self.lists.iter().map(Vec::len).sum()
    }
}

/// Buckets each leaf compares against: itself, plus its touching leaves when
/// `neighbors` is set. Sorted.
pub fn comparison_scopes<T: Scalar>(tree: &BucketTree<T>, neighbors: bool) -> Vec<Vec<LeafId>> {
    (0..tree.bucket_count())
        .into_par_iter()
        .map(|id| {
            let mut scope = if neighbors { tree.neighbor_buckets(id) } else { Vec::new() };
            scope.push(id);
            scope.sort_unstable();
            scope
        })
        .collect()
}

/// Candidate lists and the number of `(v, u)` pairs that fell in scope.
#[derive(Debug, Clone)]
pub struct TopSimilars<T> {
    pub lists: CandidateLists<T>,
    pub compared: u64,
}

/// Scores every graph-2 vertex of each bucket against every graph-1 vertex in
/// the bucket's scope and keeps the best `k` per graph-2 vertex.
///
/// Pairs rejected by `eligible` count as compared but are not scored.
pub fn top_similars<T, E, S>(
    tree: &BucketTree<T>,
    scopes: &[Vec<LeafId>],
    n2: usize,
    k: usize,
    eligible: E,
    score: S,
) -> TopSimilars<T>
where
    T: Scalar,
    E: Fn(Side, VertexId) -> bool + Sync,
    S: Fn(VertexId, VertexId) -> T + Sync,
{
    let per_bucket: Vec<(Vec<(VertexId, Vec<(VertexId, T)>)>, u64)> = (0..tree.bucket_count())
        .into_par_iter()
        .map(|id| {
            let targets: Vec<VertexId> = tree.bucket(id).filter(|e| e.side == Side::G2).map(|e| e.vertex).collect();
            if targets.is_empty() {
                return (Vec::new(), 0);
            }
            let sources: Vec<VertexId> = scopes[id]
                .iter()
                .flat_map(|&b| tree.bucket(b))
                .filter(|e| e.side == Side::G1)
                .map(|e| e.vertex)
                .collect();
            let compared = (targets.len() * sources.len()) as u64;
            let usable: Vec<VertexId> = sources.into_iter().filter(|&u| eligible(Side::G1, u)).collect();
            let out = targets
                .into_iter()
                .filter(|&v| eligible(Side::G2, v))
                .map(|v| {
                    let mut list = Vec::with_capacity(k + 1);
                    if k > 0 {
                        for &u in &usable {
                            let s = score(u, v);
                            if s > T::zero() {
                                insert_bounded(&mut list, k, (u, s));
                            }
                        }
                    }
                    (v, list)
                })
                .collect();
            (out, compared)
        })
        .collect();

    let mut lists = CandidateLists::new(n2, k);
    let mut compared = 0;
    for (rows, c) in per_bucket {
        compared += c;
        for (v, list) in rows {
            lists.lists[v as usize] = list;
        }
    }
    TopSimilars { lists, compared }
}
