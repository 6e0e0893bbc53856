//! Injective partial mapping and the greedy suitor pass that fills it.

use std::collections::BTreeSet;

use super::candidates::CandidateLists;
use crate::graph::VertexId;
use crate::scalar::Scalar;

/// Injective partial map `V1 -> V2` with a score per pair. Pinned pairs
/// (anchors) are never displaced.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching<T> {
    image: Vec<Option<(VertexId, T)>>,
    owner: Vec<Option<VertexId>>,
    pinned: Vec<bool>,
    len: usize,
}

impl<T: Scalar> Matching<T> {
    pub fn new(n1: usize, n2: usize) -> Self {
        Self {
            image: vec![None; n1],
            owner: vec![None; n2],
            pinned: vec![false; n1],
            len: 0,
        }
    }

    /// Fixes `u -> v` with score 1. Panics if either side is already mapped.
    pub fn pin(&mut self, u: VertexId, v: VertexId) {
        assert!(
            self.image[u as usize].is_none() && self.owner[v as usize].is_none(),
            "pinned pairs must be disjoint"
        );
        self.set(u, v, T::one());
        self.pinned[u as usize] = true;
    }

    fn set(&mut self, u: VertexId, v: VertexId, score: T) {
        if let Some((old, _)) = self.image[u as usize] {
            self.owner[old as usize] = None;
        } else {
            self.len += 1;
        }
        self.image[u as usize] = Some((v, score));
        self.owner[v as usize] = Some(u);
    }

    pub fn image(&self, u: VertexId) -> Option<VertexId> {
        self.image[u as usize].map(|(v, _)| v)
    }

    pub fn score(&self, u: VertexId) -> Option<T> {
        self.image[u as usize].map(|(_, s)| s)
    }

    pub fn owner(&self, v: VertexId) -> Option<VertexId> {
        self.owner[v as usize]
    }

    pub fn is_pinned(&self, u: VertexId) -> bool {
        self.pinned[u as usize]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `(u, v, score)` in ascending `u`.
    pub fn pairs(&self) -> impl Iterator<Item = (VertexId, VertexId, T)> + '_ {
        self.image
            .iter()
            .enumerate()
            .filter_map(|(u, x)| x.map(|(v, s)| (u as VertexId, v, s)))
    }

    /// Images indexed by graph-1 vertex.
    pub fn images(&self) -> Vec<Option<VertexId>> {
        self.image.iter().map(|x| x.map(|(v, _)| v)).collect()
    }
}

/// Outcome counters of one greedy pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GreedyStats {
    pub sweeps: usize,
    pub proposals: usize,
    pub displacements: usize,
}

/// Suitor sweeps over ascending graph-2 ids: each unmatched `v` with
/// candidates left proposes to its best remaining `u`, which accepts when it
/// is free or strictly prefers `v` to its current partner. A displaced
/// partner goes on with its own remaining list. Stops once no unmatched `v`
/// has candidates left.
pub fn greedy_map<T: Scalar>(lists: &CandidateLists<T>, mu: &mut Matching<T>) -> GreedyStats {
    let mut cursor = vec![0usize; lists.len()];
    let mut active: BTreeSet<VertexId> = (0..lists.len() as VertexId)
        .filter(|&v| mu.owner(v).is_none() && !lists.get(v).is_empty())
        .collect();
    let mut stats = GreedyStats {
        sweeps: usize::from(!active.is_empty()),
        ..Default::default()
    };
    // Next id to visit in the current sweep; a vertex displaced ahead of it
    // proposes within the same sweep, one behind it in the next.
    let mut pos: VertexId = 0;
    while !active.is_empty() {
        let v = match active.range(pos..).next() {
            Some(&v) => v,
            None => {
                pos = 0;
                stats.sweeps += 1;
                continue;
            }
        };
        active.remove(&v);
        pos = v + 1;
        let (u, s) = lists.get(v)[cursor[v as usize]];
        cursor[v as usize] += 1;
        stats.proposals += 1;
        let accept = match mu.image[u as usize] {
            None => true,
            Some((_, current)) => !mu.pinned[u as usize] && s > current,
        };
        if accept {
            if let Some((loser, _)) = mu.image[u as usize] {
                stats.displacements += 1;
                if cursor[loser as usize] < lists.get(loser).len() {
                    active.insert(loser);
                }
            }
            mu.set(u, v, s);
        } else if cursor[v as usize] < lists.get(v).len() {
            active.insert(v);
        }
    }
    stats
}
