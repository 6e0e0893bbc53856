//! Point quadtree over `[-1, 1]^2` with capacity-limited leaf buckets.

use super::{Point, Side};
use crate::graph::VertexId;
use crate::scalar::Scalar;

/// Leaves are not split below this depth; points that close are treated as coincident.
const MAX_DEPTH: u32 = 60;

/// Closed axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect<T> {
    pub min: Point<T>,
    pub max: Point<T>,
}

impl<T: Scalar> Rect<T> {
    pub fn unit_square() -> Self {
        Self {
            min: Point::new(-T::one(), -T::one()),
            max: Point::new(T::one(), T::one()),
        }
    }

    pub fn touches(&self, other: &Self) -> bool {
        self.min.x <= other.max.x && other.min.x <= self.max.x && self.min.y <= other.max.y && other.min.y <= self.max.y
    }

    pub fn contains(&self, p: Point<T>) -> bool {
        self.min.x <= p.x && p.x <= self.max.x && self.min.y <= p.y && p.y <= self.max.y
    }

    fn center(&self) -> Point<T> {
        let two = T::one() + T::one();
        Point::new((self.min.x + self.max.x) / two, (self.min.y + self.max.y) / two)
    }

    /// Quadrants in order SW, SE, NW, NE.
    fn split(&self) -> [Rect<T>; 4] {
        let c = self.center();
        [
            Rect { min: self.min, max: c },
            Rect {
                min: Point::new(c.x, self.min.y),
                max: Point::new(self.max.x, c.y),
            },
            Rect {
                min: Point::new(self.min.x, c.y),
                max: Point::new(c.x, self.max.y),
            },
            Rect { min: c, max: self.max },
        ]
    }

    fn quadrant(&self, p: Point<T>) -> usize {
        let c = self.center();
        (p.x >= c.x) as usize + 2 * (p.y >= c.y) as usize
    }
}

/// A vertex stored in the tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry<T> {
    pub side: Side,
    pub vertex: VertexId,
    pub point: Option<Point<T>>,
}

#[derive(Debug, Clone)]
enum Kind {
    Leaf(Vec<u32>),
    Internal([u32; 4]),
}

#[derive(Debug, Clone)]
struct Node<T> {
    rect: Rect<T>,
    depth: u32,
    kind: Kind,
}

/// Index of a leaf bucket. Leaves are numbered by region, ordered by
/// `(min.x, min.y)`; the overflow bucket, when present, comes last.
pub type LeafId = usize;

/// Quadtree whose leaves hold vertices of both graphs.
///
/// Unpositioned vertices live in a separate overflow bucket that has no
/// region and no neighbors.
#[derive(Debug, Clone)]
pub struct BucketTree<T> {
    capacity: usize,
    nodes: Vec<Node<T>>,
    entries: Vec<Entry<T>>,
    overflow: Vec<u32>,
    /// Node index of each geometric leaf, in `LeafId` order.
    leaves: Vec<u32>,
    leaf_of_node: Vec<Option<LeafId>>,
}

impl<T: Scalar> BucketTree<T> {
    /// Inserts all entries in order. Points must lie in `[-1, 1]^2`.
    pub fn build(capacity: usize, entries: impl IntoIterator<Item = Entry<T>>) -> Self {
        assert!(capacity > 0, "bucket capacity must be positive");
        let mut tree = Self {
            capacity,
            nodes: vec![Node {
                rect: Rect::unit_square(),
                depth: 0,
                kind: Kind::Leaf(Vec::new()),
            }],
            entries: Vec::new(),
            overflow: Vec::new(),
            leaves: Vec::new(),
            leaf_of_node: Vec::new(),
        };
        for e in entries {
            tree.insert(e);
        }
        tree.index_leaves();
        tree
    }

    fn insert(&mut self, entry: Entry<T>) {
        let idx = self.entries.len() as u32;
        self.entries.push(entry);
        let Some(p) = entry.point else {
            self.overflow.push(idx);
            return;
        };
        debug_assert!(self.nodes[0].rect.contains(p), "point {p:?} outside root square");
        let mut node = 0usize;
        loop {
            match &self.nodes[node].kind {
                Kind::Internal(children) => {
                    node = children[self.nodes[node].rect.quadrant(p)] as usize;
                }
                Kind::Leaf(_) => break,
            }
        }
        if let Kind::Leaf(items) = &mut self.nodes[node].kind {
            items.push(idx);
        }
        self.split_if_needed(node);
    }

    fn split_if_needed(&mut self, start: usize) {
        let mut work = vec![start];
        while let Some(node) = work.pop() {
            let Kind::Leaf(items) = &self.nodes[node].kind else {
                continue;
            };
            if items.len() <= self.capacity || self.nodes[node].depth >= MAX_DEPTH {
                continue;
            }
            let first = self.entries[items[0] as usize].point;
            if items.iter().all(|&i| self.entries[i as usize].point == first) {
                continue;
            }
            let items = std::mem::take(match &mut self.nodes[node].kind {
                Kind::Leaf(items) => items,
                Kind::Internal(_) => unreachable!(),
            });
            let rect = self.nodes[node].rect;
            let depth = self.nodes[node].depth + 1;
            let base = self.nodes.len() as u32;
            let mut buckets: [Vec<u32>; 4] = Default::default();
            for i in items {
                let p = self.entries[i as usize].point.expect("tree holds positioned entries");
                buckets[rect.quadrant(p)].push(i);
            }
            for (q, (r, items)) in rect.split().into_iter().zip(buckets).enumerate() {
                self.nodes.push(Node {
                    rect: r,
                    depth,
                    kind: Kind::Leaf(items),
                });
                work.push(base as usize + q);
            }
            self.nodes[node].kind = Kind::Internal([base, base + 1, base + 2, base + 3]);
        }
    }

    fn index_leaves(&mut self) {
        let mut leaves: Vec<u32> = (0..self.nodes.len() as u32)
            .filter(|&n| matches!(self.nodes[n as usize].kind, Kind::Leaf(_)))
            .collect();
        leaves.sort_by(|&a, &b| {
            let (ra, rb) = (&self.nodes[a as usize].rect, &self.nodes[b as usize].rect);
            ra.min
                .x
                .partial_cmp(&rb.min.x)
                .unwrap()
                .then(ra.min.y.partial_cmp(&rb.min.y).unwrap())
        });
        self.leaf_of_node = vec![None; self.nodes.len()];
        for (id, &n) in leaves.iter().enumerate() {
            self.leaf_of_node[n as usize] = Some(id);
        }
        self.leaves = leaves;
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Number of geometric leaves (the overflow bucket excluded).
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// Geometric leaves followed by the overflow bucket when it is non-empty.
    pub fn bucket_count(&self) -> usize {
        self.leaves.len() + usize::from(!self.overflow.is_empty())
    }

    pub fn overflow_id(&self) -> Option<LeafId> {
        (!self.overflow.is_empty()).then_some(self.leaves.len())
    }

    pub fn is_overflow(&self, id: LeafId) -> bool {
        id == self.leaves.len()
    }

    /// Region of a geometric leaf; `None` for the overflow bucket.
    pub fn region(&self, id: LeafId) -> Option<Rect<T>> {
        self.leaves.get(id).map(|&n| self.nodes[n as usize].rect)
    }

    pub fn bucket(&self, id: LeafId) -> impl ExactSizeIterator<Item = &Entry<T>> {
        let items: &[u32] = if self.is_overflow(id) {
            &self.overflow
        } else {
            match &self.nodes[self.leaves[id] as usize].kind {
                Kind::Leaf(items) => items,
                Kind::Internal(_) => unreachable!(),
            }
        };
        items.iter().map(|&i| &self.entries[i as usize])
    }

    pub fn bucket_len(&self, id: LeafId) -> usize {
        self.bucket(id).len()
    }

    /// Geometric leaves whose closed region touches that of `id` (edges or
    /// corners), excluding `id`, in `LeafId` order. Empty for the overflow bucket.
    pub fn neighbor_buckets(&self, id: LeafId) -> Vec<LeafId> {
        let Some(query) = self.region(id) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if !node.rect.touches(&query) {
                continue;
            }
            match &node.kind {
                Kind::Internal(children) => stack.extend(children.iter().map(|&c| c as usize)),
                Kind::Leaf(_) => {
                    let leaf = self.leaf_of_node[n].expect("indexed leaf");
                    if leaf != id {
                        out.push(leaf);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Bucket of every vertex, per side, indexed by vertex id.
    /// Vertices never inserted map to `None`.
    pub fn assignments(&self, n1: usize, n2: usize) -> [Vec<Option<LeafId>>; 2] {
        let mut out = [vec![None; n1], vec![None; n2]];
        for id in 0..self.bucket_count() {
            for e in self.bucket(id) {
                out[e.side as usize][e.vertex as usize] = Some(id);
            }
        }
        out
    }

    /// Total number of stored vertices, both graphs, overflow included.
    pub fn population(&self) -> usize {
        self.entries.len()
    }

    /// Maximum depth of any leaf.
    pub fn depth(&self) -> u32 {
        self.leaves.iter().map(|&n| self.nodes[n as usize].depth).max().unwrap_or(0)
    }
}
