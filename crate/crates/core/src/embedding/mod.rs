//! Planar embedding of both graphs from distances to vantage anchor pairs.
//!
//! Pair `i` of the ordered vantage list is drawn as a diameter of the unit
//! circle rotated by `i * pi / |pairs|`. A vertex at hop distances `a`, `b` from
//! the pair's endpoints (which are `c` hops apart) becomes the apex of the
//! triangle with sides scaled by `2 / c`, so the pair spans the diameter. The
//! vertex position is the centroid of its per-pair points.

mod density;
mod quadtree;

pub use density::{export_density_grid, DensityGrid};
pub use quadtree::{BucketTree, Entry, LeafId, Rect};

use rayon::prelude::*;

use crate::anchors::{AnchorRows, DistanceRow, DistanceTable, VantagePairList};
use crate::graph::VertexId;
use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EmbeddingError {
    #[error("density cell size must be positive, got {0}")]
    BadCellSize(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    /// Counter-clockwise rotation about the origin.
    pub fn rotate(self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            x: self.x * c - self.y * s,
            y: self.x * s + self.y * c,
        }
    }

    pub fn scale(self, k: T) -> Self {
        Self {
            x: self.x * k,
            y: self.y * k,
        }
    }
}

/// Which input graph a vertex belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    G1,
    G2,
}

/// Unit-circle endpoints for each vantage pair.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitCirclePlacement<T> {
    /// Rotation between consecutive pairs, `pi / pair_count`.
    pub step: T,
    pub angles: Vec<T>,
    pub endpoints: Vec<(Point<T>, Point<T>)>,
}

impl<T: Scalar> UnitCirclePlacement<T> {
    pub fn new(pair_count: usize) -> Self {
        let step = if pair_count == 0 {
            T::zero()
        } else {
            T::PI() / T::of_usize(pair_count)
        };
        let angles: Vec<T> = (0..pair_count).map(|i| step * T::of_usize(i)).collect();
        let endpoints = angles
            .iter()
            .map(|&a| {
                let p = Point::new(T::one(), T::zero()).rotate(a);
                (p, p.scale(-T::one()))
            })
            .collect();
        Self { step, angles, endpoints }
    }
}

/// Apex of the triangle over the diameter `(1,0)-(-1,0)` for hop distances
/// `a` (to the `(1,0)` end), `b`, and pair separation `c > 0`.
pub fn triangle_point<T: Scalar>(a: u32, b: u32, c: u32) -> Point<T> {
    debug_assert!(c > 0);
    let k = T::of_f64(2.0) / T::of_usize(c as usize);
    let a = T::of_usize(a as usize) * k;
    if a == T::zero() {
        return Point::new(T::one(), T::zero());
    }
    let b = T::of_usize(b as usize) * k;
    let four = T::of_f64(4.0);
    let cos_alpha = ((a * a + four - b * b) / (four * a)).max(-T::one()).min(T::one());
    let alpha = cos_alpha.acos();
    Point::new(T::one() - a * alpha.cos(), a * alpha.sin())
}

/// Position of one vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexPosition<T> {
    pub side: Side,
    pub vertex: VertexId,
    /// `None` when no vantage pair has finite distances to the vertex.
    pub point: Option<Point<T>>,
    pub valid_pairs: usize,
}

struct FramePair<'a> {
    first: &'a AnchorRows,
    second: &'a AnchorRows,
    /// Separation of the pair in G1 and in G2.
    sep: [Option<u32>; 2],
}

/// Everything needed to position vertices of both graphs in one iteration.
pub struct EmbeddingFrame<'a, T> {
    pairs: Vec<FramePair<'a>>,
    placement: UnitCirclePlacement<T>,
}

impl<'a, T: Scalar> EmbeddingFrame<'a, T> {
    /// `counterpart` maps a graph-1 anchor to its graph-2 image.
    pub fn new(
        vantage: &VantagePairList,
        table: &'a DistanceTable,
        counterpart: impl Fn(VertexId) -> VertexId,
    ) -> Self {
        let pairs = vantage
            .pairs
            .iter()
            .map(|&(p, q)| {
                let (pc, qc) = (counterpart(p), counterpart(q));
                let first = table.get((p, pc)).expect("rows for vantage anchor");
                let second = table.get((q, qc)).expect("rows for vantage anchor");
                FramePair {
                    first,
                    second,
                    sep: [first.g1.get(q), first.g2.get(qc)],
                }
            })
            .collect();
        Self {
            pairs,
            placement: UnitCirclePlacement::new(vantage.len()),
        }
    }

    pub fn placement(&self) -> &UnitCirclePlacement<T> {
        &self.placement
    }

    fn rows(pair: &FramePair<'a>, side: Side) -> (&'a DistanceRow, &'a DistanceRow, Option<u32>) {
        match side {
            Side::G1 => (&pair.first.g1, &pair.second.g1, pair.sep[0]),
            Side::G2 => (&pair.first.g2, &pair.second.g2, pair.sep[1]),
        }
    }

    /// Centroid of the rotated per-pair triangle points of `u`.
    pub fn compute_position(&self, side: Side, u: VertexId) -> VertexPosition<T> {
        let mut sum = Point::new(T::zero(), T::zero());
        let mut valid = 0usize;
        for (i, pair) in self.pairs.iter().enumerate() {
            let (ra, rb, c) = Self::rows(pair, side);
            let (Some(a), Some(b), Some(c)) = (ra.get(u), rb.get(u), c) else {
                continue;
            };
            if c == 0 {
                continue;
            }
            let p = triangle_point::<T>(a, b, c).rotate(self.placement.angles[i]);
            sum.x += p.x;
            sum.y += p.y;
            valid += 1;
        }
        let point = (valid > 0).then(|| sum.scale(T::one() / T::of_usize(valid)));
        VertexPosition {
            side,
            vertex: u,
            point,
            valid_pairs: valid,
        }
    }

    /// Positions of every vertex of both graphs, normalized into `[-1, 1]^2`.
    pub fn embed_all(&self, n1: usize, n2: usize) -> Positions<T> {
        let embed = |side, n: usize| -> Vec<VertexPosition<T>> {
            (0..n as VertexId)
                .into_par_iter()
                .map(|u| self.compute_position(side, u))
                .collect()
        };
        let mut positions = Positions {
            g1: embed(Side::G1, n1),
            g2: embed(Side::G2, n2),
            scale: T::one(),
        };
        positions.normalize();
        positions
    }
}

/// Positions of both graphs' vertices for one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Positions<T> {
    pub g1: Vec<VertexPosition<T>>,
    pub g2: Vec<VertexPosition<T>>,
    /// Divisor applied by [`Positions::normalize`].
    pub scale: T,
}

impl<T: Scalar> Positions<T> {
    pub fn iter(&self) -> impl Iterator<Item = &VertexPosition<T>> {
        self.g1.iter().chain(self.g2.iter())
    }

    pub fn side(&self, side: Side) -> &[VertexPosition<T>] {
        match side {
            Side::G1 => &self.g1,
            Side::G2 => &self.g2,
        }
    }

    /// Divides every coordinate by `max(1, max |coordinate|)`.
    pub fn normalize(&mut self) {
        let max = self
            .iter()
            .filter_map(|p| p.point)
            .fold(T::one(), |m, p| m.max(p.x.abs()).max(p.y.abs()));
        if max > T::one() {
            let inv = T::one() / max;
            for p in self.g1.iter_mut().chain(self.g2.iter_mut()) {
                p.point = p.point.map(|q| q.scale(inv));
            }
        }
        self.scale = self.scale * max;
    }

    pub fn unpositioned(&self) -> usize {
        self.iter().filter(|p| p.point.is_none()).count()
    }

    /// Builds a quadtree over all positioned vertices; the rest go to the overflow bucket.
    pub fn bucket_tree(&self, capacity: usize) -> BucketTree<T> {
        BucketTree::build(
            capacity,
            self.iter().map(|p| Entry {
                side: p.side,
                vertex: p.vertex,
                point: p.point,
            }),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anchors::DistanceTable;
    use crate::graph::AttributedGraph;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn placement_first_pair_on_x_axis() {
        let p = UnitCirclePlacement::<f64>::new(3);
        assert_eq!(p.endpoints[0].0, Point::new(1.0, 0.0));
        assert_eq!(p.endpoints[0].1, Point::new(-1.0, -0.0));
        assert!(close(p.step, std::f64::consts::PI / 3.0));
        let (q0, q1) = p.endpoints[1];
        assert!(close(q0.x, (std::f64::consts::PI / 3.0).cos()));
        assert!(close(q0.y, (std::f64::consts::PI / 3.0).sin()));
        assert!(close(q1.x, -q0.x) && close(q1.y, -q0.y));
    }

    #[test]
    fn anchor_itself_lands_on_circle() {
        let p: Point<f64> = triangle_point(0, 4, 4);
        assert_eq!(p, Point::new(1.0, 0.0));
        let p: Point<f64> = triangle_point(4, 0, 4);
        assert!(close(p.x, -1.0) && close(p.y, 0.0));
    }

    #[test]
    fn equidistant_vertex_is_on_the_bisector() {
        for (a, c) in [(1, 2), (3, 4), (5, 2)] {
            let p: Point<f64> = triangle_point(a, a, c);
            assert!(p.x.abs() < 1e-12, "a={a} c={c} x={}", p.x);
        }
    }

    /// Law-of-cosines evaluation in unscaled units, then rescaled: independent
    /// of the apex formula used by `triangle_point`.
    fn oracle(a: f64, b: f64, c: f64) -> (f64, f64) {
        // Place ends at (0,0) and (c,0); apex by circle intersection.
        let x = (a * a - b * b + c * c) / (2.0 * c);
        let y = (a * a - x * x).max(0.0).sqrt();
        // Map (0,0)->(1,0), (c,0)->(-1,0).
        (1.0 - 2.0 * x / c, 2.0 * y / c)
    }

    #[test]
    fn path_vertex_one_against_pair_zero_four() {
        let p: Point<f64> = triangle_point(1, 3, 4);
        assert!(close(p.x, 0.5) && close(p.y, 0.0));
        let (ox, oy) = oracle(1.0, 3.0, 4.0);
        assert!(close(p.x, ox) && close(p.y, oy));
    }

    proptest::proptest! {
        #[test]
        fn triangle_matches_circle_intersection(a in 0u32..30, b in 0u32..30, c in 1u32..30) {
            // Only metric-consistent triples.
            proptest::prop_assume!(a + b >= c && a + c >= b && b + c >= a);
            let p: Point<f64> = triangle_point(a, b, c);
            let (ox, oy) = oracle(a as f64, b as f64, c as f64);
            proptest::prop_assert!((p.x - ox).abs() < 1e-9 && (p.y - oy).abs() < 1e-6,
                "{a} {b} {c}: {p:?} vs ({ox}, {oy})");
            proptest::prop_assert!(p.x.is_finite() && p.y.is_finite());
        }

        #[test]
        fn triangle_is_finite_for_any_input(a in 0u32..1000, b in 0u32..1000, c in 1u32..1000) {
            let p: Point<f32> = triangle_point(a, b, c);
            proptest::prop_assert!(p.x.is_finite() && p.y.is_finite());
        }
    }

    #[test]
    fn clone_positions_are_identical() {
        // Path 0..=4 and its reversal 4..=0 (relabeled copy: v -> 4 - v).
        let g1 = AttributedGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let g2 = AttributedGraph::from_edges(5, &[(4, 3), (3, 2), (2, 1), (1, 0)]);
        let mut table = DistanceTable::new();
        table.ensure(&g1, &g2, &[(0, 4), (4, 0)]);
        let vantage = VantagePairList { pairs: vec![(0, 4)] };
        let frame = EmbeddingFrame::<f64>::new(&vantage, &table, |u| 4 - u);
        let pos = frame.embed_all(5, 5);
        for u in 0..5u32 {
            assert_eq!(pos.g1[u as usize].point, pos.g2[(4 - u) as usize].point);
        }
        assert_eq!(pos.g1[1].point, Some(Point::new(0.5, 0.0)));
    }

    #[test]
    fn disconnected_vertex_is_unpositioned() {
        let g = AttributedGraph::from_edges(4, &[(0, 1), (1, 2)]);
        let mut table = DistanceTable::new();
        table.ensure(&g, &g, &[(0, 0), (2, 2)]);
        let vantage = VantagePairList { pairs: vec![(0, 2)] };
        let frame = EmbeddingFrame::<f64>::new(&vantage, &table, |u| u);
        let p = frame.compute_position(Side::G1, 3);
        assert_eq!(p.point, None);
        assert_eq!(p.valid_pairs, 0);
        assert_eq!(frame.compute_position(Side::G2, 1).valid_pairs, 1);
    }

    #[test]
    fn normalization_brings_points_into_unit_square() {
        let mk = |x: f64, y: f64| VertexPosition {
            side: Side::G1,
            vertex: 0,
            point: Some(Point::new(x, y)),
            valid_pairs: 1,
        };
        let mut pos = Positions {
            g1: vec![mk(3.0, -1.0), mk(0.5, 0.5)],
            g2: vec![],
            scale: 1.0,
        };
        pos.normalize();
        assert_eq!(pos.g1[0].point, Some(Point::new(1.0, -1.0 / 3.0)));
        assert!(close(pos.scale, 3.0));
        // Already inside: untouched.
        let mut pos = Positions {
            g1: vec![mk(0.2, 0.1)],
            g2: vec![],
            scale: 1.0,
        };
        pos.normalize();
        assert_eq!(pos.g1[0].point, Some(Point::new(0.2, 0.1)));
    }
}
