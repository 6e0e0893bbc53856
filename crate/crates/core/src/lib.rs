//! Alignment of two large attributed graphs.
//!
//! Vertices of both graphs are embedded in the plane by their hop distances to
//! pairs of vantage anchors, bucketed with a quadtree, and compared only
//! against vertices in the same or touching buckets. A greedy suitor matching
//! over the per-vertex top-k candidates yields an injective mapping; its best
//! pairs become new anchors for the next iteration.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the crate root fix it to `f64`.

pub mod aligner;
pub mod anchors;
pub mod bench;
pub mod embedding;
pub mod graph;
pub mod scalar;
pub mod similarity;

pub use scalar::Scalar;

pub use graph::{AnchorMap, AnchorSource, AttributedGraph, GraphBuilder, GraphError, GroundTruth, VertexId};

pub type Point = embedding::Point<f64>;
pub type Positions = embedding::Positions<f64>;
pub type BucketTree = embedding::BucketTree<f64>;
pub type SimilarityConfig = similarity::SimilarityConfig<f64>;
pub type SimilarityContext<'g> = similarity::SimilarityContext<'g, f64>;
pub type ExternalSimilarity = similarity::ExternalSimilarity<f64>;

pub type PointF32 = embedding::Point<f32>;
pub type BucketTreeF32 = embedding::BucketTree<f32>;
pub type SimilarityContextF32<'g> = similarity::SimilarityContext<'g, f32>;
