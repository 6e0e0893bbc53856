//! Cross-graph vertex pair lists: anchors and ground truth.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use super::io::{data_lines, fields, open};
use super::{AttributedGraph, GraphError, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnchorSource {
    UserProvided,
    Bootstrapped,
}

/// Known correspondences `(u in G1, v in G2)`, injective in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorMap {
    pairs: Vec<(VertexId, VertexId)>,
    source: AnchorSource,
}

impl AnchorMap {
    /// Fails with the index of the first pair that repeats a left or right id.
    pub fn new(pairs: Vec<(VertexId, VertexId)>, source: AnchorSource) -> Result<Self, (usize, &'static str)> {
        check_injective(&pairs)?;
        Ok(Self { pairs, source })
    }

    pub fn pairs(&self) -> &[(VertexId, VertexId)] {
        &self.pairs
    }

    pub fn source(&self) -> AnchorSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Reference alignment used for evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pairs: Vec<(VertexId, VertexId)>,
    forward: HashMap<VertexId, VertexId>,
}

impl GroundTruth {
    pub fn new(pairs: Vec<(VertexId, VertexId)>) -> Result<Self, (usize, &'static str)> {
        check_injective(&pairs)?;
        let forward = pairs.iter().copied().collect();
        Ok(Self { pairs, forward })
    }

    pub fn pairs(&self) -> &[(VertexId, VertexId)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn target(&self, u: VertexId) -> Option<VertexId> {
        self.forward.get(&u).copied()
    }
}

fn check_injective(pairs: &[(VertexId, VertexId)]) -> Result<(), (usize, &'static str)> {
    let mut left = std::collections::HashSet::with_capacity(pairs.len());
    let mut right = std::collections::HashSet::with_capacity(pairs.len());
    for (i, &(u, v)) in pairs.iter().enumerate() {
        if !left.insert(u) {
            return Err((i, "left"));
        }
        if !right.insert(v) {
            return Err((i, "right"));
        }
    }
    Ok(())
}

/// Parses `ext_u <TAB> ext_v` rows, resolving ids and enforcing injectivity.
pub fn parse_pairs<R: BufRead>(
    reader: R,
    path: &str,
    g1: &AttributedGraph,
    g2: &AttributedGraph,
) -> Result<Vec<(VertexId, VertexId)>, GraphError> {
    let mut pairs = Vec::new();
    let mut lines = Vec::new();
    for item in data_lines(reader, path) {
        let (lineno, line) = item?;
        let f = fields(&line);
        if f.len() < 2 || f.len() > 3 {
            return Err(GraphError::Malformed {
                path: path.to_owned(),
                line: lineno,
                msg: format!("expected `ext_u<TAB>ext_v`, got {} fields", f.len()),
            });
        }
        let resolve = |g: &AttributedGraph, id: &str| {
            g.lookup(id).ok_or_else(|| GraphError::UnknownVertex {
                path: path.to_owned(),
                line: lineno,
                id: id.to_owned(),
            })
        };
        pairs.push((resolve(g1, f[0])?, resolve(g2, f[1])?));
        lines.push((lineno, f[0].to_owned(), f[1].to_owned()));
    }
    check_injective(&pairs).map_err(|(i, side)| {
        let (line, l, r) = &lines[i];
        GraphError::NotInjective {
            path: path.to_owned(),
            line: *line,
            side,
            id: if side == "left" { l.clone() } else { r.clone() },
        }
    })?;
    Ok(pairs)
}

pub fn load_anchor_map(path: &Path, g1: &AttributedGraph, g2: &AttributedGraph) -> Result<AnchorMap, GraphError> {
    let label = path.display().to_string();
    let pairs = parse_pairs(open(path)?, &label, g1, g2)?;
    Ok(AnchorMap::new(pairs, AnchorSource::UserProvided).expect("checked by parse_pairs"))
}

pub fn load_ground_truth(path: &Path, g1: &AttributedGraph, g2: &AttributedGraph) -> Result<GroundTruth, GraphError> {
    let label = path.display().to_string();
    let pairs = parse_pairs(open(path)?, &label, g1, g2)?;
    Ok(GroundTruth::new(pairs).expect("checked by parse_pairs"))
}

pub fn write_pairs<W: Write>(
    mut w: W,
    pairs: &[(VertexId, VertexId)],
    g1: &AttributedGraph,
    g2: &AttributedGraph,
) -> std::io::Result<()> {
    for &(u, v) in pairs {
        writeln!(w, "{}\t{}", g1.ext_id(u), g2.ext_id(v))?;
    }
    w.flush()
}
