//! Externally supplied similarity inputs: a sparse prior table standing in for
//! vertex attribute similarity, and attribute token weights.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};
use std::path::Path;

use crate::graph::{AttributedGraph, GraphError, VertexId};
use crate::scalar::Scalar;

/// Sparse pairwise prior `(u in G1, v in G2) -> [0, 1]`; absent pairs are 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExternalSimilarity<T> {
    entries: BTreeMap<(VertexId, VertexId), T>,
}

impl<T: Scalar> ExternalSimilarity<T> {
    pub fn new() -> Self {
        Self { entries: BTreeMap::new() }
    }

    /// Inserts or replaces an entry; `value` is clamped into `[0, 1]`.
    pub fn set(&mut self, u: VertexId, v: VertexId, value: T) {
        self.entries.insert((u, v), value.max(T::zero()).min(T::one()));
    }

    #[inline]
    pub fn get(&self, u: VertexId, v: VertexId) -> T {
        self.entries.get(&(u, v)).copied().unwrap_or_else(T::zero)
    }

    /// Entries in `(u, v)` order.
    pub fn iter(&self) -> impl Iterator<Item = ((VertexId, VertexId), T)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn nonzero(&self) -> usize {
        self.entries.values().filter(|&&v| v > T::zero()).count()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Hash-indexed copy for the scoring hot path.
    pub(crate) fn index(&self) -> HashMap<(VertexId, VertexId), T> {
        self.entries.iter().map(|(&k, &v)| (k, v)).collect()
    }

    pub fn write<W: Write>(&self, mut w: W, g1: &AttributedGraph, g2: &AttributedGraph) -> std::io::Result<()> {
        for ((u, v), x) in self.iter() {
            writeln!(w, "{}\t{}\t{}", g1.ext_id(u), g2.ext_id(v), x)?;
        }
        w.flush()
    }
}

/// Parses `ext_u <TAB> ext_v <TAB> value` rows with values in `[0, 1]`.
pub fn parse_external_similarity<R: BufRead>(
    reader: R,
    path: &str,
    g1: &AttributedGraph,
    g2: &AttributedGraph,
) -> Result<ExternalSimilarity<f64>, GraphError> {
    let mut table = ExternalSimilarity::new();
    for item in crate::graph::io_lines(reader, path) {
        let (line, text) = item?;
        let f = crate::graph::io_fields(&text);
        let malformed = |msg: String| GraphError::Malformed {
            path: path.to_owned(),
            line,
            msg,
        };
        if f.len() != 3 {
            return Err(malformed(format!("expected `ext_u<TAB>ext_v<TAB>value`, got {} fields", f.len())));
        }
        let unknown = |id: &str| GraphError::UnknownVertex {
            path: path.to_owned(),
            line,
            id: id.to_owned(),
        };
        let u = g1.lookup(f[0]).ok_or_else(|| unknown(f[0]))?;
        let v = g2.lookup(f[1]).ok_or_else(|| unknown(f[1]))?;
        let x: f64 = f[2]
            .parse()
            .ok()
            .filter(|x: &f64| (0.0..=1.0).contains(x))
            .ok_or_else(|| malformed(format!("similarity {:?} is not a number in [0, 1]", f[2])))?;
        table.set(u, v, x);
    }
    Ok(table)
}

pub fn load_external_similarity(
    path: &Path,
    g1: &AttributedGraph,
    g2: &AttributedGraph,
) -> Result<ExternalSimilarity<f64>, GraphError> {
    let label = path.display().to_string();
    parse_external_similarity(crate::graph::io_open(path)?, &label, g1, g2)
}

/// Parses `token <TAB> weight` rows with positive weights.
pub fn parse_weights<R: BufRead>(reader: R, path: &str) -> Result<HashMap<String, f64>, GraphError> {
    let mut weights = HashMap::new();
    for item in crate::graph::io_lines(reader, path) {
        let (line, text) = item?;
        let f = crate::graph::io_fields(&text);
        let w = (f.len() == 2)
            .then(|| f[1].parse::<f64>().ok())
            .flatten()
            .filter(|w| *w > 0.0 && w.is_finite())
            .ok_or_else(|| GraphError::Malformed {
                path: path.to_owned(),
                line,
                msg: "expected `token<TAB>positive-weight`".into(),
            })?;
        weights.insert(f[0].to_owned(), w);
    }
    Ok(weights)
}

pub fn load_weights(path: &Path) -> Result<HashMap<String, f64>, GraphError> {
    let label = path.display().to_string();
    parse_weights(crate::graph::io_open(path)?, &label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_parses_and_defaults_to_zero() {
        let g = AttributedGraph::from_edges(3, &[(0, 1), (1, 2)]);
        let t = parse_external_similarity("0\t1\t0.5\n# c\n2\t2\t1\n".as_bytes(), "h", &g, &g).unwrap();
        assert_eq!(t.get(0, 1), 0.5);
        assert_eq!(t.get(2, 2), 1.0);
        assert_eq!(t.get(1, 1), 0.0);
        assert_eq!(t.nonzero(), 2);
    }

    #[test]
    fn out_of_range_value_is_rejected() {
        let g = AttributedGraph::from_edges(2, &[(0, 1)]);
        assert!(parse_external_similarity("0\t1\t1.5\n".as_bytes(), "h", &g, &g).is_err());
        assert!(parse_external_similarity("0\t9\t0.5\n".as_bytes(), "h", &g, &g).is_err());
    }

    #[test]
    fn weights_must_be_positive() {
        let w = parse_weights("kdd\t2.5\nicdm\t1\n".as_bytes(), "w").unwrap();
        assert_eq!(w["kdd"], 2.5);
        assert!(parse_weights("kdd\t0\n".as_bytes(), "w").is_err());
        assert!(parse_weights("kdd\n".as_bytes(), "w").is_err());
    }
}
