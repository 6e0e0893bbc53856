//! Mapping TSV: `ext_u <TAB> ext_v <TAB> score <TAB> iteration_found`.

use std::io::{BufRead, Write};
use std::path::Path;

use super::Alignment;
use crate::graph::{AttributedGraph, GraphError, VertexId};
use crate::scalar::Scalar;

/// One parsed mapping line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappingRow {
    pub u: VertexId,
    pub v: VertexId,
    pub score: Option<f64>,
    pub iteration: Option<usize>,
}

pub fn write_mapping<T: Scalar, W: Write>(
    mut w: W,
    alignment: &Alignment<T>,
    g1: &AttributedGraph,
    g2: &AttributedGraph,
) -> std::io::Result<()> {
    for (u, v, s, it) in alignment.rows() {
        writeln!(w, "{}\t{}\t{}\t{}", g1.ext_id(u), g2.ext_id(v), s.as_f64(), it)?;
    }
    w.flush()
}

/// Reads mapping lines. Score and iteration columns are optional, so a plain
/// pair file is accepted too.
pub fn parse_mapping<R: BufRead>(
    reader: R,
    path: &str,
    g1: &AttributedGraph,
    g2: &AttributedGraph,
) -> Result<Vec<MappingRow>, GraphError> {
    let mut rows = Vec::new();
    let mut seen1 = vec![false; g1.vertex_count()];
    let mut seen2 = vec![false; g2.vertex_count()];
    for item in crate::graph::io_lines(reader, path) {
        let (line, text) = item?;
        let f = crate::graph::io_fields(&text);
        let malformed = |msg: String| GraphError::Malformed {
            path: path.to_owned(),
            line,
            msg,
        };
        if !(2..=4).contains(&f.len()) {
            return Err(malformed(format!("expected 2 to 4 fields, got {}", f.len())));
        }
        let unknown = |id: &str| GraphError::UnknownVertex {
            path: path.to_owned(),
            line,
            id: id.to_owned(),
        };
        let u = g1.lookup(f[0]).ok_or_else(|| unknown(f[0]))?;
        let v = g2.lookup(f[1]).ok_or_else(|| unknown(f[1]))?;
        let not_injective = |side, id: &str| GraphError::NotInjective {
            path: path.to_owned(),
            line,
            side,
            id: id.to_owned(),
        };
        if std::mem::replace(&mut seen1[u as usize], true) {
            return Err(not_injective("left", f[0]));
        }
        if std::mem::replace(&mut seen2[v as usize], true) {
            return Err(not_injective("right", f[1]));
        }
        let score = f
            .get(2)
            .map(|s| s.parse::<f64>().map_err(|_| malformed(format!("score {s:?} is not a number"))))
            .transpose()?;
        let iteration = f
            .get(3)
            .map(|s| s.parse::<usize>().map_err(|_| malformed(format!("iteration {s:?} is not an integer"))))
            .transpose()?;
        rows.push(MappingRow { u, v, score, iteration });
    }
    Ok(rows)
}

pub fn read_mapping(path: &Path, g1: &AttributedGraph, g2: &AttributedGraph) -> Result<Vec<MappingRow>, GraphError> {
    let label = path.display().to_string();
    parse_mapping(crate::graph::io_open(path)?, &label, g1, g2)
}
