//! Per-vertex precomputed features in a vocabulary shared by both graphs.

use std::collections::HashMap;

use crate::graph::{AttrKind, AttributedGraph, EdgeAttrValue, VertexId};

/// Compressed rows of `V` per vertex.
#[derive(Debug, Clone)]
pub(crate) struct Rows<V> {
    offsets: Vec<usize>,
    values: Vec<V>,
}

impl<V> Rows<V> {
    fn build(n: usize, mut row: impl FnMut(VertexId, &mut Vec<V>)) -> Self {
        let mut offsets = Vec::with_capacity(n + 1);
        let mut values = Vec::new();
        offsets.push(0);
        for u in 0..n as VertexId {
            row(u, &mut values);
            offsets.push(values.len());
        }
        Self { offsets, values }
    }

    #[inline]
    pub(crate) fn get(&self, u: VertexId) -> &[V] {
        let u = u as usize;
        &self.values[self.offsets[u]..self.offsets[u + 1]]
    }
}

/// Label translation from each graph's interners into one shared id space.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    vertex_types: [Vec<u32>; 2],
    edge_types: [Vec<u32>; 2],
    vertex_tokens: [Vec<u32>; 2],
    vertex_token_names: Vec<String>,
    /// Per graph, per schema column: unified edge-token ids by local token id,
    /// or `None` for numeric columns.
    edge_tokens: [Vec<Option<Vec<u32>>>; 2],
    /// Numeric columns present in both schemas, as `(g1 column, g2 column)`.
    numeric: Vec<(usize, usize)>,
    /// Set-valued columns present in both schemas.
    sets: Vec<(usize, usize)>,
}

fn unify<'n>(names: [&'n [String]; 2]) -> ([Vec<u32>; 2], Vec<String>) {
    let mut index: HashMap<&'n str, u32> = HashMap::new();
    let mut all = Vec::new();
    let mut map = |list: &'n [String]| -> Vec<u32> {
        list.iter()
            .map(|n| {
                *index.entry(n.as_str()).or_insert_with(|| {
                    all.push(n.clone());
                    (all.len() - 1) as u32
                })
            })
            .collect()
    };
    let a = map(names[0]);
    let b = map(names[1]);
    ([a, b], all)
}

impl Vocabulary {
    pub fn new(g1: &AttributedGraph, g2: &AttributedGraph) -> Self {
        let (vertex_types, _) = unify([g1.vertex_type_names().names(), g2.vertex_type_names().names()]);
        let (edge_types, _) = unify([g1.edge_type_names().names(), g2.edge_type_names().names()]);
        let (vertex_tokens, vertex_token_names) =
            unify([g1.vertex_tokens().names(), g2.vertex_tokens().names()]);

        let mut numeric = Vec::new();
        let mut sets = Vec::new();
        for (i, d1) in g1.edge_schema().iter().enumerate() {
            if let Some(j) = g2.edge_schema().iter().position(|d2| d2.name == d1.name && d2.kind == d1.kind) {
                match d1.kind {
                    AttrKind::Numeric => numeric.push((i, j)),
                    AttrKind::Set => sets.push((i, j)),
                }
            }
        }

        // Edge tokens are keyed by (column name, token) so equal tokens in different columns differ.
        let mut index: HashMap<(String, String), u32> = HashMap::new();
        let mut edge_tokens: [Vec<Option<Vec<u32>>>; 2] = [Vec::new(), Vec::new()];
        for (side, g) in [g1, g2].into_iter().enumerate() {
            for decl in g.edge_schema() {
                edge_tokens[side].push(match decl.kind {
                    AttrKind::Numeric => None,
                    AttrKind::Set => Some(
                        g.edge_tokens()
                            .names()
                            .iter()
                            .map(|t| {
                                let next = index.len() as u32;
                                *index.entry((decl.name.clone(), t.clone())).or_insert(next)
                            })
                            .collect(),
                    ),
                });
            }
        }

        Self {
            vertex_types,
            edge_types,
            vertex_tokens,
            vertex_token_names,
            edge_tokens,
            numeric,
            sets,
        }
    }

    pub fn vertex_token_names(&self) -> &[String] {
        &self.vertex_token_names
    }

    pub fn numeric_columns(&self) -> &[(usize, usize)] {
        &self.numeric
    }

    pub fn set_columns(&self) -> &[(usize, usize)] {
        &self.sets
    }
}

/// Numeric incident-edge values of one vertex.
#[derive(Debug, Clone)]
pub(crate) enum NumericEdges {
    /// Exactly one shared numeric column: sorted present values.
    Single(Rows<f64>),
    /// Several columns: per incident edge, one value slot per shared column.
    Multi { width: usize, rows: Rows<Option<f64>> },
    None,
}

/// Precomputed features of one graph.
#[derive(Debug, Clone)]
pub(crate) struct Profile {
    pub vertex_type: Vec<u32>,
    pub attrs: Rows<u32>,
    pub neighbor_types: Rows<(u32, u32)>,
    pub edge_types: Rows<(u32, u32)>,
    pub edge_tokens: Rows<(u32, u32)>,
    pub numeric: NumericEdges,
}

fn histogram(keys: &mut Vec<u32>, out: &mut Vec<(u32, u32)>) {
    keys.sort_unstable();
    for &k in keys.iter() {
        match out.last_mut() {
            Some((last, c)) if *last == k => *c += 1,
            _ => out.push((k, 1)),
        }
    }
    keys.clear();
}

impl Profile {
    pub(crate) fn new(g: &AttributedGraph, vocab: &Vocabulary, side: usize) -> Self {
        let n = g.vertex_count();
        let vt = &vocab.vertex_types[side];
        let et = &vocab.edge_types[side];
        let vertex_type: Vec<u32> = g.vertices().map(|u| vt[g.vertex_type(u) as usize]).collect();

        let attrs = Rows::build(n, |u, out| {
            let start = out.len();
            out.extend(g.vertex_attrs(u).iter().map(|&t| vocab.vertex_tokens[side][t as usize]));
            out[start..].sort_unstable();
        });

        let mut scratch = Vec::new();
        let neighbor_types = Rows::build(n, |u, out| {
            scratch.extend(g.neighbors(u).iter().map(|&w| vertex_type[w as usize]));
            histogram(&mut scratch, out);
        });
        let edge_types = Rows::build(n, |u, out| {
            scratch.extend(g.incident_edges(u).iter().map(|&e| et[g.edge_type(e) as usize]));
            histogram(&mut scratch, out);
        });

        let columns: Vec<usize> = vocab
            .sets
            .iter()
            .map(|&(i, j)| if side == 0 { i } else { j })
            .collect();
        let edge_tokens = Rows::build(n, |u, out| {
            for &e in g.incident_edges(u) {
                let values = g.edge_attrs(e);
                for &col in &columns {
                    if let (EdgeAttrValue::Set(ts), Some(map)) = (&values[col], &vocab.edge_tokens[side][col]) {
                        scratch.extend(ts.iter().map(|&t| map[t as usize]));
                    }
                }
            }
            histogram(&mut scratch, out);
        });

        let numeric_cols: Vec<usize> = vocab
            .numeric
            .iter()
            .map(|&(i, j)| if side == 0 { i } else { j })
            .collect();
        let value = |e, col: usize| match g.edge_attrs(e)[col] {
            EdgeAttrValue::Numeric(x) => x,
            EdgeAttrValue::Set(_) => None,
        };
        let numeric = match numeric_cols.len() {
            0 => NumericEdges::None,
            1 => NumericEdges::Single(Rows::build(n, |u, out| {
                let start = out.len();
                out.extend(g.incident_edges(u).iter().filter_map(|&e| value(e, numeric_cols[0])));
                out[start..].sort_by(|a, b| a.partial_cmp(b).unwrap());
            })),
            width => NumericEdges::Multi {
                width,
                rows: Rows::build(n, |u, out| {
                    for &e in g.incident_edges(u) {
                        out.extend(numeric_cols.iter().map(|&c| value(e, c)));
                    }
                }),
            },
        };

        Self {
            vertex_type,
            attrs,
            neighbor_types,
            edge_types,
            edge_tokens,
            numeric,
        }
    }
}
