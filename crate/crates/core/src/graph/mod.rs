//! Attributed, undirected, immutable-after-load graphs.
//!
//! Vertices carry a type and a set of attribute tokens; edges carry a type and
//! a list of attribute values, each either a token set or a numeric value as
//! declared by the edge schema. All string labels are interned per graph;
//! cross-graph comparisons go through [`crate::similarity::Vocabulary`].

mod io;
mod pairs;

use std::collections::HashMap;

pub use io::{load_graph, parse_graph, write_graph};
pub(crate) use io::{data_lines as io_lines, fields as io_fields, open as io_open};
pub use pairs::{load_anchor_map, load_ground_truth, parse_pairs, write_pairs, AnchorMap, AnchorSource, GroundTruth};

pub type VertexId = u32;
pub type EdgeId = u32;
/// Index into a graph's type interner. `0` is always the empty (untyped) label.
pub type TypeId = u32;
pub type TokenId = u32;

pub const UNTYPED: TypeId = 0;

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Malformed { path: String, line: usize, msg: String },
    #[error("{path}:{line}: unknown vertex id {id:?}")]
    UnknownVertex { path: String, line: usize, id: String },
    #[error("{path}:{line}: duplicate {side} id {id:?} breaks injectivity")]
    NotInjective {
        path: String,
        line: usize,
        side: &'static str,
        id: String,
    },
}

/// Bidirectional string <-> dense id table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interner {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl Interner {
    /// An interner whose id 0 is the empty string.
    pub fn with_empty() -> Self {
        let mut it = Self::default();
        it.intern("");
        it
    }

    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttrKind {
    Set,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeAttrDecl {
    pub name: String,
    pub kind: AttrKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EdgeAttrValue {
    /// Sorted, deduplicated token ids.
    Set(Vec<TokenId>),
    Numeric(Option<f64>),
}

/// Attribute value in string form, as fed to a [`GraphBuilder`].
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeAttrInput {
    Tokens(Vec<String>),
    Numeric(Option<f64>),
}

#[derive(Debug, Clone)]
pub struct AttributedGraph {
    ext_ids: Vec<String>,
    ext_index: HashMap<String, VertexId>,
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    incident: Vec<EdgeId>,
    vertex_types: Vec<TypeId>,
    vertex_type_names: Interner,
    vertex_attrs: Vec<Vec<TokenId>>,
    vertex_tokens: Interner,
    endpoints: Vec<(VertexId, VertexId)>,
    edge_types: Vec<TypeId>,
    edge_type_names: Interner,
    schema: Vec<EdgeAttrDecl>,
    edge_attrs: Vec<Vec<EdgeAttrValue>>,
    edge_tokens: Interner,
}

impl AttributedGraph {
    pub fn vertex_count(&self) -> usize {
        self.ext_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ext_ids.is_empty()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> {
        0..self.vertex_count() as VertexId
    }

    /// Sorted neighbor ids of `u`.
    #[inline]
    pub fn neighbors(&self, u: VertexId) -> &[VertexId] {
        let u = u as usize;
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Edge ids incident to `u`, parallel to [`Self::neighbors`].
    #[inline]
    pub fn incident_edges(&self, u: VertexId) -> &[EdgeId] {
        let u = u as usize;
        &self.incident[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn degree(&self, u: VertexId) -> usize {
        let u = u as usize;
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn ext_id(&self, u: VertexId) -> &str {
        &self.ext_ids[u as usize]
    }

    pub fn lookup(&self, ext: &str) -> Option<VertexId> {
        self.ext_index.get(ext).copied()
    }

    #[inline]
    pub fn vertex_type(&self, u: VertexId) -> TypeId {
        self.vertex_types[u as usize]
    }

    pub fn vertex_type_names(&self) -> &Interner {
        &self.vertex_type_names
    }

    #[inline]
    pub fn vertex_attrs(&self, u: VertexId) -> &[TokenId] {
        &self.vertex_attrs[u as usize]
    }

    pub fn vertex_tokens(&self) -> &Interner {
        &self.vertex_tokens
    }

    pub fn edge_endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.endpoints[e as usize]
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, VertexId, VertexId)> + '_ {
        self.endpoints
            .iter()
            .enumerate()
            .map(|(e, &(u, v))| (e as EdgeId, u, v))
    }

    #[inline]
    pub fn edge_type(&self, e: EdgeId) -> TypeId {
        self.edge_types[e as usize]
    }

    pub fn edge_type_names(&self) -> &Interner {
        &self.edge_type_names
    }

    pub fn edge_schema(&self) -> &[EdgeAttrDecl] {
        &self.schema
    }

    pub fn edge_attrs(&self, e: EdgeId) -> &[EdgeAttrValue] {
        &self.edge_attrs[e as usize]
    }

    pub fn edge_tokens(&self) -> &Interner {
        &self.edge_tokens
    }

    /// True when at least one vertex carries a non-empty type.
    pub fn has_vertex_types(&self) -> bool {
        self.vertex_types.iter().any(|&t| t != UNTYPED)
    }

    pub fn has_edge_types(&self) -> bool {
        self.edge_types.iter().any(|&t| t != UNTYPED)
    }

    pub fn has_vertex_attrs(&self) -> bool {
        self.vertex_attrs.iter().any(|a| !a.is_empty())
    }

    pub fn has_edge_attrs(&self) -> bool {
        !self.schema.is_empty()
    }

    /// Vertex attribute tokens of `u` as strings.
    pub fn vertex_attr_names(&self, u: VertexId) -> impl Iterator<Item = &str> {
        self.vertex_attrs(u).iter().map(|&t| self.vertex_tokens.name(t))
    }

    /// Edge attribute values of `e` in builder form.
    pub fn edge_attr_inputs(&self, e: EdgeId) -> Vec<EdgeAttrInput> {
        self.edge_attrs(e)
            .iter()
            .map(|v| match v {
                EdgeAttrValue::Set(ts) => EdgeAttrInput::Tokens(
                    ts.iter().map(|&t| self.edge_tokens.name(t).to_owned()).collect(),
                ),
                EdgeAttrValue::Numeric(x) => EdgeAttrInput::Numeric(*x),
            })
            .collect()
    }
}

/// Incrementally assembles an [`AttributedGraph`].
///
/// Self-loops are dropped, edges are undirected, and repeated edges keep the
/// type and attributes of their first occurrence.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    ext_ids: Vec<String>,
    ext_index: HashMap<String, VertexId>,
    vertex_types: Vec<TypeId>,
    vertex_type_names: Interner,
    vertex_attrs: Vec<Vec<TokenId>>,
    vertex_tokens: Interner,
    edge_index: HashMap<(VertexId, VertexId), EdgeId>,
    endpoints: Vec<(VertexId, VertexId)>,
    edge_types: Vec<TypeId>,
    edge_type_names: Interner,
    schema: Vec<EdgeAttrDecl>,
    edge_attrs: Vec<Vec<EdgeAttrValue>>,
    edge_tokens: Interner,
}

impl Default for GraphBuilder {
    fn default() -> Self {
        Self::new(Vec::new())
    }
}

impl GraphBuilder {
    pub fn new(schema: Vec<EdgeAttrDecl>) -> Self {
        Self {
            ext_ids: Vec::new(),
            ext_index: HashMap::new(),
            vertex_types: Vec::new(),
            vertex_type_names: Interner::with_empty(),
            vertex_attrs: Vec::new(),
            vertex_tokens: Interner::default(),
            edge_index: HashMap::new(),
            endpoints: Vec::new(),
            edge_types: Vec::new(),
            edge_type_names: Interner::with_empty(),
            schema,
            edge_attrs: Vec::new(),
            edge_tokens: Interner::default(),
        }
    }

    pub fn schema(&self) -> &[EdgeAttrDecl] {
        &self.schema
    }

    pub fn vertex_count(&self) -> usize {
        self.ext_ids.len()
    }

    pub fn lookup(&self, ext: &str) -> Option<VertexId> {
        self.ext_index.get(ext).copied()
    }

    /// Returns the id of `ext`, creating an untyped, attribute-free vertex if needed.
    pub fn ensure_vertex(&mut self, ext: &str) -> VertexId {
        if let Some(id) = self.lookup(ext) {
            return id;
        }
        let id = self.ext_ids.len() as VertexId;
        self.ext_ids.push(ext.to_owned());
        self.ext_index.insert(ext.to_owned(), id);
        self.vertex_types.push(UNTYPED);
        self.vertex_attrs.push(Vec::new());
        id
    }

    /// Creates or overwrites the labels of vertex `ext`.
    pub fn set_vertex<S: AsRef<str>>(&mut self, ext: &str, vtype: &str, attrs: &[S]) -> VertexId {
        let id = self.ensure_vertex(ext);
        self.vertex_types[id as usize] = self.vertex_type_names.intern(vtype);
        let mut toks: Vec<TokenId> = attrs
            .iter()
            .map(|a| a.as_ref())
            .filter(|a| !a.is_empty())
            .map(|a| self.vertex_tokens.intern(a))
            .collect();
        toks.sort_unstable();
        toks.dedup();
        self.vertex_attrs[id as usize] = toks;
        id
    }

    /// Adds the undirected edge `{u, v}`. Returns `false` for self-loops and
    /// duplicates, which are ignored.
    ///
    /// Panics if `attrs` does not match the schema's arity or kinds.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId, etype: &str, attrs: Vec<EdgeAttrInput>) -> bool {
        if u == v {
            return false;
        }
        let key = (u.min(v), u.max(v));
        if self.edge_index.contains_key(&key) {
            return false;
        }
        assert_eq!(attrs.len(), self.schema.len(), "edge attribute arity mismatch");
        let values = attrs
            .into_iter()
            .zip(&self.schema)
            .map(|(a, decl)| match (a, decl.kind) {
                (EdgeAttrInput::Tokens(ts), AttrKind::Set) => {
                    let mut ids: Vec<TokenId> = ts
                        .iter()
                        .filter(|t| !t.is_empty())
                        .map(|t| self.edge_tokens.intern(t))
                        .collect();
                    ids.sort_unstable();
                    ids.dedup();
                    EdgeAttrValue::Set(ids)
                }
                (EdgeAttrInput::Numeric(x), AttrKind::Numeric) => EdgeAttrValue::Numeric(x),
                (_, kind) => panic!("edge attribute {:?} expects {kind:?}", decl.name),
            })
            .collect();
        let e = self.endpoints.len() as EdgeId;
        self.edge_index.insert(key, e);
        self.endpoints.push(key);
        let t = self.edge_type_names.intern(etype);
        self.edge_types.push(t);
        self.edge_attrs.push(values);
        true
    }

    /// Empty attribute values matching the schema.
    pub fn blank_attrs(&self) -> Vec<EdgeAttrInput> {
        self.schema
            .iter()
            .map(|d| match d.kind {
                AttrKind::Set => EdgeAttrInput::Tokens(Vec::new()),
                AttrKind::Numeric => EdgeAttrInput::Numeric(None),
            })
            .collect()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edge_index.contains_key(&(u.min(v), u.max(v)))
    }

    pub fn build(self) -> AttributedGraph {
        let n = self.ext_ids.len();
        let mut degree = vec![0usize; n];
        for &(u, v) in &self.endpoints {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut slots: Vec<(VertexId, EdgeId)> = vec![(0, 0); offsets[n]];
        let mut cursor = offsets[..n].to_vec();
        for (e, &(u, v)) in self.endpoints.iter().enumerate() {
            slots[cursor[u as usize]] = (v, e as EdgeId);
            cursor[u as usize] += 1;
            slots[cursor[v as usize]] = (u, e as EdgeId);
            cursor[v as usize] += 1;
        }
        for u in 0..n {
            slots[offsets[u]..offsets[u + 1]].sort_unstable();
        }
        let (neighbors, incident) = slots.into_iter().unzip();
        AttributedGraph {
            ext_ids: self.ext_ids,
            ext_index: self.ext_index,
            offsets,
            neighbors,
            incident,
            vertex_types: self.vertex_types,
            vertex_type_names: self.vertex_type_names,
            vertex_attrs: self.vertex_attrs,
            vertex_tokens: self.vertex_tokens,
            endpoints: self.endpoints,
            edge_types: self.edge_types,
            edge_type_names: self.edge_type_names,
            schema: self.schema,
            edge_attrs: self.edge_attrs,
            edge_tokens: self.edge_tokens,
        }
    }
}

impl AttributedGraph {
    /// Builds a label-free graph from an edge list over `n` vertices named `0..n`.
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Self {
        let mut b = GraphBuilder::default();
        for i in 0..n {
            b.ensure_vertex(&i.to_string());
        }
        for &(u, v) in edges {
            b.add_edge(u, v, "", Vec::new());
        }
        b.build()
    }
}
