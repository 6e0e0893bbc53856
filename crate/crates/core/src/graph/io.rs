//! TSV readers and writers for vertex and edge files.
//!
//! Vertex file: `ext_id <TAB> type <TAB> attr1,attr2,...` (type and attrs may be empty).
//! Edge file: optional header `#edges type attrs=<name:kind,...>` with kind in
//! `{set, numeric}`, then rows `ext_u <TAB> ext_v <TAB> type <TAB> attr-values...`,
//! one column per declared attribute. Lines starting with `#` are comments.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{AttrKind, AttributedGraph, EdgeAttrDecl, EdgeAttrInput, EdgeAttrValue, GraphBuilder, GraphError};

pub(crate) fn open(path: &Path) -> Result<BufReader<File>, GraphError> {
    File::open(path).map(BufReader::new).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Splits on tabs when the line has any, otherwise on runs of whitespace.
pub(crate) fn fields(line: &str) -> Vec<&str> {
    if line.contains('\t') {
        line.split('\t').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

/// Iterates `(line_number, trimmed_line)` over non-blank, non-comment lines.
/// The `#edges` header is passed through.
pub(crate) fn data_lines<'a, R: BufRead + 'a>(
    reader: R,
    path: &'a str,
) -> impl Iterator<Item = Result<(usize, String), GraphError>> + 'a {
    reader.lines().enumerate().filter_map(move |(i, line)| match line {
        Err(source) => Some(Err(GraphError::Io {
            path: path.to_owned(),
            source,
        })),
        Ok(l) => {
            let t = l.trim_end_matches(['\r', '\n']);
            if t.trim().is_empty() || (t.starts_with('#') && !t.starts_with("#edges")) {
                None
            } else {
                Some(Ok((i + 1, t.to_owned())))
            }
        }
    })
}

fn split_tokens(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

fn parse_header(line: &str, path: &str, lineno: usize) -> Result<Vec<EdgeAttrDecl>, GraphError> {
    let malformed = |msg: String| GraphError::Malformed {
        path: path.to_owned(),
        line: lineno,
        msg,
    };
    let mut schema = Vec::new();
    for part in line.split_whitespace().skip(1) {
        let Some(spec) = part.strip_prefix("attrs=") else {
            if part == "type" {
                continue;
            }
            return Err(malformed(format!("unexpected header field {part:?}")));
        };
        for decl in spec.split(',').filter(|d| !d.is_empty()) {
            let (name, kind) = decl
                .split_once(':')
                .ok_or_else(|| malformed(format!("attribute {decl:?} needs a name:kind form")))?;
            let kind = match kind {
                "set" => AttrKind::Set,
                "numeric" => AttrKind::Numeric,
                other => return Err(malformed(format!("unknown attribute kind {other:?}"))),
            };
            if schema.iter().any(|d: &EdgeAttrDecl| d.name == name) {
                return Err(malformed(format!("attribute {name:?} declared twice")));
            }
            schema.push(EdgeAttrDecl {
                name: name.to_owned(),
                kind,
            });
        }
    }
    Ok(schema)
}

/// Parses a graph from an optional vertex stream and an edge stream.
///
/// Vertices appearing only in the edge stream are created untyped and
/// attribute-free, after all listed vertices, in order of first appearance.
pub fn parse_graph<V: BufRead, E: BufRead>(
    vertices: Option<(V, &str)>,
    edges: (E, &str),
) -> Result<AttributedGraph, GraphError> {
    let (edge_reader, edge_path) = edges;
    let mut edge_lines = data_lines(edge_reader, edge_path).peekable();
    let mut schema = Vec::new();
    if let Some(Ok((lineno, line))) = edge_lines.peek() {
        if line.starts_with("#edges") {
            schema = parse_header(line, edge_path, *lineno)?;
            edge_lines.next();
        }
    }
    let mut b = GraphBuilder::new(schema);

    if let Some((reader, path)) = vertices {
        for item in data_lines(reader, path) {
            let (lineno, line) = item?;
            if line.starts_with("#edges") {
                continue;
            }
            let f = fields(&line);
            if f.len() > 3 || f.is_empty() || f[0].is_empty() {
                return Err(GraphError::Malformed {
                    path: path.to_owned(),
                    line: lineno,
                    msg: format!("expected `id<TAB>type<TAB>attrs`, got {} fields", f.len()),
                });
            }
            if b.lookup(f[0]).is_some() {
                return Err(GraphError::Malformed {
                    path: path.to_owned(),
                    line: lineno,
                    msg: format!("vertex {:?} listed twice", f[0]),
                });
            }
            let vtype = f.get(1).copied().unwrap_or("");
            let attrs = f.get(2).map(|a| split_tokens(a)).unwrap_or_default();
            b.set_vertex(f[0], vtype, &attrs);
        }
    }

    let ncols = 3 + b.schema().len();
    for item in edge_lines {
        let (lineno, line) = item?;
        let malformed = |msg: String| GraphError::Malformed {
            path: edge_path.to_owned(),
            line: lineno,
            msg,
        };
        if line.starts_with("#edges") {
            return Err(malformed("edge header must be the first data line".into()));
        }
        let f = fields(&line);
        if f.len() < 2 || f.len() > ncols || f[0].is_empty() || f[1].is_empty() {
            return Err(malformed(format!("expected 2..={ncols} fields, got {}", f.len())));
        }
        let etype = f.get(2).copied().unwrap_or("");
        let mut attrs = Vec::with_capacity(b.schema().len());
        for (i, decl) in b.schema().iter().enumerate() {
            let raw = f.get(3 + i).copied().unwrap_or("");
            attrs.push(match decl.kind {
                AttrKind::Set => EdgeAttrInput::Tokens(split_tokens(raw)),
                AttrKind::Numeric if raw.is_empty() => EdgeAttrInput::Numeric(None),
                AttrKind::Numeric => match raw.parse::<f64>() {
                    Ok(x) if x.is_finite() => EdgeAttrInput::Numeric(Some(x)),
                    _ => {
                        return Err(malformed(format!(
                            "attribute {:?} expects a number, got {raw:?}",
                            decl.name
                        )))
                    }
                },
            });
        }
        let u = b.ensure_vertex(f[0]);
        let v = b.ensure_vertex(f[1]);
        b.add_edge(u, v, etype, attrs);
    }
    Ok(b.build())
}

/// Loads a graph from an optional vertex file and an edge file.
pub fn load_graph(vertex_file: Option<&Path>, edge_file: &Path) -> Result<AttributedGraph, GraphError> {
    let vpath = vertex_file.map(|p| p.display().to_string());
    let epath = edge_file.display().to_string();
    let vertices = match vertex_file {
        Some(p) => Some((open(p)?, vpath.as_deref().unwrap())),
        None => None,
    };
    parse_graph(vertices, (open(edge_file)?, epath.as_str()))
}

/// Writes `g` in the format read by [`parse_graph`].
pub fn write_graph<V: Write, E: Write>(g: &AttributedGraph, vertices: V, edges: E) -> std::io::Result<()> {
    let mut vw = BufWriter::new(vertices);
    for u in g.vertices() {
        let attrs: Vec<&str> = g.vertex_attr_names(u).collect();
        writeln!(
            vw,
            "{}\t{}\t{}",
            g.ext_id(u),
            g.vertex_type_names().name(g.vertex_type(u)),
            attrs.join(",")
        )?;
    }
    vw.flush()?;

    let mut ew = BufWriter::new(edges);
    let decls: Vec<String> = g
        .edge_schema()
        .iter()
        .map(|d| {
            let kind = match d.kind {
                AttrKind::Set => "set",
                AttrKind::Numeric => "numeric",
            };
            format!("{}:{kind}", d.name)
        })
        .collect();
    writeln!(ew, "#edges type attrs={}", decls.join(","))?;
    for (e, u, v) in g.edges() {
        write!(
            ew,
            "{}\t{}\t{}",
            g.ext_id(u),
            g.ext_id(v),
            g.edge_type_names().name(g.edge_type(e))
        )?;
        for value in g.edge_attrs(e) {
            match value {
                EdgeAttrValue::Set(ts) => {
                    let names: Vec<&str> = ts.iter().map(|&t| g.edge_tokens().name(t)).collect();
                    write!(ew, "\t{}", names.join(","))?;
                }
                EdgeAttrValue::Numeric(Some(x)) => write!(ew, "\t{x}")?,
                EdgeAttrValue::Numeric(None) => write!(ew, "\t")?,
            }
        }
        writeln!(ew)?;
    }
    ew.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(vertices: Option<&str>, edges: &str) -> Result<AttributedGraph, GraphError> {
        parse_graph(vertices.map(|v| (v.as_bytes(), "v.tsv")), (edges.as_bytes(), "e.tsv"))
    }

    #[test]
    fn three_vertex_path() {
        let g = parse(None, "a\tb\nb\tc\n").unwrap();
        let (a, b, c) = (g.lookup("a").unwrap(), g.lookup("b").unwrap(), g.lookup("c").unwrap());
        assert_eq!(g.neighbors(b), &[a, c]);
        assert_eq!(g.neighbors(a), &[b]);
    }

    #[test]
    fn reversed_duplicate_is_one_edge() {
        let g = parse(None, "a b\nb a\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.vertex_count(), 2);
    }

    #[test]
    fn edge_only_vertices_are_created_blank() {
        let g = parse(Some("a\tperson\tx,y\n"), "a\tz\n").unwrap();
        let z = g.lookup("z").unwrap();
        assert_eq!(z, 1);
        assert_eq!(g.vertex_type(z), super::super::UNTYPED);
        assert!(g.vertex_attrs(z).is_empty());
        assert_eq!(g.vertex_attrs(0).len(), 2);
    }

    #[test]
    fn header_declares_typed_columns() {
        let g = parse(
            None,
            "# comment\n#edges type attrs=year:numeric,venue:set\na\tb\tcoauthor\t2014\tkdd,icdm\nb\tc\t\t\t\n",
        )
        .unwrap();
        assert_eq!(g.edge_schema().len(), 2);
        assert_eq!(g.edge_attrs(0)[0], EdgeAttrValue::Numeric(Some(2014.0)));
        assert!(matches!(&g.edge_attrs(0)[1], EdgeAttrValue::Set(s) if s.len() == 2));
        assert_eq!(g.edge_attrs(1)[0], EdgeAttrValue::Numeric(None));
    }

    #[test]
    fn non_numeric_value_reports_line() {
        let err = parse(None, "#edges type attrs=year:numeric\na\tb\tt\t20x4\n").unwrap_err();
        match err {
            GraphError::Malformed { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn too_many_columns_is_malformed() {
        let err = parse(None, "a\tb\n\nc\td\tt\textra\n").unwrap_err();
        assert!(matches!(err, GraphError::Malformed { line: 3, .. }), "{err}");
    }

    #[test]
    fn duplicate_vertex_line_is_rejected() {
        let err = parse(Some("a\t\t\na\tt\t\n"), "a\tb\n").unwrap_err();
        assert!(matches!(err, GraphError::Malformed { line: 2, .. }));
    }

    #[test]
    fn unknown_attr_kind_is_rejected() {
        assert!(parse(None, "#edges type attrs=w:float\na\tb\n").is_err());
    }
}
