use std::collections::BTreeSet;

use proptest::prelude::*;

use super::*;
use crate::graph::{AttrKind, EdgeAttrDecl, EdgeAttrInput, GraphBuilder};

const TOL: f64 = 1e-12;

fn assert_close(a: f64, b: f64) {
    assert!((a - b).abs() < TOL, "{a} != {b}");
}

fn ctx<'g>(g1: &'g AttributedGraph, g2: &'g AttributedGraph) -> SimilarityContext<'g, f64> {
    SimilarityContext::new(g1, g2, &SimilarityConfig::default())
}

#[test]
fn type_gate_zeroes_everything() {
    let mut b = GraphBuilder::default();
    b.set_vertex("a", "human", &["x"]);
    let g1 = b.build();
    let mut b = GraphBuilder::default();
    b.set_vertex("a", "shop", &["x"]);
    let g2 = b.build();
    let c = ctx(&g1, &g2);
    let s = c.sigma(0, 0, &AnchorIndex::empty(&g1, &g2));
    assert_eq!(s.tau, 0.0);
    assert_eq!(s.total, 0.0);
    assert_eq!(c.score(0, 0, &AnchorIndex::empty(&g1, &g2)), 0.0);
}

#[test]
fn metadata_free_upper_bound() {
    let s = SimilarityScore::combine(1.0, 1.0, 1.0, None, None, None, None);
    assert_eq!(s.total, 1.0);
}

#[test]
fn six_component_average() {
    let s = SimilarityScore::combine(1.0, 0.5, 0.8, Some(1.0), Some(1.0), Some(0.2), Some(0.0));
    // (0.5 + 0.8 + 1 + 1 + 0.2 + 0) / 6
    assert_close(s.total, 3.5 / 6.0);
    assert_close(s.total, 0.583_333_333_333_333_3);
}

/// Literal set evaluation of the anchor ratio on explicit neighbor sets.
fn anchor_oracle(
    n1u: &BTreeSet<u32>,
    n2v: &BTreeSet<u32>,
    anchors: &[(u32, u32)],
) -> f64 {
    let num = anchors
        .iter()
        .filter(|(w, x)| n1u.contains(w) && n2v.contains(x))
        .count();
    // Each anchor pair contributes once if either side appears in the neighborhoods.
    let mut den = 0;
    for (w, x) in anchors {
        let left = n1u.contains(w);
        let right = n2v.contains(x);
        den += match (left, right) {
            (true, true) => 1,
            (true, false) | (false, true) => 1,
            _ => 0,
        };
    }
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[test]
fn anchor_similarity_one_third() {
    // G1: u = 0 adjacent to anchors a = 1, b = 2; c = 3 is another anchor.
    // G2: v = 0 adjacent to mu(a) = 11 and mu(c) = 13; mu(b) = 12 elsewhere.
    let g1 = AttributedGraph::from_edges(10, &[(0, 1), (0, 2), (3, 4), (5, 6)]);
    let g2 = AttributedGraph::from_edges(14, &[(0, 11), (0, 13), (12, 5)]);
    let anchors = [(1, 11), (2, 12), (3, 13)];
    let idx = AnchorIndex::new(&g1, &g2, &anchors);
    let got = ctx(&g1, &g2).anchor_similarity(0, 0, &idx);
    let n1: BTreeSet<u32> = g1.neighbors(0).iter().copied().collect();
    let n2: BTreeSet<u32> = g2.neighbors(0).iter().copied().collect();
    assert_close(got, anchor_oracle(&n1, &n2, &anchors));
    assert_close(got, 1.0 / 3.0);
}

#[test]
fn anchor_similarity_empty_and_full() {
    let g = AttributedGraph::from_edges(4, &[(0, 1), (0, 2), (2, 3)]);
    let c = ctx(&g, &g);
    assert_eq!(c.anchor_similarity(0, 0, &AnchorIndex::empty(&g, &g)), 0.0);
    let idx = AnchorIndex::new(&g, &g, &[(1, 1), (2, 2)]);
    assert_eq!(c.anchor_similarity(0, 0, &idx), 1.0);
}

#[test]
fn relative_degree_examples() {
    assert_eq!(relative_degree_distance::<f64>(4, 4), 1.0);
    assert_close(relative_degree_distance(2, 6), 0.5);
    assert_close(relative_degree_distance(0, 5), 1.0 / 3.0);
    assert_eq!(relative_degree_distance::<f64>(0, 0), 1.0);
}

#[test]
fn neighbor_type_examples() {
    assert_eq!(histogram_similarity::<f64>(&[(1, 2), (2, 1)], &[(1, 2), (2, 1)]), 1.0);
    assert_eq!(histogram_similarity::<f64>(&[(1, 2)], &[(2, 3)]), 0.0);
    assert_close(histogram_similarity(&[(1, 2), (2, 1)], &[(1, 1), (2, 1)]), 2.0 / 3.0);
    assert_eq!(histogram_similarity::<f64>(&[], &[]), 1.0);
}

#[test]
fn neighbor_type_histograms_from_graphs() {
    // u has neighbors of types A, A, B; v has A, B.
    let mut b = GraphBuilder::default();
    let u = b.set_vertex("u", "", &[] as &[&str]);
    for (name, t) in [("p", "A"), ("q", "A"), ("r", "B")] {
        let w = b.set_vertex(name, t, &[] as &[&str]);
        b.add_edge(u, w, "", vec![]);
    }
    let g1 = b.build();
    let mut b = GraphBuilder::default();
    let v = b.set_vertex("v", "", &[] as &[&str]);
    for (name, t) in [("p", "A"), ("r", "B")] {
        let w = b.set_vertex(name, t, &[] as &[&str]);
        b.add_edge(v, w, "", vec![]);
    }
    let g2 = b.build();
    assert_close(ctx(&g1, &g2).neighbor_vertex_types(0, 0), 2.0 / 3.0);
}

fn attr_graph(attrs: &[&str]) -> AttributedGraph {
    let mut b = GraphBuilder::default();
    b.set_vertex("a", "", attrs);
    b.build()
}

#[test]
fn vertex_attr_examples() {
    let (a, b) = (attr_graph(&["x", "y"]), attr_graph(&["y", "z"]));
    assert_close(ctx(&a, &b).vertex_attr_similarity(0, 0), 1.0 / 3.0);
    assert_eq!(ctx(&a, &a).vertex_attr_similarity(0, 0), 1.0);
    let c = attr_graph(&["q"]);
    assert_eq!(ctx(&a, &c).vertex_attr_similarity(0, 0), 0.0);
    let e = attr_graph(&[]);
    assert_eq!(ctx(&e, &e).vertex_attr_similarity(0, 0), 0.0);
}

#[test]
fn vertex_attr_weights() {
    let (a, b) = (attr_graph(&["x", "y"]), attr_graph(&["y", "z"]));
    let mut cfg = SimilarityConfig::<f64>::default();
    cfg.token_weights.insert("y".into(), 3.0);
    let c = SimilarityContext::new(&a, &b, &cfg);
    assert_close(c.vertex_attr_similarity(0, 0), 3.0 / 5.0);
}

#[test]
fn external_table_replaces_vertex_attrs() {
    let (a, b) = (attr_graph(&["x"]), attr_graph(&["x"]));
    let mut table = ExternalSimilarity::new();
    table.set(0, 0, 0.25);
    let cfg = SimilarityConfig {
        external: Some(table),
        ..Default::default()
    };
    let c = SimilarityContext::new(&a, &b, &cfg);
    assert_eq!(c.vertex_attr_similarity(0, 0), 0.25);
    assert!(c.components().vertex_attrs);
}

fn year_graph(years: &[f64]) -> AttributedGraph {
    let mut b = GraphBuilder::new(vec![EdgeAttrDecl {
        name: "year".into(),
        kind: AttrKind::Numeric,
    }]);
    let c = b.ensure_vertex("c");
    for (i, &y) in years.iter().enumerate() {
        let w = b.ensure_vertex(&format!("n{i}"));
        b.add_edge(c, w, "", vec![EdgeAttrInput::Numeric(Some(y))]);
    }
    b.build()
}

#[test]
fn numeric_edge_attr_examples() {
    let (a, b) = (year_graph(&[2014.0, 2016.0]), year_graph(&[2014.0]));
    let c = ctx(&a, &b);
    assert_close(c.edge_attr_similarity(0, 0), 0.5);
    let same = year_graph(&[2000.0, 2000.0, 2000.0]);
    assert_eq!(ctx(&same, &same).edge_attr_similarity(0, 0), 1.0);
    let lonely = year_graph(&[]);
    assert_eq!(ctx(&lonely, &a).edge_attr_similarity(0, 0), 0.0);
}

#[test]
fn categorical_edge_attrs_use_multiset_jaccard() {
    let mk = |venues: &[&str]| {
        let mut b = GraphBuilder::new(vec![EdgeAttrDecl {
            name: "venue".into(),
            kind: AttrKind::Set,
        }]);
        let c = b.ensure_vertex("c");
        for (i, v) in venues.iter().enumerate() {
            let w = b.ensure_vertex(&format!("n{i}"));
            b.add_edge(c, w, "", vec![EdgeAttrInput::Tokens(vec![v.to_string()])]);
        }
        b.build()
    };
    let (a, b) = (mk(&["kdd", "kdd", "icdm"]), mk(&["kdd", "vldb"]));
    // kdd: min(2,1)=1, max 2; icdm: 0/1; vldb: 0/1 -> 1/4
    assert_close(ctx(&a, &b).edge_attr_similarity(0, 0), 0.25);
}

#[test]
fn metadata_free_graphs_reduce_to_two_components() {
    let g = AttributedGraph::from_edges(3, &[(0, 1), (1, 2)]);
    let c = ctx(&g, &g);
    assert_eq!(c.components(), Components::none());
    let s = c.sigma(1, 1, &AnchorIndex::new(&g, &g, &[(0, 0)]));
    // alpha: anchor 0 in both neighborhoods, matched -> 1/1; delta 1.
    assert_eq!(s.total, 1.0);
    let s = c.sigma(0, 1, &AnchorIndex::empty(&g, &g));
    assert_close(s.total, (0.0 + relative_degree_distance::<f64>(1, 2)) / 2.0);
}

#[test]
fn works_in_single_precision() {
    let (a, b) = (attr_graph(&["x", "y"]), attr_graph(&["y", "z"]));
    let c = SimilarityContext::<f32>::new(&a, &b, &SimilarityConfig::default());
    assert!((c.vertex_attr_similarity(0, 0) - 1.0 / 3.0).abs() < 1e-6);
}

// ---------------------------------------------------------------------------
// Randomized properties

#[derive(Debug, Clone)]
struct Fixture {
    n: usize,
    edges: Vec<(u32, u32, u8, Option<u8>, u8)>,
    types: Vec<u8>,
    attrs: Vec<Vec<u8>>,
}

fn fixture() -> impl Strategy<Value = Fixture> {
    (1usize..9).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec((0..n as u32, 0..n as u32, 0u8..3, prop::option::of(0u8..6), 0u8..3), 0..20),
            prop::collection::vec(0u8..3, n),
            prop::collection::vec(prop::collection::vec(0u8..5, 0..4), n),
        )
            .prop_map(|(n, edges, types, attrs)| Fixture { n, edges, types, attrs })
    })
}

fn build(f: &Fixture, typed: bool) -> AttributedGraph {
    let mut b = GraphBuilder::new(vec![
        EdgeAttrDecl {
            name: "year".into(),
            kind: AttrKind::Numeric,
        },
        EdgeAttrDecl {
            name: "tag".into(),
            kind: AttrKind::Set,
        },
    ]);
    for i in 0..f.n {
        let t = if typed { format!("t{}", f.types[i]) } else { String::new() };
        let attrs: Vec<String> = f.attrs[i].iter().map(|a| format!("a{a}")).collect();
        b.set_vertex(&i.to_string(), &t, &attrs);
    }
    for &(u, v, t, y, tag) in &f.edges {
        b.add_edge(
            u,
            v,
            &format!("e{t}"),
            vec![
                EdgeAttrInput::Numeric(y.map(|y| 2010.0 + y as f64)),
                EdgeAttrInput::Tokens(vec![format!("g{tag}")]),
            ],
        );
    }
    b.build()
}

fn in_unit(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn components_are_bounded_and_gated(
        f1 in fixture(),
        f2 in fixture(),
        anchor_seed in prop::collection::vec((0u32..9, 0u32..9), 0..5),
        eps in 0.1f64..3.0,
    ) {
        let g1 = build(&f1, true);
        let g2 = build(&f2, true);
        let mut seen1 = BTreeSet::new();
        let mut seen2 = BTreeSet::new();
        let anchors: Vec<(u32, u32)> = anchor_seed
            .into_iter()
            .filter(|&(u, v)| (u as usize) < f1.n && (v as usize) < f2.n)
            .filter(|&(u, v)| seen1.insert(u) & seen2.insert(v))
            .collect();
        let idx = AnchorIndex::new(&g1, &g2, &anchors);
        let cfg = SimilarityConfig { closeness: eps, ..Default::default() };
        let c = SimilarityContext::new(&g1, &g2, &cfg);
        let plain = SimilarityContext::new(&g1, &g2, &SimilarityConfig { components: Some(Components::none()), ..cfg.clone() });
        for u in g1.vertices() {
            for v in g2.vertices() {
                let s = c.sigma(u, v, &idx);
                for x in [s.total, s.tau, s.anchor, s.degree]
                    .into_iter()
                    .chain(s.vertex_types)
                    .chain(s.edge_types)
                    .chain(s.vertex_attrs)
                    .chain(s.edge_attrs)
                {
                    prop_assert!(in_unit(x), "component {x} out of range: {s:?}");
                }
                if g1.vertex_type(u) != 0 && f1.types[u as usize] != f2.types[v as usize] {
                    prop_assert_eq!(s.total, 0.0);
                }
                prop_assert_eq!(c.score(u, v, &idx), s.total);
                // Two-component form.
                let p = plain.sigma(u, v, &idx);
                prop_assert_eq!(p.total, s.tau * (s.anchor + s.degree) / 2.0);
                // Anchor ratio against the set oracle.
                let n1: BTreeSet<u32> = g1.neighbors(u).iter().copied().collect();
                let n2: BTreeSet<u32> = g2.neighbors(v).iter().copied().collect();
                prop_assert!((s.anchor - anchor_oracle(&n1, &n2, &anchors)).abs() < TOL);
                // Numeric closeness against the double loop.
                let years = |g: &AttributedGraph, x: u32| -> Vec<Option<f64>> {
                    g.incident_edges(x).iter().map(|&e| match g.edge_attrs(e)[0] {
                        crate::graph::EdgeAttrValue::Numeric(y) => y,
                        _ => None,
                    }).collect()
                };
                let (y1, y2) = (years(&g1, u), years(&g2, v));
                let mut count = 0;
                for a in &y1 {
                    for b in &y2 {
                        if let (Some(a), Some(b)) = (a, b) {
                            if (a - b).abs() < eps { count += 1; }
                        }
                    }
                }
                let expect = if y1.is_empty() || y2.is_empty() { 0.0 } else { count as f64 / (y1.len() * y2.len()) as f64 };
                prop_assert!((s.edge_attrs.unwrap() - expect).abs() < TOL);
            }
        }
    }

    #[test]
    fn untyped_graphs_never_gate(f1 in fixture(), f2 in fixture()) {
        let g1 = build(&f1, false);
        let g2 = build(&f2, false);
        let c = ctx(&g1, &g2);
        for u in g1.vertices() {
            for v in g2.vertices() {
                prop_assert_eq!(c.tau(u, v), 1.0);
            }
        }
    }

    #[test]
    fn close_pairs_matches_double_loop(
        mut a in prop::collection::vec(-50.0f64..50.0, 0..30),
        mut b in prop::collection::vec(-50.0f64..50.0, 0..30),
        eps in 0.0f64..10.0,
    ) {
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let brute = a.iter().map(|x| b.iter().filter(|y| (x - *y).abs() < eps).count()).sum::<usize>();
        prop_assert_eq!(close_pairs(&a, &b, eps), brute);
    }

    #[test]
    fn adding_a_matched_anchor_neighbor_never_lowers_alpha(extra in 3u32..8) {
        // u = 0 and v = 0 share anchor 1 <-> 1; add anchor `extra` adjacent to both.
        let edges: Vec<(u32, u32)> = (1..8).map(|i| (0, i)).collect();
        let g = AttributedGraph::from_edges(8, &edges);
        let c = ctx(&g, &g);
        let before = c.anchor_similarity(0, 0, &AnchorIndex::new(&g, &g, &[(1, 1), (2, 3)]));
        let after = c.anchor_similarity(0, 0, &AnchorIndex::new(&g, &g, &[(1, 1), (2, 3), (extra, extra)]));
        prop_assert!(after >= before);
    }
}
