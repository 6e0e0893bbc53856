use proptest::prelude::*;

use vantage_align::aligner::{align, write_mapping, AlignConfig};
use vantage_align::bench::{perturb, sample_anchors, stream_rng, synthetic_graph, PerturbationSpec, Stream, SyntheticSpec};
use vantage_align::graph::{parse_graph, write_graph, AttrKind, EdgeAttrDecl, EdgeAttrInput};
use vantage_align::{AttributedGraph, GraphBuilder, SimilarityConfig};

fn attributed(n: usize, edges: &[(u32, u32, u8, Option<f64>)], types: &[u8]) -> AttributedGraph {
    let schema = vec![
        EdgeAttrDecl {
            name: "tags".into(),
            kind: AttrKind::Set,
        },
        EdgeAttrDecl {
            name: "year".into(),
            kind: AttrKind::Numeric,
        },
    ];
    let mut b = GraphBuilder::new(schema);
    for (i, t) in types.iter().enumerate().take(n) {
        let attrs = [format!("w{}", t % 5), format!("x{}", i % 3)];
        b.set_vertex(&format!("v{i}"), &format!("t{t}"), &attrs);
    }
    for &(u, v, t, year) in edges {
        let (u, v) = (u % n as u32, v % n as u32);
        let tags = EdgeAttrInput::Tokens(vec![format!("k{}", t % 3)]);
        b.add_edge(u, v, &format!("e{}", t % 2), vec![tags, EdgeAttrInput::Numeric(year)]);
    }
    b.build()
}

fn text(g: &AttributedGraph) -> (Vec<u8>, Vec<u8>) {
    let (mut v, mut e) = (Vec::new(), Vec::new());
    write_graph(g, &mut v, &mut e).unwrap();
    (v, e)
}

proptest! {
    #[test]
    fn graph_files_round_trip(
        types in prop::collection::vec(0u8..4, 1..30),
        edges in prop::collection::vec((0u32..30, 0u32..30, 0u8..6, prop::option::of(1990.0f64..2020.0)), 0..80),
    ) {
        let g = attributed(types.len(), &edges, &types);
        let (v, e) = text(&g);
        let back = parse_graph(Some((&v[..], "v")), (&e[..], "e")).unwrap();
        prop_assert_eq!(back.vertex_count(), g.vertex_count());
        prop_assert_eq!(back.edge_count(), g.edge_count());
        for (_, u, w) in g.edges() {
            let (bu, bw) = (back.lookup(g.ext_id(u)).unwrap(), back.lookup(g.ext_id(w)).unwrap());
            prop_assert!(back.has_edge(bu, bw));
        }
        prop_assert_eq!(text(&back), (v, e));
    }

    #[test]
    fn perturbation_keeps_a_bijective_truth(
        n in 20usize..120,
        p_e in 0.0f64..=1.0,
        p_v in 0.0f64..=0.5,
        p_a in 0.0f64..=0.5,
        seed in any::<u64>(),
    ) {
        let spec = SyntheticSpec { vertices: n, avg_degree: 4.0, ..Default::default() };
        let g = synthetic_graph(&spec, &mut stream_rng(seed, Stream::Generate));
        let m = g.edge_count();
        let p = PerturbationSpec { edge_removal: p_e, vertex_addition: p_v, edge_addition: p_a, attr_noise: 0.0, seed };
        let (h, gt) = perturb(&g, &p).unwrap();
        let added = (p_v * n as f64).floor() as usize;
        prop_assert_eq!(h.vertex_count(), n + added);
        prop_assert_eq!(gt.len(), n);
        let mut seen = vec![false; n];
        for &(u, v) in gt.pairs() {
            prop_assert!((v as usize) < n);
            prop_assert!(!std::mem::replace(&mut seen[v as usize], true));
            prop_assert_eq!(g.vertex_type_names().name(g.vertex_type(u)), h.vertex_type_names().name(h.vertex_type(v)));
        }
        let kept = m - (p_e * m as f64).floor() as usize;
        // Kept original edges map onto edges of the copy.
        let surviving = g.edges().filter(|&(_, u, v)| h.has_edge(gt.target(u).unwrap(), gt.target(v).unwrap())).count();
        prop_assert!(surviving >= kept);
        prop_assert!(h.edge_count() >= kept);
    }
}

#[test]
fn identical_runs_write_identical_bytes() {
    let spec = SyntheticSpec {
        vertices: 800,
        ..Default::default()
    };
    let g1 = synthetic_graph(&spec, &mut stream_rng(5, Stream::Generate));
    let (g2, truth) = perturb(
        &g1,
        &PerturbationSpec {
            edge_removal: 0.05,
            ..PerturbationSpec::identity(5)
        },
    )
    .unwrap();
    let anchors = sample_anchors(&truth, 30, &mut stream_rng(5, Stream::Bootstrap));
    let cfg = AlignConfig {
        bucket_size: 100,
        ..Default::default()
    };
    let bytes = || {
        let out = align(&g1, &g2, Some(&anchors), &cfg, &SimilarityConfig::default()).unwrap();
        let mut m = Vec::new();
        write_mapping(&mut m, &out, &g1, &g2).unwrap();
        (m, serde_json::to_vec(&out.report).unwrap())
    };
    let a = bytes();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(bytes);
    assert_eq!(a, b);
}
