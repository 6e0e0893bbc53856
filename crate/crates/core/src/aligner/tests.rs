use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::graph::GraphBuilder;

fn matching_with(n: usize, pairs: &[(u32, u32, f64)]) -> Matching<f64> {
    let mut lists = CandidateLists::new(n, 1);
    for &(u, v, s) in pairs {
        lists.insert(v, u, s);
    }
    let mut mu = Matching::new(n, n);
    greedy_map(&lists, &mut mu);
    mu
}

#[test]
fn growth_adds_all_eligible_on_shortfall() {
    let initial: Vec<(u32, u32)> = (0..48).map(|i| (i, i)).collect();
    let mut state = AnchorGrowth::new(initial);
    let mapped: Vec<(u32, u32, f64)> = (100..110).map(|i| (i, i, 0.5)).collect();
    let mu = matching_with(200, &mapped);
    assert_eq!(grow_anchors(&mut state, &mu, 1000), 10);
    assert_eq!(state.current.len(), 58);
    assert_eq!(state.size, 96);
}

#[test]
fn growth_resets_past_the_cap() {
    let initial: Vec<(u32, u32)> = (0..48).map(|i| (i, i)).collect();
    let mut state = AnchorGrowth::new(initial.clone());
    state.current.extend((48..1000).map(|i| (i, i)));
    state.size = 1024;
    let mapped: Vec<(u32, u32, f64)> = (1000..1100).map(|i| (i, i, 0.5)).collect();
    let mu = matching_with(1200, &mapped);
    assert_eq!(grow_anchors(&mut state, &mu, 1000), 48);
    assert_eq!(&state.current[..48], &initial[..]);
    assert_eq!(state.current[48], (1000, 1000));
    assert_eq!(state.size, 96);
}

#[test]
fn growth_prefers_score_then_low_id() {
    let mut state = AnchorGrowth::new(vec![(0, 0)]);
    state.size = 2;
    let mu = matching_with(10, &[(5, 5, 0.7), (3, 3, 0.7), (1, 1, 0.9), (2, 2, 0.1)]);
    grow_anchors(&mut state, &mu, 1000);
    assert_eq!(state.current, vec![(0, 0), (1, 1), (3, 3)]);
}

/// Connected random graph: a shuffled spanning path plus random extra edges.
fn random_graph(n: usize, extra: usize, types: usize, rng: &mut ChaCha8Rng) -> AttributedGraph {
    let mut b = GraphBuilder::default();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(rng);
    for i in 0..n {
        let t = format!("t{}", rng.gen_range(0..types));
        let a = format!("a{}", rng.gen_range(0..n));
        b.set_vertex(&i.to_string(), &t, &[a]);
    }
    for w in order.windows(2) {
        b.add_edge(w[0], w[1], "", vec![]);
    }
    let mut added = 0;
    while added < extra {
        let (u, v) = (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32));
        if b.add_edge(u, v, "", vec![]) {
            added += 1;
        }
    }
    b.build()
}

/// Copy of `g` under a random relabeling. Returns the copy and `perm[u]`.
fn relabel(g: &AttributedGraph, rng: &mut ChaCha8Rng) -> (AttributedGraph, Vec<u32>) {
    let n = g.vertex_count();
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(rng);
    let mut inv = vec![0u32; n];
    for (u, &p) in perm.iter().enumerate() {
        inv[p as usize] = u as u32;
    }
    let mut b = GraphBuilder::default();
    for p in 0..n as u32 {
        let u = inv[p as usize];
        let attrs: Vec<&str> = g.vertex_attrs(u).iter().map(|&t| g.vertex_tokens().name(t)).collect();
        b.set_vertex(&format!("c{p}"), g.vertex_type_names().name(g.vertex_type(u)), &attrs);
    }
    for (_, u, v) in g.edges() {
        b.add_edge(perm[u as usize], perm[v as usize], "", vec![]);
    }
    (b.build(), perm)
}

fn clone_fixture(n: usize, seed: u64) -> (AttributedGraph, AttributedGraph, Vec<u32>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g1 = random_graph(n, 3 * n, 8, &mut rng);
    let (g2, perm) = relabel(&g1, &mut rng);
    (g1, g2, perm)
}

fn true_anchors(perm: &[u32], count: usize) -> AnchorMap {
    let step = perm.len() / count;
    let pairs = (0..count).map(|i| ((i * step) as u32, perm[i * step])).collect();
    AnchorMap::new(pairs, AnchorSource::UserProvided).unwrap()
}

#[test]
fn zero_iterations_return_the_anchors() {
    let (g1, g2, perm) = clone_fixture(100, 1);
    let anchors = true_anchors(&perm, 10);
    let cfg = AlignConfig {
        max_iterations: 0,
        ..Default::default()
    };
    let out = align(&g1, &g2, Some(&anchors), &cfg, &SimilarityConfig::<f64>::default()).unwrap();
    assert_eq!(out.report.iterations, 0);
    assert_eq!(out.mapping.len(), 10);
    assert!(out.rows().all(|(u, v, s, it)| perm[u as usize] == v && s == 1.0 && it == 0));
}

#[test]
fn clone_is_recovered() {
    let (g1, g2, perm) = clone_fixture(400, 2);
    let anchors = true_anchors(&perm, 20);
    let cfg = AlignConfig {
        bucket_size: 50,
        record_trace: true,
        ..Default::default()
    };
    let out = align(&g1, &g2, Some(&anchors), &cfg, &SimilarityConfig::<f64>::default()).unwrap();
    let correct = out.mapping.pairs().filter(|&(u, v, _)| perm[u as usize] == v).count();
    assert!(correct as f64 >= 0.95 * 400.0, "recall {correct}/400");

    // Injective both ways.
    let mut seen = vec![false; 400];
    for (_, v, _) in out.mapping.pairs() {
        assert!(!std::mem::replace(&mut seen[v as usize], true));
    }

    // Compared counts agree with the bucket populations.
    let trace = out.trace.as_ref().unwrap();
    for (r, t) in out.report.per_iteration.iter().zip(trace) {
        assert_eq!(r.compared, t.compared_pairs());
        assert!((r.gain - (1.0 - r.compared as f64 / 160_000.0)).abs() < 1e-15);
    }
    assert_eq!(out.report.bfs_rows, out.report.distinct_anchors);
    assert!(out.report.iterations <= 20);
}

#[test]
fn single_precision_runs() {
    let (g1, g2, perm) = clone_fixture(200, 3);
    let anchors = true_anchors(&perm, 12);
    let cfg = AlignConfig {
        bucket_size: 40,
        ..Default::default()
    };
    let out = align(&g1, &g2, Some(&anchors), &cfg, &SimilarityConfig::<f32>::default()).unwrap();
    let correct = out.mapping.pairs().filter(|&(u, v, _)| perm[u as usize] == v).count();
    assert!(correct >= 180, "recall {correct}/200");
}

#[test]
fn bootstrap_path_runs_without_anchors() {
    let (g1, g2, _) = clone_fixture(300, 4);
    let out = align(&g1, &g2, None, &AlignConfig::default(), &SimilarityConfig::<f64>::default()).unwrap();
    assert_eq!(out.report.anchor_source, "bootstrapped");
    assert_eq!(out.anchors.len(), crate::anchors::bootstrap_size(300, 300, crate::anchors::LogBase::Natural));
}

#[test]
fn unusable_anchors_abort_with_partial_mapping() {
    let g = AttributedGraph::from_edges(2, &[]);
    let anchors = AnchorMap::new(vec![(0, 0)], AnchorSource::UserProvided).unwrap();
    let out = align(&g, &g, Some(&anchors), &AlignConfig::default(), &SimilarityConfig::<f64>::default()).unwrap();
    assert!(out.aborted());
    assert_eq!(out.report.iterations, 0);
    assert_eq!(out.mapping.image(0), Some(0));
}

#[test]
fn config_validation() {
    assert!(AlignConfig::default().validate().is_ok());
    let bad = AlignConfig {
        convergence: 1.0,
        ..Default::default()
    };
    assert_eq!(bad.validate(), Err(ConfigError::Convergence(1.0)));
    let bad = AlignConfig {
        bucket_size: 0,
        ..Default::default()
    };
    assert!(bad.validate().is_err());
}
