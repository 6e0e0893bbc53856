//! Scenario directories and bucket-size sweeps.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::{evaluate_traces, EvalError, EvalReport};
use crate::aligner::{align, AlignConfig, Alignment};
use crate::anchors::AnchorError;
use crate::graph::{load_anchor_map, load_ground_truth, load_graph, write_graph, write_pairs};
use crate::graph::{AnchorMap, AttributedGraph, GraphError, GroundTruth};
use crate::similarity::{load_external_similarity, ExternalSimilarity, SimilarityConfig};

/// A graph pair with its ground truth and optional anchors and prior.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub g1: AttributedGraph,
    pub g2: AttributedGraph,
    pub anchors: Option<AnchorMap>,
    pub truth: GroundTruth,
    pub external: Option<ExternalSimilarity<f64>>,
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Input(#[from] GraphError),
    #[error("{path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario {0}: {1}")]
    Anchors(String, AnchorError),
    #[error("scenario {0}: {1}")]
    Eval(String, EvalError),
}

const FILES: [&str; 7] = [
    "g1.vertices.tsv",
    "g1.edges.tsv",
    "g2.vertices.tsv",
    "g2.edges.tsv",
    "truth.tsv",
    "anchors.tsv",
    "prior.tsv",
];

fn create(dir: &Path, name: &str) -> Result<(File, String), ScenarioError> {
    let path = dir.join(name);
    let label = path.display().to_string();
    File::create(&path)
        .map(|f| (f, label.clone()))
        .map_err(|source| ScenarioError::Write { path: label, source })
}

impl Scenario {
    /// Writes the scenario files into `dir`, creating it if needed.
    pub fn write_dir(&self, dir: &Path) -> Result<(), ScenarioError> {
        let io = |path: String| move |source| ScenarioError::Write { path, source };
        std::fs::create_dir_all(dir).map_err(io(dir.display().to_string()))?;
        for (g, v, e) in [(&self.g1, FILES[0], FILES[1]), (&self.g2, FILES[2], FILES[3])] {
            let (vf, label) = create(dir, v)?;
            let (ef, _) = create(dir, e)?;
            write_graph(g, vf, ef).map_err(io(label))?;
        }
        let (f, label) = create(dir, FILES[4])?;
        write_pairs(BufWriter::new(f), self.truth.pairs(), &self.g1, &self.g2).map_err(io(label))?;
        if let Some(a) = &self.anchors {
            let (f, label) = create(dir, FILES[5])?;
            write_pairs(BufWriter::new(f), a.pairs(), &self.g1, &self.g2).map_err(io(label))?;
        }
        if let Some(h) = &self.external {
            let (f, label) = create(dir, FILES[6])?;
            h.write(BufWriter::new(f), &self.g1, &self.g2).map_err(io(label))?;
        }
        Ok(())
    }

    /// Reads a directory written by [`Scenario::write_dir`]; named after its last component.
    pub fn load_dir(dir: &Path) -> Result<Self, ScenarioError> {
        let p = |i: usize| dir.join(FILES[i]);
        let g1 = load_graph(Some(&p(0)), &p(1))?;
        let g2 = load_graph(Some(&p(2)), &p(3))?;
        let truth = load_ground_truth(&p(4), &g1, &g2)?;
        let anchors = p(5).exists().then(|| load_anchor_map(&p(5), &g1, &g2)).transpose()?;
        let external = p(6)
            .exists()
            .then(|| load_external_similarity(&p(6), &g1, &g2))
            .transpose()?;
        let name = dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| dir.display().to_string());
        Ok(Self {
            name,
            g1,
            g2,
            anchors,
            truth,
            external,
        })
    }

    fn similarity(&self, base: &SimilarityConfig<f64>) -> SimilarityConfig<f64> {
        let mut sim = base.clone();
        if self.external.is_some() {
            sim.external = self.external.clone();
        }
        sim
    }
}

/// Aligns one scenario with traces recorded and evaluates the result.
/// Returns the alignment, its evaluation and the wall time in seconds.
pub fn run_scenario(
    scenario: &Scenario,
    cfg: &AlignConfig,
    sim: &SimilarityConfig<f64>,
) -> Result<(Alignment<f64>, EvalReport, f64), ScenarioError> {
    let cfg = AlignConfig {
        record_trace: true,
        ..cfg.clone()
    };
    let start = Instant::now();
    let out = align(&scenario.g1, &scenario.g2, scenario.anchors.as_ref(), &cfg, &scenario.similarity(sim))
        .map_err(|e| ScenarioError::Anchors(scenario.name.clone(), e))?;
    let seconds = start.elapsed().as_secs_f64();
    let eval = evaluate_traces(
        &out.mapping.images(),
        out.trace.as_deref().unwrap_or_default(),
        &scenario.truth,
        scenario.g1.vertex_count(),
        scenario.g2.vertex_count(),
    )
    .map_err(|e| ScenarioError::Eval(scenario.name.clone(), e))?;
    Ok((out, eval, seconds))
}

/// One cell of a sweep.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SweepRow {
    pub scenario: String,
    pub bucket_size: usize,
    pub recall: f64,
    pub hit_count: f64,
    pub gain: f64,
    pub iterations: usize,
    pub seconds: f64,
    /// Largest per-iteration compared-pair count.
    pub compared: u64,
}

/// Runs every `(bucket size, scenario)` cell, in parallel, in that order.
pub fn sweep(
    bucket_sizes: &[usize],
    scenarios: &[Scenario],
    cfg: &AlignConfig,
    sim: &SimilarityConfig<f64>,
) -> Result<Vec<SweepRow>, ScenarioError> {
    let cells: Vec<(usize, &Scenario)> = bucket_sizes
        .iter()
        .flat_map(|&b| scenarios.iter().map(move |s| (b, s)))
        .collect();
    cells
        .into_par_iter()
        .map(|(b, s)| {
            let cfg = AlignConfig {
                bucket_size: b,
                ..cfg.clone()
            };
            let (out, eval, seconds) = run_scenario(s, &cfg, sim)?;
            Ok(SweepRow {
                scenario: s.name.clone(),
                bucket_size: b,
                recall: eval.recall,
                hit_count: eval.hit_count,
                gain: eval.gain,
                iterations: out.report.iterations,
                seconds,
                compared: out.report.compared,
            })
        })
        .collect()
}

/// `scenario,bucket_size,recall,hit_count,gain,iterations,seconds` rows.
pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(w, "scenario,bucket_size,recall,hit_count,gain,iterations,seconds")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{:.3}",
            r.scenario, r.bucket_size, r.recall, r.hit_count, r.gain, r.iterations, r.seconds
        )?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{perturb, sample_anchors, stream_rng, synthetic_graph, PerturbationSpec, Stream, SyntheticSpec};

    fn scenario(n: usize, seed: u64) -> Scenario {
        let spec = SyntheticSpec {
            vertices: n,
            ..Default::default()
        };
        let g1 = synthetic_graph(&spec, &mut stream_rng(seed, Stream::Generate));
        let (g2, truth) = perturb(&g1, &PerturbationSpec::identity(seed)).unwrap();
        let anchors = sample_anchors(&truth, 15, &mut stream_rng(seed, Stream::Bootstrap));
        Scenario {
            name: format!("clone{seed}"),
            g1,
            g2,
            anchors: Some(anchors),
            truth,
            external: None,
        }
    }

    #[test]
    fn single_cell_matches_a_direct_run() {
        let s = scenario(200, 1);
        let cfg = AlignConfig::default();
        let sim = SimilarityConfig::default();
        let rows = sweep(&[40], std::slice::from_ref(&s), &cfg, &sim).unwrap();
        let direct = align(
            &s.g1,
            &s.g2,
            s.anchors.as_ref(),
            &AlignConfig { bucket_size: 40, ..cfg },
            &sim,
        )
        .unwrap();
        let correct = s
            .truth
            .pairs()
            .iter()
            .filter(|&&(u, v)| direct.mapping.image(u) == Some(v))
            .count();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].recall, correct as f64 / 200.0);
        assert_eq!(rows[0].gain, direct.report.gain);
        assert_eq!(rows[0].iterations, direct.report.iterations);
        assert!(rows[0].recall <= rows[0].hit_count);
    }

    #[test]
    fn csv_has_one_row_per_cell() {
        let s = scenario(120, 2);
        let rows = sweep(&[20, 60], &[s], &AlignConfig::default(), &SimilarityConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "scenario,bucket_size,recall,hit_count,gain,iterations,seconds");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("clone2,20,"));
        assert!(rows[0].compared <= rows[1].compared);
    }

    #[test]
    fn directory_round_trip() {
        let mut s = scenario(60, 3);
        let mut h = ExternalSimilarity::new();
        h.set(0, s.truth.target(0).unwrap(), 0.75);
        s.external = Some(h);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("clone3");
        s.write_dir(&path).unwrap();
        let back = Scenario::load_dir(&path).unwrap();
        assert_eq!(back.name, "clone3");
        assert_eq!(back.g1.edge_count(), s.g1.edge_count());
        assert_eq!(back.g2.vertex_count(), s.g2.vertex_count());
        let ext = |g: &AttributedGraph, pairs: &[(u32, u32)], h: &AttributedGraph| -> Vec<(String, String)> {
            pairs.iter().map(|&(u, v)| (g.ext_id(u).to_owned(), h.ext_id(v).to_owned())).collect()
        };
        assert_eq!(ext(&back.g1, back.truth.pairs(), &back.g2), ext(&s.g1, s.truth.pairs(), &s.g2));
        assert_eq!(back.anchors.unwrap().len(), 15);
        assert_eq!(back.external.unwrap().len(), 1);
    }
}
