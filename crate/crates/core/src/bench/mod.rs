//! Evaluation metrics, synthetic scenarios, noise generators and sweeps.

mod generate;
mod perturb;
mod sweep;

use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use generate::{clone_prior, sample_anchors, synthetic_graph, SyntheticSpec};
pub use perturb::{perturb, perturb_external, perturb_tokens, PerturbationSpec, SpecError};
pub use sweep::{run_scenario, sweep, write_sweep_csv, Scenario, ScenarioError, SweepRow};

use crate::aligner::IterationTrace;
use crate::graph::{GroundTruth, VertexId};

/// Independent random streams derived from one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Bootstrap = 1,
    PerturbEdges = 2,
    PerturbAttrs = 3,
    Generate = 4,
}

/// Generator for `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Record of which vertex pairs were scored.
pub trait ComparedLog {
    fn was_compared(&self, u: VertexId, v: VertexId) -> bool;
    /// Number of compared pairs.
    fn compared_pairs(&self) -> u64;
}

impl ComparedLog for IterationTrace {
    fn was_compared(&self, u: VertexId, v: VertexId) -> bool {
        self.compared(u, v)
    }

    fn compared_pairs(&self) -> u64 {
        IterationTrace::compared_pairs(self)
    }
}

/// Explicit set of compared pairs.
impl ComparedLog for HashSet<(VertexId, VertexId)> {
    fn was_compared(&self, u: VertexId, v: VertexId) -> bool {
        self.contains(&(u, v))
    }

    fn compared_pairs(&self) -> u64 {
        self.len() as u64
    }
}

/// Quality of one iteration, or of the whole run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationEval {
    pub iteration: usize,
    /// Known only when the log carries the iteration's mapping.
    pub recall: Option<f64>,
    /// Ground-truth pairs compared in this or any earlier iteration.
    pub hit_count: f64,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub recall: f64,
    pub hit_count: f64,
    pub gain: f64,
    pub truth_pairs: usize,
    pub correct: usize,
    pub hits: usize,
    pub per_iteration: Vec<IterationEval>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("ground truth is empty")]
    EmptyTruth,
}

/// Recall of `mapping` (images by graph-1 vertex) against `truth`, hit count
/// over the union of the logs, and gain for the largest log.
pub fn evaluate<L: ComparedLog>(
    mapping: &[Option<VertexId>],
    logs: &[L],
    truth: &GroundTruth,
    n1: usize,
    n2: usize,
) -> Result<EvalReport, EvalError> {
    if truth.is_empty() {
        return Err(EvalError::EmptyTruth);
    }
    let total = truth.len() as f64;
    let all_pairs = n1 as f64 * n2 as f64;
    let gain = |c: u64| if all_pairs > 0.0 { 1.0 - c as f64 / all_pairs } else { 1.0 };
    let correct_in = |m: &[Option<VertexId>]| {
        truth
            .pairs()
            .iter()
            .filter(|&&(u, v)| m.get(u as usize).copied().flatten() == Some(v))
            .count()
    };

    let mut hit = vec![false; truth.len()];
    let mut per_iteration = Vec::with_capacity(logs.len());
    let mut max_compared = 0;
    for (i, log) in logs.iter().enumerate() {
        for (h, &(u, v)) in hit.iter_mut().zip(truth.pairs()) {
            *h = *h || log.was_compared(u, v);
        }
        let compared = log.compared_pairs();
        max_compared = max_compared.max(compared);
        per_iteration.push(IterationEval {
            iteration: i + 1,
            recall: None,
            hit_count: hit.iter().filter(|&&h| h).count() as f64 / total,
            gain: gain(compared),
        });
    }
    let hits = hit.iter().filter(|&&h| h).count();
    let correct = correct_in(mapping);
    Ok(EvalReport {
        recall: correct as f64 / total,
        hit_count: hits as f64 / total,
        gain: gain(max_compared),
        truth_pairs: truth.len(),
        correct,
        hits,
        per_iteration,
    })
}

/// [`evaluate`] over run traces, filling per-iteration recall from each
/// iteration's mapping.
pub fn evaluate_traces(
    mapping: &[Option<VertexId>],
    traces: &[IterationTrace],
    truth: &GroundTruth,
    n1: usize,
    n2: usize,
) -> Result<EvalReport, EvalError> {
    let mut report = evaluate(mapping, traces, truth, n1, n2)?;
    for (it, t) in report.per_iteration.iter_mut().zip(traces) {
        let correct = truth
            .pairs()
            .iter()
            .filter(|&&(u, v)| t.mapping[u as usize] == Some(v))
            .count();
        it.recall = Some(correct as f64 / truth.len() as f64);
    }
    Ok(report)
}
