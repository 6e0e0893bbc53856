//! Command-line front end: align, evaluate, perturb, heatmap and sweep.

mod config;

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use vantage_align::aligner::{write_mapping, read_mapping, Aligner, AlignConfig, IterationTrace};
use vantage_align::bench::{
    clone_prior, evaluate, evaluate_traces, perturb, perturb_external, sample_anchors, stream_rng, sweep,
    synthetic_graph, write_sweep_csv, PerturbationSpec, Scenario, Stream, SyntheticSpec,
};
use vantage_align::embedding::export_density_grid;
use vantage_align::graph::{load_anchor_map, load_graph, load_ground_truth};
use vantage_align::similarity::{load_external_similarity, load_weights, SimilarityConfig};
use vantage_align::{AnchorMap, AttributedGraph, VertexId};

use config::{FileConfig, TuningArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("alignment aborted: {0}")]
    Aborted(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Aborted(_) => 3,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "vantage-align", version, about = "Attributed graph alignment by vantage-point embedding")]
struct Cli {
    /// Worker threads; 0 uses all cores
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// error, warn, info, debug or trace
    #[arg(long, global = true, default_value = "warn")]
    log_level: log::LevelFilter,
    /// Seed for every random stream [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// `key = value` file; flags take precedence over it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Align two graphs and write the mapping
    Align(AlignArgs),
    /// Score a mapping against a ground truth
    Evaluate(EvaluateArgs),
    /// Write a scenario: a noisy relabeled copy of a graph with its ground truth
    Perturb(PerturbArgs),
    /// Write per-cell vertex counts of the first-iteration embedding
    Heatmap(HeatmapArgs),
    /// Align scenarios over several bucket sizes
    Sweep(SweepArgs),
}

/// `vertices.tsv,edges.tsv` or just `edges.tsv`.
#[derive(Debug, Clone)]
struct GraphPaths {
    vertices: Option<PathBuf>,
    edges: PathBuf,
}

impl std::str::FromStr for GraphPaths {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split(',').collect::<Vec<_>>()[..] {
            [e] if !e.is_empty() => Ok(Self {
                vertices: None,
                edges: e.into(),
            }),
            [v, e] if !v.is_empty() && !e.is_empty() => Ok(Self {
                vertices: Some(v.into()),
                edges: e.into(),
            }),
            _ => Err(format!("expected `vertices.tsv,edges.tsv` or `edges.tsv`, got {s:?}")),
        }
    }
}

impl GraphPaths {
    fn load(&self) -> Result<AttributedGraph, CliError> {
        load_graph(self.vertices.as_deref(), &self.edges).map_err(input)
    }

    fn echo(&self) -> serde_json::Value {
        json!({
            "vertices": self.vertices.as_ref().map(|p| p.display().to_string()),
            "edges": self.edges.display().to_string(),
        })
    }
}

#[derive(Debug, Args)]
struct PairArgs {
    /// Graph 1 as `vertices.tsv,edges.tsv` or `edges.tsv`
    #[arg(long)]
    g1: GraphPaths,
    /// Graph 2 as `vertices.tsv,edges.tsv` or `edges.tsv`
    #[arg(long)]
    g2: GraphPaths,
}

#[derive(Debug, Args)]
struct SimilarityArgs {
    /// Prior similarity table `ext_u ext_v value` replacing attribute similarity
    #[arg(long)]
    prior: Option<PathBuf>,
    /// Attribute token weights `token weight`
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AlignArgs {
    #[command(flatten)]
    graphs: PairArgs,
    /// Known anchor pairs `ext_u ext_v`; bootstrapped when omitted
    #[arg(long)]
    anchors: Option<PathBuf>,
    #[command(flatten)]
    similarity: SimilarityArgs,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Mapping output `ext_u ext_v score iteration`
    #[arg(long)]
    out: PathBuf,
    /// Run report JSON
    #[arg(long)]
    report: Option<PathBuf>,
    /// Per-iteration bucket assignments JSON, for `evaluate --trace`
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Phase timings JSON; printed to stderr when omitted
    #[arg(long)]
    timings: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    graphs: PairArgs,
    /// Mapping written by `align`
    #[arg(long)]
    mapping: PathBuf,
    /// Ground-truth pairs `ext_u ext_v`
    #[arg(long)]
    truth: PathBuf,
    /// Trace written by `align --trace`; without it only mapped pairs count as compared
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Report JSON; printed to stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PerturbArgs {
    /// Input graph as `vertices.tsv,edges.tsv` or `edges.tsv`
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    g1: Option<GraphPaths>,
    /// Generate a connected random input graph with this many vertices instead
    #[arg(long)]
    synthetic: Option<usize>,
    /// Average degree of the generated graph
    #[arg(long, default_value_t = 8.0)]
    avg_degree: f64,
    /// Vertex types of the generated graph
    #[arg(long, default_value_t = 64)]
    vertex_types: usize,
    /// Fraction of edges removed
    #[arg(long, default_value_t = 0.0)]
    edges: f64,
    /// Fraction of vertices added
    #[arg(long, default_value_t = 0.0)]
    add_vertices: f64,
    /// Fraction of edges added
    #[arg(long, default_value_t = 0.0)]
    add_edges: f64,
    /// Fraction of vertex attribute tokens redrawn
    #[arg(long, default_value_t = 0.0)]
    attr_noise: f64,
    /// Also write this many true pairs as anchors
    #[arg(long)]
    anchors: Option<usize>,
    /// Also write a prior table with this many decoys per vertex
    #[arg(long)]
    prior_decoys: Option<usize>,
    /// Fraction of non-zero prior entries redrawn
    #[arg(long, default_value_t = 0.0)]
    prior_noise: f64,
    /// Scenario directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct HeatmapArgs {
    #[command(flatten)]
    graphs: PairArgs,
    /// Known anchor pairs; bootstrapped when omitted
    #[arg(long)]
    anchors: Option<PathBuf>,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Cell side over the [-1, 1] square
    #[arg(long, default_value_t = 0.1)]
    cell: f64,
    /// CSV `x_bin,y_bin,count_g1,count_g2`
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Scenario directory written by `perturb`; repeatable
    #[arg(long, required = true)]
    scenario: Vec<PathBuf>,
    /// Comma-separated leaf capacities
    #[arg(long, value_delimiter = ',', default_value = "250,500,1000,2000")]
    bucket_sizes: Vec<usize>,
    #[command(flatten)]
    tuning: TuningArgs,
    /// CSV `scenario,bucket_size,recall,hit_count,gain,iterations,seconds`
    #[arg(long)]
    out: PathBuf,
}

struct Global {
    seed: u64,
    threads: usize,
    file: FileConfig,
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(input)?;
    writeln!(w).and_then(|_| w.flush()).map_err(input)
}

fn echo(command: &str, g: &Global, cfg: Option<(&AlignConfig, f64)>, extra: serde_json::Value) -> serde_json::Value {
    let mut v = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": g.seed,
        "threads": g.threads,
        "inputs": extra,
    });
    if let Some((cfg, closeness)) = cfg {
        v["align"] = serde_json::to_value(cfg).expect("config serializes");
        v["closeness"] = json!(closeness);
    }
    eprintln!("config: {v}");
    v
}

fn similarity(args: &SimilarityArgs, closeness: f64, g1: &AttributedGraph, g2: &AttributedGraph) -> Result<SimilarityConfig<f64>, CliError> {
    let mut sim = SimilarityConfig {
        closeness,
        ..Default::default()
    };
    if let Some(p) = &args.prior {
        sim.external = Some(load_external_similarity(p, g1, g2).map_err(input)?);
    }
    if let Some(p) = &args.weights {
        sim.token_weights = load_weights(p).map_err(input)?;
    }
    Ok(sim)
}

fn anchors_or_bootstrap(aligner: &Aligner<'_, f64>, path: Option<&Path>, g1: &AttributedGraph, g2: &AttributedGraph) -> Result<AnchorMap, CliError> {
    match path {
        Some(p) => load_anchor_map(p, g1, g2).map_err(input),
        None => aligner.bootstrap().map_err(|e| CliError::Aborted(e.to_string())),
    }
}

fn cmd_align(a: AlignArgs, g: &Global) -> Result<(), CliError> {
    let (mut cfg, closeness) = a.tuning.resolve(&g.file)?;
    cfg.record_trace = a.trace.is_some();
    let g1 = a.graphs.g1.load()?;
    let g2 = a.graphs.g2.load()?;
    let sim = similarity(&a.similarity, closeness, &g1, &g2)?;
    let anchors = a.anchors.as_deref().map(|p| load_anchor_map(p, &g1, &g2)).transpose().map_err(input)?;
    let config = echo(
        "align",
        g,
        Some((&cfg, closeness)),
        json!({
            "g1": a.graphs.g1.echo(),
            "g2": a.graphs.g2.echo(),
            "anchors": a.anchors.as_ref().map(|p| p.display().to_string()),
            "prior": a.similarity.prior.as_ref().map(|p| p.display().to_string()),
            "weights": a.similarity.weights.as_ref().map(|p| p.display().to_string()),
        }),
    );
    let out = Aligner::new(&g1, &g2, cfg, &sim)
        .run(anchors.as_ref())
        .map_err(|e| CliError::Aborted(e.to_string()))?;

    let mut w = create(&a.out)?;
    writeln!(w, "# {}", serde_json::to_string(&config).expect("json")).map_err(input)?;
    write_mapping(&mut w, &out, &g1, &g2).map_err(input)?;
    if let Some(p) = &a.report {
        write_json(p, &json!({ "config": config, "report": out.report }))?;
    }
    if let (Some(p), Some(t)) = (&a.trace, &out.trace) {
        write_json(p, t)?;
    }
    match &a.timings {
        Some(p) => write_json(p, &out.timings)?,
        None => eprintln!("timings: {}", serde_json::to_string(&out.timings).expect("json")),
    }
    log::info!("mapped {} pairs in {} iterations", out.report.mapped, out.report.iterations);
    if out.aborted() {
        let reason = match &out.report.stop {
            vantage_align::aligner::StopReason::Aborted { reason } => reason.clone(),
            _ => unreachable!(),
        };
        return Err(CliError::Aborted(reason));
    }
    Ok(())
}

fn cmd_evaluate(a: EvaluateArgs, g: &Global) -> Result<(), CliError> {
    let g1 = a.graphs.g1.load()?;
    let g2 = a.graphs.g2.load()?;
    let rows = read_mapping(&a.mapping, &g1, &g2).map_err(input)?;
    let truth = load_ground_truth(&a.truth, &g1, &g2).map_err(input)?;
    let mut images: Vec<Option<VertexId>> = vec![None; g1.vertex_count()];
    for r in &rows {
        images[r.u as usize] = Some(r.v);
    }
    let (n1, n2) = (g1.vertex_count(), g2.vertex_count());
    let (report, log) = match &a.trace {
        Some(p) => {
            let f = File::open(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            let traces: Vec<IterationTrace> =
                serde_json::from_reader(BufReader::new(f)).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            if traces.iter().any(|t| t.buckets[0].len() != n1 || t.buckets[1].len() != n2) {
                return Err(CliError::Input(format!("{}: trace does not match the graphs", p.display())));
            }
            (evaluate_traces(&images, &traces, &truth, n1, n2).map_err(input)?, "trace")
        }
        None => {
            let mapped: HashSet<(VertexId, VertexId)> = rows.iter().map(|r| (r.u, r.v)).collect();
            (evaluate(&images, &[mapped], &truth, n1, n2).map_err(input)?, "mapping")
        }
    };
    let config = echo(
        "evaluate",
        g,
        None,
        json!({
            "g1": a.graphs.g1.echo(),
            "g2": a.graphs.g2.echo(),
            "mapping": a.mapping.display().to_string(),
            "truth": a.truth.display().to_string(),
            "trace": a.trace.as_ref().map(|p| p.display().to_string()),
        }),
    );
    let value = json!({ "config": config, "compared_log": log, "report": report });
    match &a.out {
        Some(p) => write_json(p, &value),
        None => {
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
            Ok(())
        }
    }
}

fn cmd_perturb(a: PerturbArgs, g: &Global) -> Result<(), CliError> {
    let spec = PerturbationSpec {
        edge_removal: a.edges,
        vertex_addition: a.add_vertices,
        edge_addition: a.add_edges,
        attr_noise: a.attr_noise,
        seed: g.seed,
    };
    spec.validate().map_err(input)?;
    if !(0.0..=1.0).contains(&a.prior_noise) {
        return Err(CliError::Input(format!("prior noise must lie in [0, 1], got {}", a.prior_noise)));
    }
    let g1 = match (&a.g1, a.synthetic) {
        (Some(p), _) => p.load()?,
        (None, Some(n)) => {
            let s = SyntheticSpec {
                vertices: n,
                avg_degree: a.avg_degree,
                vertex_types: a.vertex_types,
                ..Default::default()
            };
            synthetic_graph(&s, &mut stream_rng(g.seed, Stream::Generate))
        }
        (None, None) => return Err(CliError::Usage("one of --g1 or --synthetic is required".into())),
    };
    let (g2, truth) = perturb(&g1, &spec).map_err(input)?;
    let anchors = a
        .anchors
        .map(|k| sample_anchors(&truth, k, &mut stream_rng(g.seed, Stream::Bootstrap)));
    let external = a.prior_decoys.map(|d| {
        let mut rng = stream_rng(g.seed, Stream::PerturbAttrs);
        let h = clone_prior(&truth, g2.vertex_count(), d, &mut rng);
        perturb_external(&h, a.prior_noise, &mut rng)
    });
    let name = a
        .out
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let scenario = Scenario {
        name,
        g1,
        g2,
        anchors,
        truth,
        external,
    };
    scenario.write_dir(&a.out).map_err(input)?;
    let config = echo(
        "perturb",
        g,
        None,
        json!({
            "g1": a.g1.as_ref().map(GraphPaths::echo),
            "synthetic": a.synthetic.map(|n| json!({
                "vertices": n, "avg_degree": a.avg_degree, "vertex_types": a.vertex_types,
            })),
            "spec": spec,
            "anchors": a.anchors,
            "prior_decoys": a.prior_decoys,
            "prior_noise": a.prior_noise,
        }),
    );
    write_json(&a.out.join("perturb.json"), &config)
}

fn cmd_heatmap(a: HeatmapArgs, g: &Global) -> Result<(), CliError> {
    let (cfg, closeness) = a.tuning.resolve(&g.file)?;
    let g1 = a.graphs.g1.load()?;
    let g2 = a.graphs.g2.load()?;
    let sim = SimilarityConfig {
        closeness,
        ..Default::default()
    };
    echo(
        "heatmap",
        g,
        Some((&cfg, closeness)),
        json!({
            "g1": a.graphs.g1.echo(),
            "g2": a.graphs.g2.echo(),
            "anchors": a.anchors.as_ref().map(|p| p.display().to_string()),
            "cell": a.cell,
        }),
    );
    let aligner = Aligner::new(&g1, &g2, cfg, &sim);
    let anchors = anchors_or_bootstrap(&aligner, a.anchors.as_deref(), &g1, &g2)?;
    let positions = aligner.embed(&anchors).map_err(|e| CliError::Aborted(e.to_string()))?;
    let grid = export_density_grid(&positions, a.cell).map_err(input)?;
    grid.write_csv(create(&a.out)?).map_err(input)
}

fn cmd_sweep(a: SweepArgs, g: &Global) -> Result<(), CliError> {
    let (cfg, closeness) = a.tuning.resolve(&g.file)?;
    if a.bucket_sizes.iter().any(|&b| b == 0) {
        return Err(CliError::Input("bucket sizes must be positive".into()));
    }
    let scenarios = a
        .scenario
        .iter()
        .map(|p| Scenario::load_dir(p))
        .collect::<Result<Vec<_>, _>>()
        .map_err(input)?;
    echo(
        "sweep",
        g,
        Some((&cfg, closeness)),
        json!({
            "scenarios": a.scenario.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "bucket_sizes": a.bucket_sizes,
        }),
    );
    let sim = SimilarityConfig {
        closeness,
        ..Default::default()
    };
    let rows = sweep(&a.bucket_sizes, &scenarios, &cfg, &sim).map_err(|e| CliError::Aborted(e.to_string()))?;
    write_sweep_csv(create(&a.out)?, &rows).map_err(input)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let seed = file.pick("seed", cli.seed, 0u64)?;
    let threads = file.pick("threads", cli.threads, 0usize)?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let g = Global { seed, threads, file };
    match cli.command {
        Command::Align(a) => cmd_align(a, &g),
        Command::Evaluate(a) => cmd_evaluate(a, &g),
        Command::Perturb(a) => cmd_perturb(a, &g),
        Command::Heatmap(a) => cmd_heatmap(a, &g),
        Command::Sweep(a) => cmd_sweep(a, &g),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::new().filter_level(cli.log_level).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
