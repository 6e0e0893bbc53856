//! `key = value` configuration files and flag precedence.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use vantage_align::aligner::AlignConfig;
use vantage_align::anchors::LogBase;

use crate::CliError;

/// Keys accepted in a configuration file.
pub const KEYS: [&str; 12] = [
    "bucket_size",
    "top_k",
    "max_iterations",
    "convergence",
    "anchor_cap",
    "neighbors",
    "bootstrap_log",
    "central_log",
    "central_threshold",
    "closeness",
    "seed",
    "threads",
];

/// Parsed configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
    origin: String,
}

impl FileConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Input(format!("{origin}:{}: expected `key = value`", i + 1)));
            };
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(CliError::Input(format!("{origin}:{}: unknown key {k:?}", i + 1)));
            }
            values.insert(k.to_owned(), v.trim().to_owned());
        }
        Ok(Self {
            values,
            origin: origin.to_owned(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Flag value, else file value, else `default`.
    pub fn pick<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key) {
            Some(s) => s
                .parse()
                .map_err(|e| CliError::Input(format!("{}: {key} = {s:?}: {e}", self.origin))),
            None => Ok(default),
        }
    }
}

/// Alignment flags that may also come from a configuration file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct TuningArgs {
    /// Quadtree leaf capacity [default: 500]
    #[arg(long)]
    pub bucket_size: Option<usize>,
    /// Candidates kept per graph-2 vertex [default: 3]
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Iteration limit [default: 20]
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Stop when the mapping grows by at most this factor [default: 1.02]
    #[arg(long)]
    pub convergence: Option<f64>,
    /// Anchor count that triggers a restart from the initial anchors [default: 1000]
    #[arg(long)]
    pub anchor_cap: Option<usize>,
    /// Compare only within a vertex's own bucket
    #[arg(long)]
    pub no_neighbors: bool,
    /// Log base of the bootstrap anchor count: e, 2 or 10 [default: e]
    #[arg(long)]
    pub bootstrap_log: Option<LogBase>,
    /// Log base of the central anchor count: e, 2 or 10 [default: 2]
    #[arg(long)]
    pub central_log: Option<LogBase>,
    /// Minimum hop distance between central anchors [default: 1]
    #[arg(long)]
    pub central_threshold: Option<u32>,
    /// Numeric edge values closer than this count as equal [default: 1]
    #[arg(long)]
    pub closeness: Option<f64>,
}

impl TuningArgs {
    pub fn resolve(&self, file: &FileConfig) -> Result<(AlignConfig, f64), CliError> {
        let d = AlignConfig::default();
        let neighbors = if self.no_neighbors {
            false
        } else {
            file.pick("neighbors", None, d.neighbors)?
        };
        let cfg = AlignConfig {
            bucket_size: file.pick("bucket_size", self.bucket_size, d.bucket_size)?,
            top_k: file.pick("top_k", self.top_k, d.top_k)?,
            max_iterations: file.pick("max_iterations", self.max_iterations, d.max_iterations)?,
            convergence: file.pick("convergence", self.convergence, d.convergence)?,
            anchor_cap: file.pick("anchor_cap", self.anchor_cap, d.anchor_cap)?,
            neighbors,
            selection: vantage_align::anchors::SelectionConfig {
                bootstrap_log: file.pick("bootstrap_log", self.bootstrap_log, d.selection.bootstrap_log)?,
                central_log: file.pick("central_log", self.central_log, d.selection.central_log)?,
                central_threshold: file.pick("central_threshold", self.central_threshold, d.selection.central_threshold)?,
            },
            record_trace: false,
        };
        cfg.validate().map_err(|e| CliError::Input(e.to_string()))?;
        let closeness = file.pick("closeness", self.closeness, 1.0)?;
        if !(closeness > 0.0) {
            return Err(CliError::Input(format!("closeness must be positive, got {closeness}")));
        }
        Ok((cfg, closeness))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_beats_file_beats_default() {
        let file = FileConfig::parse("bucket_size = 250\ntop_k=5 # comment\n", "c").unwrap();
        let args = TuningArgs {
            top_k: Some(7),
            ..Default::default()
        };
        let (cfg, closeness) = args.resolve(&file).unwrap();
        assert_eq!(cfg.bucket_size, 250);
        assert_eq!(cfg.top_k, 7);
        assert_eq!(cfg.max_iterations, 20);
        assert_eq!(closeness, 1.0);
    }

    #[test]
    fn neighbors_from_file_and_flag() {
        let file = FileConfig::parse("neighbors = false", "c").unwrap();
        assert!(!TuningArgs::default().resolve(&file).unwrap().0.neighbors);
        let file = FileConfig::parse("neighbors = true", "c").unwrap();
        let args = TuningArgs {
            no_neighbors: true,
            ..Default::default()
        };
        assert!(!args.resolve(&file).unwrap().0.neighbors);
    }

    #[test]
    fn bad_files_are_input_errors() {
        assert!(matches!(FileConfig::parse("colour = red", "c"), Err(CliError::Input(_))));
        assert!(matches!(FileConfig::parse("just text", "c"), Err(CliError::Input(_))));
        let file = FileConfig::parse("convergence = 0.5", "c").unwrap();
        assert!(TuningArgs::default().resolve(&file).is_err());
        let file = FileConfig::parse("bucket_size = lots", "c").unwrap();
        assert!(TuningArgs::default().resolve(&file).is_err());
    }
}
