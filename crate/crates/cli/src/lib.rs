//! Benchmark and metaoptimization harness around the `anakatabatic` crate.
//!
//! Each command writes a self-describing results directory: the exact
//! configuration that produced it (`config.json`), the suite recipe, the
//! tabular results as CSV, and a `manifest.json` that records completeness
//! and wall-clock timestamps. Timestamps appear nowhere else, so re-running
//! a configuration reproduces every other file byte for byte.

mod config;
mod list;
mod meta;
mod plot;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

pub use config::{load_model, HarnessConfig, MetaoptSpec, SuiteSpec, VariantSpec};
pub use list::{cmd_list, ListKind};
pub use meta::cmd_metaopt;
pub use plot::{cmd_plotdata, quartiles};
pub use run::{cmd_run, RunRow, RUNS_CSV_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] anakatabatic::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{0}")]
    Missing(String),
}

impl HarnessError {
    /// Process exit code: 1 for usage errors, 2 for runtime aborts.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Usage(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn csv_error(path: &Path) -> impl Fn(csv::Error) -> HarnessError + '_ {
    move |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

pub(crate) fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Completion record of a command; the only file with timestamps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub tool_version: String,
    pub complete: bool,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub tasks_total: usize,
    pub tasks_done: usize,
    pub files: Vec<String>,
    pub notes: Vec<String>,
    pub error: Option<String>,
}

impl Manifest {
    pub(crate) fn start(command: &str, tasks_total: usize) -> Self {
        Self {
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            complete: false,
            started_unix: unix_now(),
            finished_unix: 0,
            tasks_total,
            tasks_done: 0,
            files: Vec::new(),
            notes: Vec::new(),
            error: None,
        }
    }

    pub(crate) fn write(&mut self, dir: &Path) -> Result<()> {
        self.finished_unix = unix_now();
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        write_text(&dir.join("manifest.json"), &text)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        serde_json::from_str(&read_text(&dir.join("manifest.json"))?)
            .map_err(|e| HarnessError::Missing(format!("unreadable manifest in {}: {e}", dir.display())))
    }
}

/// Runs `f` on a pool of `jobs` threads.
pub(crate) fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| HarnessError::Usage(format!("cannot start {jobs} worker threads: {e}")))?;
    Ok(pool.install(f))
}
