use std::path::{Path, PathBuf};

use anakatabatic::benchmarks::Suite;
use anakatabatic::metrics::{compare_suite, FunctionResult, RunRecord, SuiteComparison};
use anakatabatic::pso::run;
use anakatabatic::swarm::Objective;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::HarnessConfig;
use crate::{create_dir, csv_error, csv_writer, write_text, HarnessError, Manifest, Result};

pub const RUNS_CSV_HEADER: &str = "problem,variant,model,seed,final_best,eps,evals";

/// One line of `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub problem: String,
    pub variant: String,
    pub model: String,
    pub seed: u64,
    pub final_best: f64,
    /// `final_best - f*`.
    pub eps: f64,
    pub evals: usize,
}

/// Everything `cmd_run` produced, in `runs.csv` order.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub rows: Vec<RunRow>,
    pub records: Vec<RunRecord>,
    pub summary: Option<SuiteComparison>,
}

#[derive(Debug, Clone, Copy)]
struct Task {
    problem: usize,
    variant: usize,
    run: usize,
}

fn trace_file_name(problem: &str, variant_slug: &str, run: usize) -> String {
    format!("{problem}__{variant_slug}__r{run:04}.csv")
}

fn write_trace(path: &Path, record: &RunRecord, n: usize) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["iteration", "evals", "best"]).map_err(csv_error(path))?;
    for (i, best) in record.trace.iter().enumerate() {
        w.serialize((i, n * (i + 1), best)).map_err(csv_error(path))?;
    }
    w.flush().map_err(|source| HarnessError::Io { path: path.into(), source })
}

fn write_rows(path: &Path, rows: &[RunRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    if rows.is_empty() {
        w.write_record(RUNS_CSV_HEADER.split(',')).map_err(csv_error(path))?;
    }
    for row in rows {
        w.serialize(row).map_err(csv_error(path))?;
    }
    w.flush().map_err(|source| HarnessError::Io { path: path.into(), source })
}

fn write_summary(path: &Path, cmp: &SuiteComparison) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["problem", "eps_x", "eps_xa", "alpha", "omega"]).map_err(csv_error(path))?;
    for r in &cmp.rows {
        w.serialize((&r.problem, r.eps_x, r.eps_xa, r.alpha, r.omega)).map_err(csv_error(path))?;
    }
    w.serialize(("average", "", "", cmp.alpha_avg, cmp.omega_avg)).map_err(csv_error(path))?;
    w.flush().map_err(|source| HarnessError::Io { path: path.into(), source })
}

fn comparison(suite: &Suite, cfg: &HarnessConfig, records: &[RunRecord]) -> Result<SuiteComparison> {
    let per_variant = |v: usize| -> Result<Vec<FunctionResult>> {
        suite
            .entries
            .iter()
            .enumerate()
            .map(|(p, e)| {
                let start = (p * cfg.variants.len() + v) * cfg.runs;
                let runs = records[start..start + cfg.runs].to_vec();
                Ok(FunctionResult::new(e.id.clone(), runs, e.f_star())?)
            })
            .collect()
    };
    Ok(compare_suite(&per_variant(0)?, &per_variant(1)?)?)
}

/// Runs every (problem, variant, run) combination and writes the results
/// directory.
///
/// Run seeds depend only on the master seed and the problem and run indices,
/// so the number of worker threads never changes the output. If some runs
/// abort, the successful ones are still written and the manifest is marked
/// incomplete.
pub fn cmd_run(cfg: &HarnessConfig) -> Result<RunOutcome> {
    cfg.validate_run()?;
    let suite = cfg.suite.build()?;
    let dims = suite.dims;
    let max_evals = cfg.max_evals(dims);
    for v in &cfg.variants {
        let probe = v.pso_config(dims, max_evals, cfg.swarm_size, 0);
        probe
            .validate(suite.entries[0].problem.space())
            .map_err(|e| HarnessError::Usage(format!("variant {}: {e}", v.slug())))?;
    }

    let dir = cfg.out.clone();
    create_dir(&dir)?;
    write_text(&dir.join("config.json"), &cfg.to_json())?;
    write_text(&dir.join("suite.json"), &suite.to_recipe_json())?;

    let tasks: Vec<Task> = (0..suite.len())
        .flat_map(|problem| {
            (0..cfg.variants.len()).flat_map(move |variant| (0..cfg.runs).map(move |run| Task { problem, variant, run }))
        })
        .collect();
    let mut manifest = Manifest::start("run", tasks.len());
    manifest.files = vec!["config.json".into(), "suite.json".into(), "runs.csv".into()];

    let results: Vec<anakatabatic::Result<RunRecord>> = crate::with_pool(cfg.jobs, || {
        tasks
            .par_iter()
            .map(|t| {
                let entry = &suite.entries[t.problem];
                let pso = cfg.variants[t.variant].pso_config(dims, max_evals, cfg.swarm_size, cfg.run_seed(t.problem, t.run));
                run(&entry.problem, &pso).map_err(|e| anakatabatic::Error::InnerRun {
                    problem: entry.id.clone(),
                    source: Box::new(e),
                })
            })
            .collect()
    })?;

    let mut rows = Vec::with_capacity(tasks.len());
    let mut records = Vec::with_capacity(tasks.len());
    let mut first_error = None;
    if cfg.write_traces {
        create_dir(&dir.join("traces"))?;
        manifest.files.push("traces/".into());
    }
    for (t, result) in tasks.iter().zip(results) {
        let record = match result {
            Ok(r) => r,
            Err(e) => {
                first_error.get_or_insert(e);
                continue;
            }
        };
        let entry = &suite.entries[t.problem];
        let variant = &cfg.variants[t.variant];
        if cfg.write_traces {
            let n = cfg.swarm_size.unwrap_or(3 * dims);
            write_trace(&dir.join("traces").join(trace_file_name(&entry.id, &variant.slug(), t.run)), &record, n)?;
        }
        rows.push(RunRow {
            problem: entry.id.clone(),
            variant: variant.engine.name().into(),
            model: variant.model_label(),
            seed: record.seed,
            final_best: record.final_best,
            eps: record.final_best - entry.f_star(),
            evals: record.evals_used,
        });
        records.push(record);
    }
    write_rows(&dir.join("runs.csv"), &rows)?;
    manifest.tasks_done = rows.len();

    if let Some(e) = first_error {
        manifest.error = Some(e.to_string());
        manifest.notes.push("some runs aborted; runs.csv holds the completed ones".into());
        manifest.write(&dir)?;
        return Err(e.into());
    }

    let summary = if cfg.variants.len() == 2 {
        let cmp = comparison(&suite, cfg, &records)?;
        write_summary(&dir.join("summary.csv"), &cmp)?;
        manifest.files.push("summary.csv".into());
        manifest.notes.push(format!(
            "summary compares x = {} against x_a = {}",
            cfg.variants[0].slug(),
            cfg.variants[1].slug()
        ));
        Some(cmp)
    } else {
        manifest.notes.push(format!(
            "summary.csv omitted: comparison needs exactly two variants, got {}",
            cfg.variants.len()
        ));
        None
    };

    manifest.complete = true;
    manifest.write(&dir)?;
    Ok(RunOutcome {
        dir,
        rows,
        records,
        summary,
    })
}
