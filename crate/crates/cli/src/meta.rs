use anakatabatic::metaopt::{meta_fitness, metaoptimize, MetaOutcome};

use crate::config::HarnessConfig;
use crate::{create_dir, csv_error, csv_writer, write_text, HarnessError, Manifest, Result};

/// Runs the metaoptimizer and writes `model.json`, `provenance.json` and
/// `history.csv` (best `F_M` after initialization and after each outer
/// iteration). Warm-start models also get their own `F_M` recorded in
/// `warm_starts.csv`.
pub fn cmd_metaopt(cfg: &HarnessConfig) -> Result<MetaOutcome> {
    if cfg.jobs == 0 {
        return Err(HarnessError::Usage("jobs must be positive".into()));
    }
    let suite = cfg.suite.build()?;
    let settings = cfg.meta_settings();
    settings.validate().map_err(|e| HarnessError::Usage(e.to_string()))?;
    if suite.len() < 5 {
        return Err(HarnessError::Usage(format!(
            "metaoptimization needs at least 5 problems, got {}",
            suite.len()
        )));
    }

    let dir = cfg.out.clone();
    create_dir(&dir)?;
    write_text(&dir.join("config.json"), &cfg.to_json())?;
    write_text(&dir.join("suite.json"), &suite.to_recipe_json())?;
    let mut manifest = Manifest::start("metaopt", settings.outer_budget);
    manifest.files = vec!["config.json".into(), "suite.json".into()];

    let result = crate::with_pool(cfg.jobs, || {
        let warm: anakatabatic::Result<Vec<f64>> =
            settings.warm_starts.iter().map(|w| meta_fitness(w, &settings, &suite)).collect();
        warm.and_then(|w| metaoptimize(&settings, &suite).map(|o| (w, o)))
    })?;
    let (warm_fitness, outcome) = match result {
        Ok(v) => v,
        Err(e) => {
            manifest.error = Some(e.to_string());
            manifest.write(&dir)?;
            return Err(e.into());
        }
    };

    let model = outcome.best.decode(&cfg.metaopt.name)?;
    write_text(&dir.join("model.json"), &model.to_json())?;
    write_text(
        &dir.join("provenance.json"),
        &serde_json::to_string_pretty(&outcome.provenance).expect("provenance serializes"),
    )?;

    let path = dir.join("history.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["iteration", "outer_evals", "best_fm"]).map_err(csv_error(&path))?;
    for (i, fm) in outcome.history.iter().enumerate() {
        w.serialize((i, settings.outer_swarm * (i + 1), fm)).map_err(csv_error(&path))?;
    }
    w.flush().map_err(|source| HarnessError::Io { path: path.clone(), source })?;

    manifest.files.extend(["model.json".into(), "provenance.json".into(), "history.csv".into()]);
    if !cfg.metaopt.warm_starts.is_empty() {
        let path = dir.join("warm_starts.csv");
        let mut w = csv_writer(&path)?;
        w.write_record(["model", "fm"]).map_err(csv_error(&path))?;
        for (m, fm) in cfg.metaopt.warm_starts.iter().zip(&warm_fitness) {
            w.serialize((&m.name, fm)).map_err(csv_error(&path))?;
        }
        w.flush().map_err(|source| HarnessError::Io { path: path.clone(), source })?;
        manifest.files.push("warm_starts.csv".into());
    }
    manifest.tasks_done = outcome.provenance.outer_evals_used;
    manifest.complete = true;
    manifest.write(&dir)?;
    Ok(outcome)
}
