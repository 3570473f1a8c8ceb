use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anakatabatic::inertia::{AkbModel, InertiaStrategy, KNOT_THETAS};

use crate::config::HarnessConfig;
use crate::{create_dir, csv_error, csv_writer, read_text, HarnessError, Result};

/// Samples per knot segment in curve files.
const SEGMENT_SAMPLES: usize = 50;

/// `(q1, median, q3)` with linear interpolation between order statistics.
pub fn quartiles(values: &[f64]) -> (f64, f64, f64) {
    assert!(!values.is_empty(), "quartiles of an empty sample");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let at = |q: f64| {
        let pos = q * (v.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
    };
    (at(0.25), at(0.5), at(0.75))
}

/// Curve abscissae: every knot exactly, plus evenly spaced points between.
fn curve_thetas() -> Vec<f64> {
    let mut out = Vec::with_capacity(4 * SEGMENT_SAMPLES + 1);
    for s in 0..4 {
        let (a, b) = (KNOT_THETAS[s], KNOT_THETAS[s + 1]);
        for j in 0..SEGMENT_SAMPLES {
            out.push(if j == 0 { a } else { a + (b - a) * j as f64 / SEGMENT_SAMPLES as f64 });
        }
    }
    out.push(KNOT_THETAS[4]);
    out
}

fn write_curve(path: &Path, model: &AkbModel) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["theta", "w_start", "w_final"]).map_err(csv_error(path))?;
    for theta in curve_thetas() {
        w.serialize((theta, model.w_start(theta), model.w_final(theta))).map_err(csv_error(path))?;
    }
    w.flush().map_err(|source| HarnessError::Io { path: path.into(), source })
}

fn read_trace(path: &Path) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error(path))?;
    let mut out = Vec::new();
    for row in r.deserialize::<(usize, usize, f64)>() {
        out.push(row.map_err(csv_error(path))?.2);
    }
    Ok(out)
}

fn write_aggregate(path: &Path, runs: &[Vec<f64>]) -> Result<()> {
    let len = runs.iter().map(Vec::len).min().unwrap_or(0);
    let mut w = csv_writer(path)?;
    w.write_record(["iteration", "median", "q1", "q3"]).map_err(csv_error(path))?;
    let mut column = vec![0.0; runs.len()];
    for i in 0..len {
        for (c, run) in column.iter_mut().zip(runs) {
            *c = run[i];
        }
        let (q1, med, q3) = quartiles(&column);
        w.serialize((i, med, q1, q3)).map_err(csv_error(path))?;
    }
    w.flush().map_err(|source| HarnessError::Io { path: path.into(), source })
}

/// Trace files grouped by `problem__variant`, each group sorted by name.
fn trace_groups(dir: &Path) -> Result<BTreeMap<String, Vec<PathBuf>>> {
    let mut groups: BTreeMap<String, Vec<PathBuf>> = BTreeMap::new();
    let traces = dir.join("traces");
    if !traces.is_dir() {
        return Ok(groups);
    }
    let entries = fs::read_dir(&traces).map_err(|source| HarnessError::Io { path: traces.clone(), source })?;
    for entry in entries {
        let path = entry.map_err(|source| HarnessError::Io { path: traces.clone(), source })?.path();
        let Some(name) = path.file_stem().and_then(|s| s.to_str()) else { continue };
        if let Some((key, _run)) = name.rsplit_once("__r") {
            groups.entry(key.to_string()).or_default().push(path.clone());
        }
    }
    for files in groups.values_mut() {
        files.sort();
    }
    Ok(groups)
}

/// Writes plot data for a results directory into `<dir>/plots`:
/// `curve_<model>.csv` with `(theta, w_start, w_final)` for every model found
/// (the directory's `model.json`, anakatabatic variants in its
/// `config.json`, and `extra_models`), and `trace_<problem>__<variant>.csv`
/// with per-iteration median and quartiles of the run traces.
pub fn cmd_plotdata(dir: &Path, extra_models: &[AkbModel]) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(HarnessError::Missing(format!("no results directory at {}", dir.display())));
    }
    let mut models: Vec<AkbModel> = Vec::new();
    let model_file = dir.join("model.json");
    if model_file.is_file() {
        models.push(AkbModel::from_json(&read_text(&model_file)?)?);
    }
    let config_file = dir.join("config.json");
    if config_file.is_file() {
        let cfg = HarnessConfig::load(&config_file)?;
        for v in cfg.variants {
            if let InertiaStrategy::Anakatabatic { model } = v.inertia {
                models.push(model);
            }
        }
    }
    models.extend(extra_models.iter().cloned());
    let mut seen = std::collections::BTreeSet::new();
    models.retain(|m| seen.insert(m.slug()));

    let groups = trace_groups(dir)?;
    if models.is_empty() && groups.is_empty() {
        return Err(HarnessError::Missing(format!(
            "nothing to plot in {}: no model.json, anakatabatic variants or traces",
            dir.display()
        )));
    }

    let plots = dir.join("plots");
    create_dir(&plots)?;
    let mut written = Vec::new();
    for m in &models {
        let path = plots.join(format!("curve_{}.csv", m.slug()));
        write_curve(&path, m)?;
        written.push(path);
    }
    for (key, files) in &groups {
        let runs = files.iter().map(|f| read_trace(f)).collect::<Result<Vec<_>>>()?;
        let path = plots.join(format!("trace_{key}.csv"));
        write_aggregate(&path, &runs)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartiles_of_small_samples() {
        assert_eq!(quartiles(&[3.0]), (3.0, 3.0, 3.0));
        assert_eq!(quartiles(&[4.0, 1.0, 3.0, 2.0, 5.0]), (2.0, 3.0, 4.0));
        assert_eq!(quartiles(&[1.0, 2.0]), (1.25, 1.5, 1.75));
    }

    #[test]
    fn curve_hits_every_knot() {
        let thetas = curve_thetas();
        for k in KNOT_THETAS {
            assert!(thetas.contains(&k));
        }
        assert!(thetas.windows(2).all(|w| w[0] < w[1]));
    }
}
