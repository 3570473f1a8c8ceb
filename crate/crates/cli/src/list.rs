use std::fmt::Write;
use std::str::FromStr;

use anakatabatic::benchmarks::desk_suite;
use anakatabatic::inertia::builtin_models;

use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListKind {
    Models,
    Functions,
}

impl FromStr for ListKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "models" => Ok(ListKind::Models),
            "functions" => Ok(ListKind::Functions),
            other => Err(HarnessError::Usage(format!(
                "unknown listing `{other}`; expected `models` or `functions`"
            ))),
        }
    }
}

fn knots(values: &[f64; 5]) -> String {
    values.iter().map(|v| format!("{v:>6.2}")).collect::<Vec<_>>().join(" ")
}

/// Text listing of the built-in models or of the desk suite.
pub fn cmd_list(kind: ListKind, dims: usize, seed: u64) -> Result<String> {
    let mut out = String::new();
    match kind {
        ListKind::Models => {
            writeln!(out, "{:<16} {:<6} knots at pi/4, pi/2, 3pi/4, pi, 5pi/4", "model", "curve").unwrap();
            for m in builtin_models() {
                writeln!(out, "{:<16} {:<6} {}", m.name, "W_s", knots(&m.knots_start)).unwrap();
                writeln!(out, "{:<16} {:<6} {}", "", "W_f", knots(&m.knots_final)).unwrap();
            }
        }
        ListKind::Functions => {
            let suite = desk_suite(dims, seed)?;
            writeln!(out, "desk suite, D = {dims}, seed = {seed}, recipe sha256 {}", suite.recipe_hash()).unwrap();
            for e in &suite.entries {
                writeln!(
                    out,
                    "{}  [{:<11}]  f* = {:<6}  {}",
                    e.id,
                    e.category.name(),
                    e.f_star(),
                    e.problem.describe()
                )
                .unwrap();
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn models_listing_names_all_four() {
        let text = cmd_list(ListKind::Models, 10, 1).unwrap();
        for name in ["Flying Stork", "Messy Tie", "Rightward Peaks", "Origami Snake"] {
            assert!(text.contains(name), "{name}");
        }
    }

    #[test]
    fn functions_listing_has_twelve_tagged_rows() {
        let text = cmd_list(ListKind::Functions, 10, 1).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| l.starts_with('F')).collect();
        assert_eq!(rows.len(), 12);
        assert_eq!(rows.iter().filter(|r| r.contains("[composition")).count(), 2);
    }

    #[test]
    fn unknown_kind_is_a_usage_error() {
        let err = "foo".parse::<ListKind>().unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
