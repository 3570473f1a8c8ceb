//! Error and comparison measures for repeated runs.
//!
//! * `eps_hat`: mean final best-of-swarm fitness minus the known optimum.
//! * `alpha`: paired relative difference of two errors, in `[-2, 2]`.
//! * `omega`: `log10` ratio of two errors, i.e. orders of magnitude gained.
//!
//! Both comparisons are positive when the second (adaptive) variant has the
//! smaller error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Errors are floored here before any logarithm.
pub const EPS_FLOOR: f64 = 1e-300;

/// Outcome of one seeded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub final_best: f64,
    /// Global best after initialization and after every iteration.
    pub trace: Vec<f64>,
    pub evals_used: usize,
    pub seed: u64,
    pub best_position: Vec<f64>,
}

impl RunRecord {
    pub fn trace_is_non_increasing(&self) -> bool {
        self.trace.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Repeated runs of one variant on one problem.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionResult {
    pub problem: String,
    pub records: Vec<RunRecord>,
    pub eps_hat: f64,
}

impl FunctionResult {
    pub fn new(problem: impl Into<String>, records: Vec<RunRecord>, f_star: f64) -> Result<Self> {
        let eps_hat = epsilon_hat(&records, f_star)?;
        Ok(Self {
            problem: problem.into(),
            records,
            eps_hat,
        })
    }
}

/// Mean final best fitness minus `f_star`, floored at [`EPS_FLOOR`].
pub fn epsilon_hat(records: &[RunRecord], f_star: f64) -> Result<f64> {
    let finals: Vec<f64> = records.iter().map(|r| r.final_best).collect();
    epsilon_hat_from_finals(&finals, f_star)
}

pub fn epsilon_hat_from_finals(finals: &[f64], f_star: f64) -> Result<f64> {
    if finals.is_empty() {
        return Err(Error::Contract("epsilon_hat needs at least one run".into()));
    }
    let mean = finals.iter().sum::<f64>() / finals.len() as f64;
    Ok((mean - f_star).max(EPS_FLOOR))
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Contract(format!("{name} must be positive and finite, got {v}")))
    }
}

/// `(eps_x - eps_xa) / ((eps_x + eps_xa) / 2)`.
pub fn alpha(eps_x: f64, eps_xa: f64) -> Result<f64> {
    check_positive("eps_x", eps_x)?;
    check_positive("eps_xa", eps_xa)?;
    let a = (eps_x - eps_xa) / (0.5 * eps_x + 0.5 * eps_xa);
    Ok(a.clamp(-2.0, 2.0))
}

/// `log10(eps_x / eps_xa)`.
pub fn omega(eps_x: f64, eps_xa: f64) -> Result<f64> {
    check_positive("eps_x", eps_x)?;
    check_positive("eps_xa", eps_xa)?;
    Ok(eps_x.log10() - eps_xa.log10())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub problem: String,
    pub eps_x: f64,
    pub eps_xa: f64,
    pub alpha: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteComparison {
    pub alpha_avg: f64,
    pub omega_avg: f64,
    pub rows: Vec<ComparisonRow>,
}

/// Per-function `alpha` and `omega` of a baseline (`x`) against its adaptive
/// counterpart (`xa`), plus their unweighted means.
pub fn compare_suite(results_x: &[FunctionResult], results_xa: &[FunctionResult]) -> Result<SuiteComparison> {
    let pairs: Vec<(&str, f64, f64)> = pair_up(results_x, results_xa)?;
    compare_errors(&pairs)
}

fn pair_up<'a>(x: &'a [FunctionResult], xa: &'a [FunctionResult]) -> Result<Vec<(&'a str, f64, f64)>> {
    if x.len() != xa.len() {
        return Err(Error::Contract(format!(
            "problem sets differ in size: {} vs {}",
            x.len(),
            xa.len()
        )));
    }
    x.iter()
        .zip(xa)
        .map(|(a, b)| {
            if a.problem == b.problem {
                Ok((a.problem.as_str(), a.eps_hat, b.eps_hat))
            } else {
                Err(Error::Contract(format!(
                    "problem order differs: `{}` vs `{}`",
                    a.problem, b.problem
                )))
            }
        })
        .collect()
}

/// Same as [`compare_suite`] over precomputed `(problem, eps_x, eps_xa)`
/// triples.
pub fn compare_errors(pairs: &[(&str, f64, f64)]) -> Result<SuiteComparison> {
    if pairs.is_empty() {
        return Err(Error::Contract("nothing to compare".into()));
    }
    let rows = pairs
        .iter()
        .map(|&(problem, ex, exa)| {
            Ok(ComparisonRow {
                problem: problem.to_string(),
                eps_x: ex,
                eps_xa: exa,
                alpha: alpha(ex, exa)?,
                omega: omega(ex, exa)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len() as f64;
    Ok(SuiteComparison {
        alpha_avg: rows.iter().map(|r| r.alpha).sum::<f64>() / n,
        omega_avg: rows.iter().map(|r| r.omega).sum::<f64>() / n,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(final_best: f64) -> RunRecord {
        RunRecord {
            final_best,
            trace: vec![final_best],
            evals_used: 1,
            seed: 0,
            best_position: vec![],
        }
    }

    #[test]
    fn epsilon_hat_examples() {
        assert_eq!(epsilon_hat(&[record(3.0), record(5.0)], 1.0).unwrap(), 3.0);
        assert_eq!(epsilon_hat(&[record(2.0), record(2.0)], 2.0).unwrap(), EPS_FLOOR);
        assert_eq!(epsilon_hat(&[record(7.5)], 0.5).unwrap(), 7.0);
        assert!(matches!(epsilon_hat(&[], 0.0), Err(Error::Contract(_))));
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha(3.0, 3.0).unwrap(), 0.0);
        assert!((alpha(10.0, 5.0).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((alpha(1.0, 1e-300).unwrap() - 2.0).abs() < 1e-12);
        assert!(alpha(0.0, 1.0).is_err());
        assert!(alpha(1.0, -1.0).is_err());
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(10.0, 1.0).unwrap(), 1.0);
        assert_eq!(omega(4.0, 4.0).unwrap(), 0.0);
        assert_eq!(omega(1.0, 10.0).unwrap(), -1.0);
        assert!(omega(1.0, 0.0).is_err());
    }

    fn result(problem: &str, eps: f64) -> FunctionResult {
        FunctionResult {
            problem: problem.into(),
            records: vec![],
            eps_hat: eps,
        }
    }

    #[test]
    fn compare_identical_results() {
        let rs = vec![result("F1", 2.0), result("F2", 0.1)];
        let c = compare_suite(&rs, &rs).unwrap();
        assert_eq!((c.alpha_avg, c.omega_avg), (0.0, 0.0));
        assert!(c.rows.iter().all(|r| r.alpha == 0.0 && r.omega == 0.0));
    }

    #[test]
    fn compare_averages() {
        let x = vec![result("F1", 10.0), result("F2", 1.0)];
        let xa = vec![result("F1", 1.0), result("F2", 10.0)];
        let c = compare_suite(&x, &xa).unwrap();
        assert_eq!(c.rows[0].omega, 1.0);
        assert_eq!(c.rows[1].omega, -1.0);
        assert_eq!(c.omega_avg, 0.0);
    }

    #[test]
    fn compare_rejects_mismatched_sets() {
        let x = vec![result("F1", 1.0)];
        assert!(compare_suite(&x, &[result("F2", 1.0)]).is_err());
        assert!(compare_suite(&x, &[]).is_err());
    }

    proptest! {
        #[test]
        fn alpha_sign_and_range(a in 1e-12f64..1e12, b in 1e-12f64..1e12) {
            let al = alpha(a, b).unwrap();
            let om = omega(a, b).unwrap();
            prop_assert!((-2.0..=2.0).contains(&al));
            prop_assert_eq!(al.partial_cmp(&0.0), (a - b).partial_cmp(&0.0));
            if al != 0.0 {
                prop_assert_eq!(al > 0.0, om > 0.0);
            }
        }
    }
}
