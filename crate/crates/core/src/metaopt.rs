//! Metaoptimization of anakatabatic models.
//!
//! A model is a point in `[-2, 2]^10`: the five `W_s` knots followed by the
//! five `W_f` knots. Its fitness `F_M` is the mean `log10` error over the
//! middle of the suite: errors are sorted ascending and `floor(N / 10)`
//! problems are dropped from each end. The outer search is this crate's own
//! Standard PSO.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::Suite;
use crate::error::{Error, Result};
use crate::inertia::{AkbModel, InertiaStrategy};
use crate::metrics::epsilon_hat_from_finals;
use crate::pso::{run, run_with, PsoConfig, Variant};
use crate::rng::derive_seed;
use crate::swarm::{Objective, SearchSpace};

pub const DESIGN_BOUND: f64 = 2.0;
pub const DESIGN_DIMS: usize = 10;
/// Inner budget per problem is this many evaluations per dimension.
pub const INNER_EVALS_PER_DIM: usize = 1000;

/// The ten knot values of an anakatabatic model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignVector(pub [f64; DESIGN_DIMS]);

impl DesignVector {
    pub fn from_slice(x: &[f64]) -> Result<Self> {
        let arr: [f64; DESIGN_DIMS] = x
            .try_into()
            .map_err(|_| Error::Contract(format!("design vector needs {DESIGN_DIMS} components, got {}", x.len())))?;
        Ok(Self(arr))
    }

    pub fn in_bounds(&self) -> bool {
        self.0.iter().all(|v| (-DESIGN_BOUND..=DESIGN_BOUND).contains(v))
    }

    pub fn decode(&self, name: &str) -> Result<AkbModel> {
        if !self.in_bounds() {
            return Err(Error::Contract(format!(
                "design vector component outside [-{DESIGN_BOUND}, {DESIGN_BOUND}]: {:?}",
                self.0
            )));
        }
        let mut start = [0.0; 5];
        let mut fin = [0.0; 5];
        start.copy_from_slice(&self.0[..5]);
        fin.copy_from_slice(&self.0[5..]);
        Ok(AkbModel::new(name, start, fin))
    }

    pub fn encode(model: &AkbModel) -> Self {
        let mut x = [0.0; DESIGN_DIMS];
        x[..5].copy_from_slice(&model.knots_start);
        x[5..].copy_from_slice(&model.knots_final);
        Self(x)
    }
}

pub fn decode(x: &DesignVector, name: &str) -> Result<AkbModel> {
    x.decode(name)
}

pub fn encode(model: &AkbModel) -> DesignVector {
    DesignVector::encode(model)
}

/// Number of problems trimmed from each end of a suite of `n`.
pub fn trim_count(n: usize) -> usize {
    n / 10
}

/// Indices of the kept problems, in ascending order of error. Ties keep the
/// original problem order.
pub fn kept_indices(eps: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..eps.len()).collect();
    order.sort_by(|&a, &b| eps[a].total_cmp(&eps[b]).then(a.cmp(&b)));
    let m = trim_count(eps.len());
    order[m..eps.len() - m].to_vec()
}

/// `F_M` from per-problem errors, together with the kept problem indices.
pub fn trimmed_fitness(eps: &[f64]) -> Result<(f64, Vec<usize>)> {
    if eps.is_empty() {
        return Err(Error::Contract("trimmed fitness needs at least one error".into()));
    }
    if let Some(bad) = eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::Contract(format!("errors must be positive and finite, got {bad}")));
    }
    let kept = kept_indices(eps);
    let total: f64 = kept.iter().map(|&i| eps[i].log10()).sum();
    Ok((total / kept.len() as f64, kept))
}

/// Everything that defines a metaoptimization experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaSettings {
    /// Engine the models are tuned for.
    pub variant: Variant,
    /// Runs per suite problem inside one `F_M` evaluation.
    pub runs_per_function: usize,
    /// Seed from which every inner run seed is derived.
    pub inner_seed: u64,
    /// Outer Standard PSO budget in `F_M` evaluations.
    pub outer_budget: usize,
    /// Outer swarm size.
    pub outer_swarm: usize,
    pub outer_seed: u64,
    /// Models placed in the initial outer swarm.
    pub warm_starts: Vec<DesignVector>,
}

impl Default for MetaSettings {
    fn default() -> Self {
        Self {
            variant: Variant::Standard,
            runs_per_function: 8,
            inner_seed: 0,
            outer_budget: 600,
            outer_swarm: 30,
            outer_seed: 0,
            warm_starts: Vec::new(),
        }
    }
}

impl MetaSettings {
    pub fn validate(&self) -> Result<()> {
        if self.runs_per_function == 0 {
            return Err(Error::InvalidConfig("runs_per_function must be at least 1".into()));
        }
        if self.outer_swarm < 2 {
            return Err(Error::InvalidConfig("outer swarm needs at least 2 particles".into()));
        }
        if self.outer_budget < 2 * self.outer_swarm {
            return Err(Error::InvalidConfig(format!(
                "outer budget {} is below two outer generations ({})",
                self.outer_budget,
                2 * self.outer_swarm
            )));
        }
        if self.warm_starts.len() > self.outer_swarm {
            return Err(Error::InvalidConfig("more warm starts than outer particles".into()));
        }
        if let Some(w) = self.warm_starts.iter().find(|w| !w.in_bounds()) {
            return Err(Error::InvalidConfig(format!("warm start out of bounds: {:?}", w.0)));
        }
        Ok(())
    }

    /// Inner engine configuration for one run.
    pub fn inner_config(&self, dims: usize, model: AkbModel, seed: u64) -> PsoConfig {
        let budget = INNER_EVALS_PER_DIM * dims;
        let base = match self.variant {
            Variant::Standard => PsoConfig::standard(dims, budget, seed),
            Variant::Tvac => PsoConfig::tvac(dims, budget, seed),
        };
        base.with_inertia(InertiaStrategy::Anakatabatic { model })
    }
}

/// Per-problem errors of a model on a suite.
pub fn suite_errors(x: &DesignVector, settings: &MetaSettings, suite: &Suite) -> Result<Vec<f64>> {
    if settings.runs_per_function == 0 {
        return Err(Error::InvalidConfig("runs_per_function must be at least 1".into()));
    }
    let model = x.decode("candidate")?;
    let runs = settings.runs_per_function;
    let tasks: Vec<(usize, usize)> = (0..suite.len())
        .flat_map(|p| (0..runs).map(move |r| (p, r)))
        .collect();
    let outcomes: Vec<Result<f64>> = tasks
        .par_iter()
        .map(|&(p, r)| {
            let entry = &suite.entries[p];
            let seed = derive_seed(settings.inner_seed, &[problem_key(&entry.id), r as u64]);
            let cfg = settings.inner_config(suite.dims, model.clone(), seed);
            run(&entry.problem, &cfg)
                .map(|rec| rec.final_best)
                .map_err(|e| Error::InnerRun {
                    problem: entry.id.clone(),
                    source: Box::new(e),
                })
        })
        .collect();
    let finals = outcomes.into_iter().collect::<Result<Vec<f64>>>()?;
    suite
        .entries
        .iter()
        .zip(finals.chunks(runs))
        .map(|(entry, chunk)| epsilon_hat_from_finals(chunk, entry.f_star()))
        .collect()
}

/// Stable 64-bit key of a problem id (FNV-1a), so inner seeds follow the
/// problem rather than its position in the suite.
pub fn problem_key(id: &str) -> u64 {
    id.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// `F_M` of a design vector. Inner seeds depend only on the problem id and
/// the run index, so the value is a deterministic function of `x` and does
/// not change when the suite is reordered.
pub fn meta_fitness(x: &DesignVector, settings: &MetaSettings, suite: &Suite) -> Result<f64> {
    if suite.len() < 5 {
        return Err(Error::InvalidConfig(format!("metaoptimization needs at least 5 problems, got {}", suite.len())));
    }
    let eps = suite_errors(x, settings, suite)?;
    Ok(trimmed_fitness(&eps)?.0)
}

/// `F_M` as an objective over `[-2, 2]^10`.
pub struct MetaObjective<'a> {
    settings: &'a MetaSettings,
    suite: &'a Suite,
    space: SearchSpace,
}

impl<'a> MetaObjective<'a> {
    pub fn new(settings: &'a MetaSettings, suite: &'a Suite) -> Self {
        Self {
            settings,
            suite,
            space: SearchSpace::cube(DESIGN_DIMS, -DESIGN_BOUND, DESIGN_BOUND).expect("valid design box"),
        }
    }
}

impl Objective for MetaObjective<'_> {
    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        self.try_evaluate(x).unwrap_or(f64::NAN)
    }

    fn try_evaluate(&self, x: &[f64]) -> Result<f64> {
        meta_fitness(&DesignVector::from_slice(x)?, self.settings, self.suite)
    }
}

/// Where a discovered model came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub outer_optimizer: String,
    pub settings: MetaSettings,
    pub suite_dims: usize,
    pub suite_seed: u64,
    pub suite_size: usize,
    pub suite_recipe_sha256: String,
    pub inner_evals_per_run: usize,
    pub outer_evals_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaOutcome {
    pub best: DesignVector,
    pub best_fitness: f64,
    /// Best `F_M` after initialization and after every outer iteration.
    pub history: Vec<f64>,
    pub provenance: Provenance,
}

pub fn metaoptimize(settings: &MetaSettings, suite: &Suite) -> Result<MetaOutcome> {
    settings.validate()?;
    if suite.len() < 5 {
        return Err(Error::InvalidConfig(format!("metaoptimization needs at least 5 problems, got {}", suite.len())));
    }
    let objective = MetaObjective::new(settings, suite);
    let mut outer = PsoConfig::standard(DESIGN_DIMS, settings.outer_budget, settings.outer_seed);
    outer.n = settings.outer_swarm;
    let mut rule = outer.inertia.clone();
    let warm: Vec<Vec<f64>> = settings.warm_starts.iter().map(|w| w.0.to_vec()).collect();
    let record = run_with(&objective, &outer, &mut rule, &warm, |_| {})?;

    Ok(MetaOutcome {
        best: DesignVector::from_slice(&record.best_position)?,
        best_fitness: record.final_best,
        history: record.trace,
        provenance: Provenance {
            outer_optimizer: format!(
                "self-hosted Standard PSO, constant inertia {}, c1 = c2 = {}, {} particles (stand-in; original metaoptimizer unpublished)",
                outer.w0, outer.c1, outer.n
            ),
            settings: settings.clone(),
            suite_dims: suite.dims,
            suite_seed: suite.seed,
            suite_size: suite.len(),
            suite_recipe_sha256: suite.recipe_hash(),
            inner_evals_per_run: INNER_EVALS_PER_DIM * suite.dims,
            outer_evals_used: record.evals_used,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::desk_suite;
    use crate::inertia::builtin_model;
    use proptest::prelude::*;

    fn brute_force_trimmed(eps: &[f64]) -> f64 {
        let mut sorted = eps.to_vec();
        sorted.sort_by(f64::total_cmp);
        let m = eps.len() / 10;
        let kept = &sorted[m..eps.len() - m];
        kept.iter().map(|e| e.log10()).sum::<f64>() / kept.len() as f64
    }

    #[test]
    fn flying_stork_decodes_from_its_table_row() {
        let x = DesignVector([-0.86, 0.24, -1.10, 0.75, 0.72, -0.81, -0.35, -0.26, 0.64, 0.60]);
        let stork = builtin_model("Flying Stork").unwrap();
        assert_eq!(x.decode("Flying Stork").unwrap(), stork);
        assert_eq!(encode(&stork), x);
        assert_eq!(decode(&encode(&stork), "Flying Stork").unwrap(), stork);
    }

    #[test]
    fn zero_vector_is_zero_model() {
        let m = DesignVector([0.0; 10]).decode("zero").unwrap();
        assert_eq!(m.knots_start, [0.0; 5]);
        assert_eq!(m.knots_final, [0.0; 5]);
    }

    #[test]
    fn out_of_bounds_is_a_contract_violation() {
        let mut x = [0.0; 10];
        x[7] = 2.5;
        assert!(matches!(DesignVector(x).decode("bad"), Err(Error::Contract(_))));
        x[7] = f64::NAN;
        assert!(DesignVector(x).decode("bad").is_err());
    }

    #[test]
    fn thirty_problems_keep_ranks_four_to_twenty_seven() {
        let eps: Vec<f64> = (0..30).map(|i| 10f64.powi(i - 15)).rev().collect();
        let kept = kept_indices(&eps);
        let mut ranks: Vec<usize> = kept
            .iter()
            .map(|&i| {
                let mut order: Vec<usize> = (0..30).collect();
                order.sort_by(|&a, &b| eps[a].total_cmp(&eps[b]));
                order.iter().position(|&j| j == i).unwrap() + 1
            })
            .collect();
        ranks.sort();
        assert_eq!(ranks, (4..=27).collect::<Vec<_>>());
    }

    #[test]
    fn all_tens_give_one() {
        let (f, kept) = trimmed_fitness(&[10.0; 30]).unwrap();
        assert_eq!(kept.len(), 24);
        let direct: f64 = (0..24).map(|_| 10f64.log10()).sum::<f64>() / 24.0;
        assert!((f - direct).abs() < 1e-12);
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn outliers_are_trimmed() {
        let mut eps = vec![1.0; 10];
        eps[3] = 1e-3;
        eps[8] = 1e3;
        assert_eq!(trimmed_fitness(&eps).unwrap().0, 0.0);
    }

    #[test]
    fn ties_resolve_by_index() {
        assert_eq!(kept_indices(&[1.0; 10]), (1..9).collect::<Vec<_>>());
    }

    #[test]
    fn small_suites_are_not_trimmed() {
        let (f, kept) = trimmed_fitness(&[1.0, 100.0]).unwrap();
        assert_eq!(kept, vec![0, 1]);
        assert_eq!(f, 1.0);
    }

    proptest! {
        #[test]
        fn matches_brute_force(eps in prop::collection::vec(1e-12f64..1e12, 1..60)) {
            let (f, _) = trimmed_fitness(&eps).unwrap();
            prop_assert!((f - brute_force_trimmed(&eps)).abs() < 1e-9);
        }

        #[test]
        fn permutation_invariant(eps in prop::collection::vec(1e-12f64..1e12, 5..40), seed in any::<u64>()) {
            let mut shuffled = eps.clone();
            let mut rng = crate::rng::RngStream::new(seed);
            for i in (1..shuffled.len()).rev() {
                let j = (rng.unit() * (i + 1) as f64) as usize;
                shuffled.swap(i, j.min(i));
            }
            let a = trimmed_fitness(&eps).unwrap().0;
            let b = trimmed_fitness(&shuffled).unwrap().0;
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn dominating_model_scores_lower(eps in prop::collection::vec(1e-6f64..1e6, 10..30), factor in 1.01f64..100.0) {
            let better: Vec<f64> = eps.iter().map(|e| e / factor).collect();
            prop_assert!(trimmed_fitness(&better).unwrap().0 < trimmed_fitness(&eps).unwrap().0);
        }
    }

    fn tiny_settings() -> MetaSettings {
        MetaSettings {
            runs_per_function: 2,
            outer_budget: 8,
            outer_swarm: 4,
            ..MetaSettings::default()
        }
    }

    #[test]
    fn meta_fitness_is_deterministic_and_order_free() {
        let suite = desk_suite(2, 1).unwrap().truncated(5);
        let settings = tiny_settings();
        let x = encode(&builtin_model("Rightward Peaks").unwrap());
        let a = meta_fitness(&x, &settings, &suite).unwrap();
        assert_eq!(a, meta_fitness(&x, &settings, &suite).unwrap());
        assert!(a.is_finite());
    }

    #[test]
    fn suite_order_does_not_matter() {
        let suite = desk_suite(2, 2).unwrap().truncated(6);
        let mut reversed = suite.clone();
        reversed.entries.reverse();
        let x = encode(&builtin_model("Messy Tie").unwrap());
        let settings = tiny_settings();
        assert_eq!(
            meta_fitness(&x, &settings, &suite).unwrap(),
            meta_fitness(&x, &settings, &reversed).unwrap()
        );
    }

    #[test]
    fn too_small_suite_is_rejected() {
        let suite = desk_suite(2, 1).unwrap().truncated(4);
        let x = DesignVector([0.5; 10]);
        assert!(meta_fitness(&x, &tiny_settings(), &suite).is_err());
    }

    #[test]
    fn warm_start_bounds_the_outcome() {
        let suite = desk_suite(2, 3).unwrap().truncated(5);
        let warm = encode(&builtin_model("Rightward Peaks").unwrap());
        let settings = MetaSettings {
            warm_starts: vec![warm],
            ..tiny_settings()
        };
        let warm_fm = meta_fitness(&warm, &settings, &suite).unwrap();
        let out = metaoptimize(&settings, &suite).unwrap();
        assert!(out.history[0] <= warm_fm);
        assert!(out.best_fitness <= warm_fm);
        assert!(out.history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(out.history.len(), 2);
        assert_eq!(out, metaoptimize(&settings, &suite).unwrap());
        assert!(out.best.in_bounds());
    }
}
