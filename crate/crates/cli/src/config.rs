use std::path::{Path, PathBuf};

use anakatabatic::benchmarks::{desk_suite, Suite};
use anakatabatic::inertia::{builtin_model, AkbModel, InertiaStrategy, DEFAULT_LDIW_MAX, DEFAULT_LDIW_MIN, DEFAULT_W0};
use anakatabatic::metaopt::{DesignVector, MetaSettings};
use anakatabatic::pso::{PsoConfig, Variant};
use anakatabatic::rng::derive_seed;
use serde::{Deserialize, Serialize};

use crate::{read_text, HarnessError, Result};

/// Which benchmark problems to use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteSpec {
    pub dims: usize,
    pub seed: u64,
    /// Recipe JSON written by an earlier run; overrides `dims` and `seed`.
    pub recipe: Option<PathBuf>,
    /// Keep only the first `problems` entries.
    pub problems: Option<usize>,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        Self {
            dims: 10,
            seed: 1,
            recipe: None,
            problems: None,
        }
    }
}

impl SuiteSpec {
    pub fn build(&self) -> Result<Suite> {
        let suite = match &self.recipe {
            Some(path) => Suite::from_recipe_json(&read_text(path)?)?,
            None => desk_suite(self.dims, self.seed)?,
        };
        Ok(match self.problems {
            Some(0) => return Err(HarnessError::Usage("suite.problems must be positive".into())),
            Some(k) => suite.truncated(k),
            None => suite,
        })
    }
}

/// One engine/inertia combination under test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantSpec {
    pub engine: Variant,
    pub inertia: InertiaStrategy,
}

impl VariantSpec {
    /// The engine's usual inertia: constant 0.72 for Standard PSO, LDIW for
    /// TVAC.
    pub fn baseline(engine: Variant) -> Self {
        let inertia = match engine {
            Variant::Standard => InertiaStrategy::Constant { w: DEFAULT_W0 },
            Variant::Tvac => InertiaStrategy::Ldiw {
                w_min: DEFAULT_LDIW_MIN,
                w_max: DEFAULT_LDIW_MAX,
            },
        };
        Self { engine, inertia }
    }

    pub fn with_model(engine: Variant, model: AkbModel) -> Self {
        Self {
            engine,
            inertia: InertiaStrategy::Anakatabatic { model },
        }
    }

    /// Value of the `model` column in `runs.csv`.
    pub fn model_label(&self) -> String {
        self.inertia.label()
    }

    /// File-name-safe identifier, unique per engine and inertia.
    pub fn slug(&self) -> String {
        let raw = format!("{}-{}", self.engine.name(), self.inertia.label()).replace("->", "-to-");
        let mut slug = String::with_capacity(raw.len());
        for c in raw.chars() {
            let c = if c.is_ascii_alphanumeric() || c == '.' { c } else { '-' };
            if !(c == '-' && slug.ends_with('-')) {
                slug.push(c);
            }
        }
        slug.trim_matches('-').to_string()
    }

    pub fn pso_config(&self, dims: usize, max_evals: usize, swarm: Option<usize>, seed: u64) -> PsoConfig {
        let mut cfg = match self.engine {
            Variant::Standard => PsoConfig::standard(dims, max_evals, seed),
            Variant::Tvac => PsoConfig::tvac(dims, max_evals, seed),
        };
        if let Some(n) = swarm {
            cfg.n = n;
        }
        cfg.with_inertia(self.inertia.clone())
    }
}

/// Metaoptimization settings. Seeds come from the master seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetaoptSpec {
    pub engine: Variant,
    pub runs_per_function: usize,
    pub outer_budget: usize,
    pub outer_swarm: usize,
    pub warm_starts: Vec<AkbModel>,
    /// Name given to the discovered model.
    pub name: String,
}

impl Default for MetaoptSpec {
    fn default() -> Self {
        let d = MetaSettings::default();
        Self {
            engine: d.variant,
            runs_per_function: d.runs_per_function,
            outer_budget: d.outer_budget,
            outer_swarm: d.outer_swarm,
            warm_starts: Vec::new(),
            name: "Discovered".into(),
        }
    }
}

/// Complete description of a harness invocation. Every results directory
/// contains the one that produced it as `config.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    pub suite: SuiteSpec,
    pub variants: Vec<VariantSpec>,
    /// Runs per problem and variant.
    pub runs: usize,
    pub master_seed: u64,
    /// Worker threads; does not affect results.
    pub jobs: usize,
    pub out: PathBuf,
    /// Evaluations per run; defaults to `1000 D`.
    pub max_evals: Option<usize>,
    /// Particles; defaults to `3 D`.
    pub swarm_size: Option<usize>,
    pub write_traces: bool,
    pub metaopt: MetaoptSpec,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            suite: SuiteSpec::default(),
            variants: vec![
                VariantSpec::baseline(Variant::Tvac),
                VariantSpec::with_model(Variant::Tvac, builtin_model("Rightward Peaks").expect("built-in model")),
            ],
            runs: 10,
            master_seed: 0,
            jobs: 1,
            out: PathBuf::from("results"),
            max_evals: None,
            swarm_size: None,
            write_traces: true,
            metaopt: MetaoptSpec::default(),
        }
    }
}

impl HarnessConfig {
    pub fn load(path: &Path) -> Result<Self> {
        serde_json::from_str(&read_text(path)?)
            .map_err(|e| HarnessError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn max_evals(&self, dims: usize) -> usize {
        self.max_evals.unwrap_or(1000 * dims)
    }

    /// Seed of run `run` on problem `problem`. Independent of the variant
    /// and of scheduling.
    pub fn run_seed(&self, problem: usize, run: usize) -> u64 {
        derive_seed(self.master_seed, &[problem as u64, run as u64])
    }

    pub fn validate_run(&self) -> Result<()> {
        if self.variants.is_empty() {
            return Err(HarnessError::Usage("at least one variant is required".into()));
        }
        if self.runs == 0 {
            return Err(HarnessError::Usage("runs must be positive".into()));
        }
        if self.jobs == 0 {
            return Err(HarnessError::Usage("jobs must be positive".into()));
        }
        let mut slugs: Vec<String> = self.variants.iter().map(VariantSpec::slug).collect();
        slugs.sort();
        slugs.dedup();
        if slugs.len() != self.variants.len() {
            return Err(HarnessError::Usage("variants must be distinct".into()));
        }
        Ok(())
    }

    pub fn meta_settings(&self) -> MetaSettings {
        let m = &self.metaopt;
        MetaSettings {
            variant: m.engine,
            runs_per_function: m.runs_per_function,
            inner_seed: derive_seed(self.master_seed, &[1]),
            outer_budget: m.outer_budget,
            outer_swarm: m.outer_swarm,
            outer_seed: derive_seed(self.master_seed, &[2]),
            warm_starts: m.warm_starts.iter().map(DesignVector::encode).collect(),
        }
    }
}

/// Loads a model from a JSON file, or by name from the built-in set.
pub fn load_model(reference: &str) -> Result<AkbModel> {
    let path = Path::new(reference);
    if path.is_file() {
        return Ok(AkbModel::from_json(&read_text(path)?)?);
    }
    builtin_model(reference).map_err(|_| {
        HarnessError::Usage(format!("`{reference}` is neither a model file nor a built-in model"))
    })
}
