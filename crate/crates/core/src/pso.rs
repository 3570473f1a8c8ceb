//! Standard PSO and TVAC-PSO engines (gbest topology, synchronous updates).
//!
//! Each iteration asks an [`InertiaRule`] for one weight per particle, moves
//! every particle with
//!
//! ```text
//! v <- w_k * v + c1 * r1 .* (p - x) + c2 * r2 .* (g - x)
//! x <- clip(x + v)
//! ```
//!
//! evaluates the new positions and only then refreshes personal and global
//! bests, so all particles of an iteration see the same `g`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inertia::{
    ldiw_weight, lerp, progress, InertiaRule, InertiaStrategy, WeightStep, DEFAULT_LDIW_MAX,
    DEFAULT_LDIW_MIN, DEFAULT_W0,
};
use crate::metrics::RunRecord;
use crate::rng::RngStream;
use crate::swarm::{
    checked_eval, clip_position, initialize_swarm_with, update_bests, Objective, Particle,
    RunBudget, SearchSpace, SwarmState,
};

/// Stream key driving initialization and `r1`/`r2`.
pub const MOTION_STREAM: u64 = 0;
/// Stream key reserved for inertia decisions.
pub const INERTIA_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Standard,
    Tvac,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::Tvac => "tvac",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" | "spso" => Ok(Variant::Standard),
            "tvac" | "tvac-pso" => Ok(Variant::Tvac),
            other => Err(Error::InvalidConfig(format!("unknown PSO variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoConfig {
    pub variant: Variant,
    /// Swarm size.
    pub n: usize,
    /// Standard PSO coefficients.
    pub c1: f64,
    pub c2: f64,
    /// TVAC schedules, linear from start to final.
    pub c1_start: f64,
    pub c1_final: f64,
    pub c2_start: f64,
    pub c2_final: f64,
    /// Default inertia; the Standard PSO fallback before fitness history
    /// exists.
    pub w0: f64,
    /// LDIW range; the TVAC fallback before fitness history exists.
    pub ldiw_min: f64,
    pub ldiw_max: f64,
    pub inertia: InertiaStrategy,
    pub budget: RunBudget,
    pub seed: u64,
}

impl PsoConfig {
    /// Standard PSO: `c1 = c2 = 1`, constant `w = 0.72`, `3D` particles.
    pub fn standard(dims: usize, max_evals: usize, seed: u64) -> Self {
        Self {
            variant: Variant::Standard,
            n: 3 * dims,
            c1: 1.0,
            c2: 1.0,
            c1_start: 2.5,
            c1_final: 0.5,
            c2_start: 0.5,
            c2_final: 2.5,
            w0: DEFAULT_W0,
            ldiw_min: DEFAULT_LDIW_MIN,
            ldiw_max: DEFAULT_LDIW_MAX,
            inertia: InertiaStrategy::Constant { w: DEFAULT_W0 },
            budget: RunBudget::new(max_evals),
            seed,
        }
    }

    /// TVAC-PSO: `c1` 2.5 to 0.5, `c2` 0.5 to 2.5, LDIW 0.9 to 0.4.
    pub fn tvac(dims: usize, max_evals: usize, seed: u64) -> Self {
        Self {
            variant: Variant::Tvac,
            inertia: InertiaStrategy::Ldiw {
                w_min: DEFAULT_LDIW_MIN,
                w_max: DEFAULT_LDIW_MAX,
            },
            ..Self::standard(dims, max_evals, seed)
        }
    }

    pub fn with_inertia(mut self, inertia: InertiaStrategy) -> Self {
        self.inertia = inertia;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn t_max(&self) -> usize {
        self.budget.t_max(self.n)
    }

    pub fn validate(&self, space: &SearchSpace) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!("swarm needs at least 2 particles, got {}", self.n)));
        }
        if self.budget.max_evals < 2 * self.n {
            return Err(Error::InvalidConfig(format!(
                "budget of {} evaluations is below two swarm generations ({})",
                self.budget.max_evals,
                2 * self.n
            )));
        }
        if self.ldiw_min > self.ldiw_max {
            return Err(Error::InvalidConfig("ldiw_min exceeds ldiw_max".into()));
        }
        let coeffs = [
            self.c1,
            self.c2,
            self.c1_start,
            self.c1_final,
            self.c2_start,
            self.c2_final,
            self.w0,
        ];
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidConfig("non-finite PSO coefficient".into()));
        }
        if space.dims() == 0 {
            return Err(Error::InvalidConfig("empty search space".into()));
        }
        self.inertia.validate()
    }

    /// Acceleration coefficients at iteration `t`.
    pub fn coefficients(&self, t: usize, t_max: usize) -> (f64, f64) {
        match self.variant {
            Variant::Standard => (self.c1, self.c2),
            Variant::Tvac => tvac_coefficients(self, t, t_max),
        }
    }

    /// Weight used before particles have a fitness history.
    pub fn fallback_weight(&self, t: usize, t_max: usize) -> f64 {
        match self.variant {
            Variant::Standard => self.w0,
            Variant::Tvac => ldiw_weight(self.ldiw_min, self.ldiw_max, t, t_max),
        }
    }
}

/// TVAC schedules: each coefficient moves linearly from its start to its
/// final value over `t / t_max`.
pub fn tvac_coefficients(cfg: &PsoConfig, t: usize, t_max: usize) -> (f64, f64) {
    let s = progress(t, t_max);
    (lerp(cfg.c1_start, cfg.c1_final, s), lerp(cfg.c2_start, cfg.c2_final, s))
}

/// Velocity update with explicit random vectors.
#[allow(clippy::too_many_arguments)]
pub fn velocity_step(
    v: &[f64],
    x: &[f64],
    p: &[f64],
    g: &[f64],
    w: f64,
    c1: f64,
    c2: f64,
    r1: &[f64],
    r2: &[f64],
) -> Vec<f64> {
    (0..v.len())
        .map(|i| w * v[i] + c1 * r1[i] * (p[i] - x[i]) + c2 * r2[i] * (g[i] - x[i]))
        .collect()
}

/// Velocity update drawing fresh `r1` then `r2` from `rng`.
pub fn velocity_update(particle: &Particle, g: &[f64], w: f64, c1: f64, c2: f64, rng: &mut RngStream) -> Vec<f64> {
    let dims = particle.x.len();
    let mut r1 = vec![0.0; dims];
    let mut r2 = vec![0.0; dims];
    rng.fill_unit(&mut r1);
    rng.fill_unit(&mut r2);
    velocity_step(&particle.v, &particle.x, &particle.p, g, w, c1, c2, &r1, &r2)
}

pub fn position_update(x: &[f64], v: &[f64], space: &SearchSpace) -> Vec<f64> {
    let moved: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + b).collect();
    clip_position(&moved, space)
}

/// Runs the configured engine with the configured inertia strategy.
pub fn run<P: Objective + ?Sized>(problem: &P, cfg: &PsoConfig) -> Result<RunRecord> {
    let mut rule = cfg.inertia.clone();
    run_with(problem, cfg, &mut rule, &[], |_| {})
}

/// Runs the engine with an arbitrary inertia rule.
///
/// `cfg.inertia` is ignored in favour of `rule`. The first particles start at
/// `warm_start`, and `observe` sees the swarm after initialization and after
/// every iteration.
pub fn run_with<P, R, O>(
    problem: &P,
    cfg: &PsoConfig,
    rule: &mut R,
    warm_start: &[Vec<f64>],
    mut observe: O,
) -> Result<RunRecord>
where
    P: Objective + ?Sized,
    R: InertiaRule + ?Sized,
    O: FnMut(&SwarmState),
{
    let space = problem.space();
    cfg.validate(space)?;
    let n = cfg.n;
    let t_max = cfg.t_max();
    let mut motion = RngStream::keyed(cfg.seed, MOTION_STREAM);
    let mut inertia_rng = RngStream::keyed(cfg.seed, INERTIA_STREAM);

    let mut state = initialize_swarm_with(problem, n, &mut motion, warm_start)?;
    let mut trace = Vec::with_capacity(t_max + 1);
    trace.push(state.f_g);
    observe(&state);

    for t in 1..=t_max {
        let current = state.current_fitness();
        let previous = state.previous_fitness();
        let step = WeightStep {
            t,
            t_max,
            fallback: cfg.fallback_weight(t, t_max),
            current: &current,
            previous: previous.as_deref(),
        };
        let weights = rule.weights(&step, &mut inertia_rng)?;
        if weights.len() != n {
            return Err(Error::Contract(format!(
                "inertia rule returned {} weights for {n} particles",
                weights.len()
            )));
        }
        let (c1, c2) = cfg.coefficients(t, t_max);

        for (k, w) in weights.into_iter().enumerate() {
            let particle = &state.particles[k];
            let v = velocity_update(particle, &state.g, w, c1, c2, &mut motion);
            let x = position_update(&particle.x, &v, space);
            let f = checked_eval(problem, k, &x)?;
            let particle = &mut state.particles[k];
            particle.v = v;
            particle.x = x;
            particle.f_prev = Some(particle.f_curr);
            particle.f_curr = f;
        }
        state.evals += n;
        state.t = t;
        update_bests(&mut state);
        trace.push(state.f_g);
        observe(&state);
    }

    Ok(RunRecord {
        final_best: state.f_g,
        trace,
        evals_used: state.evals,
        seed: cfg.seed,
        best_position: state.g,
    })
}
