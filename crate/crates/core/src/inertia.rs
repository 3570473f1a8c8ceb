//! Inertia-weight strategies.
//!
//! Besides the classic constant and linearly decreasing schedules this module
//! holds the anakatabatic machinery: each particle's fitness change is
//! compared with the best change in the swarm through the angle
//! `theta = atan2(delta_k, min_delta)`, which lands in `[pi/4, 5pi/4]`:
//!
//! * `[pi/4, pi/2]`: nobody improved, this particle included;
//! * `(pi/2, pi]`: some particle improved, this one did not;
//! * `(pi, 5pi/4]`: this particle improved.
//!
//! An [`AkbModel`] maps `theta` to a weight through two piecewise-linear
//! curves, a starting one and a final one, blended over the run.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Abscissae of the five model knots.
pub const KNOT_THETAS: [f64; 5] = [FRAC_PI_4, FRAC_PI_2, 3.0 * PI / 4.0, PI, 5.0 * PI / 4.0];

pub const THETA_MIN: f64 = KNOT_THETAS[0];
pub const THETA_MAX: f64 = KNOT_THETAS[4];

/// Angles below this (after mapping to `[0, 2pi)`) mean both fitness changes
/// were zero and carry no direction.
pub const NEAR_ZERO_THETA: f64 = 1e-300;

/// Inertia bonus the languid rule grants to improving particles.
pub const LANGUID_BONUS: f64 = 0.05;

/// Default inertia weight of Standard PSO, also the t < 2 fallback.
pub const DEFAULT_W0: f64 = 0.72;

pub const DEFAULT_LDIW_MIN: f64 = 0.4;
pub const DEFAULT_LDIW_MAX: f64 = 0.9;

/// `a + (b - a) * s`, returning `b` exactly at `s = 1`.
pub(crate) fn lerp(a: f64, b: f64, s: f64) -> f64 {
    if s >= 1.0 {
        b
    } else {
        a + (b - a) * s
    }
}

/// Fraction `t / t_max` of the run elapsed; zero for a degenerate horizon.
pub(crate) fn progress(t: usize, t_max: usize) -> f64 {
    if t_max == 0 {
        0.0
    } else {
        t as f64 / t_max as f64
    }
}

/// Particle-versus-swarm advancement state encoded by `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Advancement {
    AllFailed,
    SwarmImprovedParticleNot,
    ParticleImproved,
}

/// An angle from [`theta_of`], remembering whether it was drawn at random.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta {
    pub value: f64,
    /// Both fitness changes were zero, so `value` carries no information.
    pub randomized: bool,
}

/// Angle between a particle's fitness change and the swarm's best change.
///
/// The raw `atan2` result is mapped to `[0, 2pi)`. If it is (numerically)
/// zero, which only happens when both changes are zero, a uniform angle in
/// `[pi/4, 5pi/4]` is drawn from `rng`. Otherwise the angle is clamped into
/// `[pi/4, 5pi/4]` and kept on the side of the `pi/2` and `pi` boundaries
/// that the signs of `min_delta` and `delta_k` dictate, so rounding in
/// `atan2` can never misreport an improvement.
pub fn compute_theta(delta_k: f64, min_delta: f64, rng: &mut RngStream) -> f64 {
    theta_of(delta_k, min_delta, rng).value
}

/// [`compute_theta`] with the randomization flag.
pub fn theta_of(delta_k: f64, min_delta: f64, rng: &mut RngStream) -> Theta {
    debug_assert!(min_delta <= delta_k, "min_delta {min_delta} > delta_k {delta_k}");
    // `+ 0.0` folds negative zero into positive zero.
    let d = delta_k + 0.0;
    let m = min_delta + 0.0;

    let mut theta = d.atan2(m);
    if theta < 0.0 {
        theta += TAU;
    }
    if theta.abs() < NEAR_ZERO_THETA {
        return Theta {
            value: rng.uniform(THETA_MIN, THETA_MAX),
            randomized: true,
        };
    }

    theta = theta.clamp(THETA_MIN, THETA_MAX);
    theta = if d < 0.0 { theta.max(PI.next_up()) } else { theta.min(PI) };
    let value = if m < 0.0 {
        theta.max(FRAC_PI_2.next_up())
    } else {
        theta.min(FRAC_PI_2)
    };
    Theta { value, randomized: false }
}

/// Boundary angles go to the lower state: `pi/2` is [`Advancement::AllFailed`]
/// and `pi` is [`Advancement::SwarmImprovedParticleNot`].
///
/// # Panics
///
/// If `theta` lies outside `[pi/4, 5pi/4]`.
pub fn classify_advancement(theta: f64) -> Advancement {
    assert!(
        (THETA_MIN..=THETA_MAX).contains(&theta),
        "contract violation: theta {theta} outside [pi/4, 5pi/4]"
    );
    if theta <= FRAC_PI_2 {
        Advancement::AllFailed
    } else if theta <= PI {
        Advancement::SwarmImprovedParticleNot
    } else {
        Advancement::ParticleImproved
    }
}

/// Piecewise-linear interpolation through five knots placed at
/// [`KNOT_THETAS`]. Knot abscissae return the knot value exactly; angles
/// outside the domain take the nearest end knot.
pub fn interpolate_knots(knots: &[f64; 5], theta: f64) -> f64 {
    if theta <= KNOT_THETAS[0] {
        return knots[0];
    }
    for s in 0..4 {
        if theta < KNOT_THETAS[s + 1] {
            let frac = (theta - KNOT_THETAS[s]) / (KNOT_THETAS[s + 1] - KNOT_THETAS[s]);
            return knots[s] + (knots[s + 1] - knots[s]) * frac;
        }
    }
    knots[4]
}

/// Anakatabatic model: start and final inertia curves over `theta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AkbModel {
    pub name: String,
    pub knots_start: [f64; 5],
    pub knots_final: [f64; 5],
}

impl AkbModel {
    pub fn new(name: impl Into<String>, knots_start: [f64; 5], knots_final: [f64; 5]) -> Self {
        Self {
            name: name.into(),
            knots_start,
            knots_final,
        }
    }

    pub fn w_start(&self, theta: f64) -> f64 {
        interpolate_knots(&self.knots_start, theta)
    }

    pub fn w_final(&self, theta: f64) -> f64 {
        interpolate_knots(&self.knots_final, theta)
    }

    /// Lower-case, dash-separated form of the name, for file names and
    /// lookups.
    pub fn slug(&self) -> String {
        slugify(&self.name)
    }

    pub fn is_finite(&self) -> bool {
        self.knots_start.iter().chain(&self.knots_final).all(|v| v.is_finite())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("bad model JSON: {e}")))?;
        if !model.is_finite() {
            return Err(Error::InvalidConfig(format!("model `{}` has non-finite knots", model.name)));
        }
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }
}

pub(crate) fn slugify(name: &str) -> String {
    name.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|s| !s.is_empty())
        .map(|s| s.to_ascii_lowercase())
        .collect::<Vec<_>>()
        .join("-")
}

/// Time-blended weight `W_s + (W_f - W_s) * t / t_max`.
pub fn akb_weight(model: &AkbModel, theta: f64, t: usize, t_max: usize) -> f64 {
    let ws = model.w_start(theta);
    if t_max == 0 {
        return ws;
    }
    lerp(ws, model.w_final(theta), progress(t, t_max))
}

/// Languid step rule: `w0 + 0.05` for improving particles (`theta > pi`),
/// zero otherwise.
pub fn languid_weight(w0: f64, theta: f64) -> f64 {
    if theta > PI {
        w0 + LANGUID_BONUS
    } else {
        0.0
    }
}

/// Linearly decreasing inertia: `w_max` at `t = 0`, `w_min` at `t = t_max`.
pub fn ldiw_weight(w_min: f64, w_max: f64, t: usize, t_max: usize) -> f64 {
    lerp(w_max, w_min, progress(t, t_max))
}

/// The four published models.
pub fn builtin_models() -> Vec<AkbModel> {
    vec![
        AkbModel::new(
            "Flying Stork",
            [-0.86, 0.24, -1.10, 0.75, 0.72],
            [-0.81, -0.35, -0.26, 0.64, 0.60],
        ),
        AkbModel::new(
            "Messy Tie",
            [-0.62, 0.18, 0.65, 0.32, 0.77],
            [0.36, 0.73, -0.62, 0.40, 1.09],
        ),
        AkbModel::new(
            "Rightward Peaks",
            [-1.79, -0.33, 2.00, -0.67, 1.30],
            [-0.91, -0.88, -0.84, 0.67, -0.36],
        ),
        AkbModel::new(
            "Origami Snake",
            [-1.36, 2.00, 1.00, -0.60, 1.22],
            [0.30, 1.03, -0.21, 0.40, 0.06],
        ),
    ]
}

/// Looks up a built-in model by name or slug, ignoring case.
pub fn builtin_model(name: &str) -> Result<AkbModel> {
    let wanted = slugify(name);
    builtin_models()
        .into_iter()
        .find(|m| m.slug() == wanted)
        .ok_or_else(|| Error::UnknownModel(name.to_string()))
}

/// Fitness change of every particle over the last iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessDeltas {
    pub delta: Vec<f64>,
    pub min_delta: f64,
}

impl FitnessDeltas {
    pub fn new(delta: Vec<f64>) -> Self {
        let min_delta = delta.iter().copied().fold(f64::INFINITY, f64::min);
        Self { delta, min_delta }
    }

    /// `current[k] - previous[k]` for every particle.
    pub fn between(current: &[f64], previous: &[f64]) -> Self {
        Self::new(current.iter().zip(previous).map(|(c, p)| c - p).collect())
    }

    pub fn len(&self) -> usize {
        self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InertiaStrategy {
    Constant { w: f64 },
    Ldiw { w_min: f64, w_max: f64 },
    Languid { w0: f64 },
    Anakatabatic { model: AkbModel },
}

impl InertiaStrategy {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Ldiw { w_min, w_max } if w_min > w_max => Err(Error::InvalidConfig(format!(
                "LDIW needs w_min <= w_max, got {w_min} > {w_max}"
            ))),
            Self::Anakatabatic { model } if !model.is_finite() => Err(Error::InvalidConfig(
                format!("model `{}` has non-finite knots", model.name),
            )),
            _ => Ok(()),
        }
    }

    /// Whether the strategy looks at fitness changes.
    pub fn is_adaptive(&self) -> bool {
        matches!(self, Self::Languid { .. } | Self::Anakatabatic { .. })
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self {
            Self::Constant { w } => format!("constant({w})"),
            Self::Ldiw { w_min, w_max } => format!("ldiw({w_max}->{w_min})"),
            Self::Languid { .. } => "languid".to_string(),
            Self::Anakatabatic { model } => model.slug(),
        }
    }
}

/// Inertia weight of every particle at iteration `t`.
///
/// Constant and LDIW strategies give every particle the same weight. The
/// adaptive strategies need `deltas` from `t >= 2` on; before that every
/// particle gets `fallback`.
pub fn per_particle_weights(
    strategy: &InertiaStrategy,
    n: usize,
    deltas: Option<&FitnessDeltas>,
    t: usize,
    t_max: usize,
    fallback: f64,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    match strategy {
        InertiaStrategy::Constant { w } => Ok(vec![*w; n]),
        InertiaStrategy::Ldiw { w_min, w_max } => Ok(vec![ldiw_weight(*w_min, *w_max, t, t_max); n]),
        _ if t < 2 => Ok(vec![fallback; n]),
        adaptive => {
            let deltas = deltas.ok_or_else(|| {
                Error::Contract(format!("fitness deltas required at iteration {t}"))
            })?;
            if deltas.len() != n {
                return Err(Error::Contract(format!(
                    "{} fitness deltas for {n} particles",
                    deltas.len()
                )));
            }
            let weights = deltas
                .delta
                .iter()
                .map(|&d| {
                    let theta = theta_of(d, deltas.min_delta, rng);
                    match adaptive {
                        // A zero change is not an improvement, whatever angle was drawn.
                        InertiaStrategy::Languid { .. } if theta.randomized => 0.0,
                        InertiaStrategy::Languid { w0 } => languid_weight(*w0, theta.value),
                        InertiaStrategy::Anakatabatic { model } => akb_weight(model, theta.value, t, t_max),
                        _ => unreachable!(),
                    }
                })
                .collect();
            Ok(weights)
        }
    }
}

/// What an engine knows when it asks for inertia weights.
#[derive(Debug, Clone, Copy)]
pub struct WeightStep<'a> {
    pub t: usize,
    pub t_max: usize,
    /// Weight for iterations where fitness history is too short.
    pub fallback: f64,
    /// Fitness of every particle at its current position.
    pub current: &'a [f64],
    /// Fitness one iteration earlier; `None` before the second evaluation.
    pub previous: Option<&'a [f64]>,
}

/// Source of per-particle inertia weights for the engines.
///
/// `rng` is a stream reserved for inertia decisions, separate from the one
/// driving particle motion.
pub trait InertiaRule {
    fn weights(&mut self, step: &WeightStep<'_>, rng: &mut RngStream) -> Result<Vec<f64>>;
}

impl InertiaRule for InertiaStrategy {
    fn weights(&mut self, step: &WeightStep<'_>, rng: &mut RngStream) -> Result<Vec<f64>> {
        let deltas = match step.previous {
            Some(prev) if step.t >= 2 && self.is_adaptive() => {
                Some(FitnessDeltas::between(step.current, prev))
            }
            _ => None,
        };
        per_particle_weights(
            self,
            step.current.len(),
            deltas.as_ref(),
            step.t,
            step.t_max,
            step.fallback,
            rng,
        )
    }
}
