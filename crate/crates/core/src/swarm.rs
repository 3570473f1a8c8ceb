//! Problem definition, swarm state and the evaluation budget shared by the
//! engines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Box-constrained search domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidConfig("search space needs at least one dimension".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::InvalidConfig(format!(
                "bound lengths differ: {} lower vs {} upper",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] < upper[i])) {
            return Err(Error::InvalidConfig(format!(
                "dimension {i}: lower bound {} is not below upper bound {}",
                lower[i], upper[i]
            )));
        }
        Ok(Self { lower, upper })
    }

    /// `[low, high]^dims`.
    pub fn cube(dims: usize, low: f64, high: f64) -> Result<Self> {
        Self::new(vec![low; dims], vec![high; dims])
    }

    pub fn dims(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dims()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    /// True when every component lies strictly inside the bounds.
    pub fn contains_interior(&self, x: &[f64]) -> bool {
        x.len() == self.dims()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo < v && v < hi)
    }
}

/// A minimization problem over a [`SearchSpace`].
///
/// Implementations must be deterministic and safe to evaluate concurrently
/// from independent runs.
pub trait Objective: Sync {
    fn space(&self) -> &SearchSpace;

    fn evaluate(&self, x: &[f64]) -> f64;

    /// Known global minimum, when there is one.
    fn f_star(&self) -> Option<f64> {
        None
    }

    /// Fallible evaluation used by the engines. Objectives that wrap other
    /// runs override this to surface their inner failures.
    fn try_evaluate(&self, x: &[f64]) -> Result<f64> {
        Ok(self.evaluate(x))
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn space(&self) -> &SearchSpace {
        (**self).space()
    }
    fn evaluate(&self, x: &[f64]) -> f64 {
        (**self).evaluate(x)
    }
    fn f_star(&self) -> Option<f64> {
        (**self).f_star()
    }
    fn try_evaluate(&self, x: &[f64]) -> Result<f64> {
        (**self).try_evaluate(x)
    }
}

/// Closure-backed objective.
pub struct FnObjective<F> {
    space: SearchSpace,
    f: F,
    f_star: Option<f64>,
}

impl<F> FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pub fn new(space: SearchSpace, f: F) -> Self {
        Self { space, f, f_star: None }
    }

    pub fn with_f_star(mut self, f_star: f64) -> Self {
        self.f_star = Some(f_star);
        self
    }
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn space(&self) -> &SearchSpace {
        &self.space
    }
    fn evaluate(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
    fn f_star(&self) -> Option<f64> {
        self.f_star
    }
}

/// Evaluation budget of one run.
///
/// Initialization costs `n` evaluations and every iteration another `n`, so
/// the iteration horizon is `floor(max_evals / n) - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunBudget {
    pub max_evals: usize,
}

impl RunBudget {
    pub fn new(max_evals: usize) -> Self {
        Self { max_evals }
    }

    pub fn t_max(&self, n: usize) -> usize {
        (self.max_evals / n).saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub f_curr: f64,
    /// Fitness one iteration back; `None` until the second evaluation.
    pub f_prev: Option<f64>,
    pub p: Vec<f64>,
    pub f_p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub particles: Vec<Particle>,
    pub g: Vec<f64>,
    pub f_g: f64,
    pub t: usize,
    pub evals: usize,
}

impl SwarmState {
    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn current_fitness(&self) -> Vec<f64> {
        self.particles.iter().map(|p| p.f_curr).collect()
    }

    /// Previous fitness per particle, once every particle has one.
    pub fn previous_fitness(&self) -> Option<Vec<f64>> {
        self.particles.iter().map(|p| p.f_prev).collect()
    }
}

pub fn clip_position(x: &[f64], space: &SearchSpace) -> Vec<f64> {
    x.iter()
        .zip(space.lower().iter().zip(space.upper()))
        .map(|(&v, (&lo, &hi))| v.clamp(lo, hi))
        .collect()
}

pub(crate) fn checked_eval<P: Objective + ?Sized>(
    problem: &P,
    particle: usize,
    x: &[f64],
) -> Result<f64> {
    let value = problem.try_evaluate(x)?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteFitness {
            particle,
            position: x.to_vec(),
            value,
        })
    }
}

/// Random initial swarm: positions uniform over the bounds, velocities
/// uniform in `±(upper - lower)`. Every particle is evaluated once.
pub fn initialize_swarm<P: Objective + ?Sized>(
    problem: &P,
    n: usize,
    rng: &mut RngStream,
) -> Result<SwarmState> {
    initialize_swarm_with(problem, n, rng, &[])
}

/// Like [`initialize_swarm`], but the first `warm_start.len()` particles are
/// placed at the given positions (clipped to the bounds). Random draws are
/// still consumed for those particles so the rest of the swarm does not
/// depend on how many warm starts were supplied.
pub fn initialize_swarm_with<P: Objective + ?Sized>(
    problem: &P,
    n: usize,
    rng: &mut RngStream,
    warm_start: &[Vec<f64>],
) -> Result<SwarmState> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!("swarm needs at least 2 particles, got {n}")));
    }
    if warm_start.len() > n {
        return Err(Error::InvalidConfig(format!(
            "{} warm-start positions for a swarm of {n}",
            warm_start.len()
        )));
    }
    let space = problem.space();
    let dims = space.dims();
    if let Some(w) = warm_start.iter().find(|w| w.len() != dims) {
        return Err(Error::InvalidConfig(format!(
            "warm-start position has {} components, problem has {dims}",
            w.len()
        )));
    }

    let mut particles = Vec::with_capacity(n);
    for k in 0..n {
        let mut x = Vec::with_capacity(dims);
        let mut v = Vec::with_capacity(dims);
        for i in 0..dims {
            let (lo, hi) = (space.lower()[i], space.upper()[i]);
            x.push(rng.uniform(lo, hi));
            let span = hi - lo;
            v.push(rng.uniform(-span, span));
        }
        if let Some(w) = warm_start.get(k) {
            x = clip_position(w, space);
        }
        let f = checked_eval(problem, k, &x)?;
        particles.push(Particle {
            p: x.clone(),
            x,
            v,
            f_curr: f,
            f_prev: None,
            f_p: f,
        });
    }

    let (best, f_g) = argmin_personal(&particles);
    Ok(SwarmState {
        g: particles[best].p.clone(),
        f_g,
        particles,
        t: 0,
        evals: n,
    })
}

/// Index and value of the lowest personal best; ties go to the lowest index.
fn argmin_personal(particles: &[Particle]) -> (usize, f64) {
    let mut best = 0;
    for (k, p) in particles.iter().enumerate().skip(1) {
        if p.f_p < particles[best].f_p {
            best = k;
        }
    }
    (best, particles[best].f_p)
}

/// Refreshes personal bests from the current positions, then the global best
/// (gbest topology).
pub fn update_bests(state: &mut SwarmState) {
    for p in &mut state.particles {
        if p.f_curr < p.f_p {
            p.p.clone_from(&p.x);
            p.f_p = p.f_curr;
        }
    }
    let (best, f_best) = argmin_personal(&state.particles);
    if f_best < state.f_g {
        state.g.clone_from(&state.particles[best].p);
        state.f_g = f_best;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere_problem(dims: usize, lo: f64, hi: f64) -> FnObjective<impl Fn(&[f64]) -> f64 + Sync> {
        FnObjective::new(SearchSpace::cube(dims, lo, hi).unwrap(), |x: &[f64]| {
            x.iter().map(|v| v * v).sum()
        })
    }

    #[test]
    fn search_space_rejects_inverted_bounds() {
        assert!(SearchSpace::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(SearchSpace::new(vec![], vec![]).is_err());
        assert!(SearchSpace::new(vec![0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn budget_horizon() {
        assert_eq!(RunBudget::new(600).t_max(6), 99);
        assert_eq!(RunBudget::new(12).t_max(6), 1);
        assert_eq!(RunBudget::new(13).t_max(6), 1);
    }

    #[test]
    fn clip_examples() {
        let sq = SearchSpace::cube(2, -1.0, 1.0).unwrap();
        assert_eq!(clip_position(&[2.0, 0.5], &sq), vec![1.0, 0.5]);
        assert_eq!(clip_position(&[0.3, -0.2], &sq), vec![0.3, -0.2]);
        let unit = SearchSpace::cube(2, 0.0, 1.0).unwrap();
        assert_eq!(clip_position(&[-5.0, -5.0], &unit), vec![0.0, 0.0]);
    }

    #[test]
    fn initialization_contract() {
        let problem = sphere_problem(2, -1.0, 1.0);
        let mut rng = RngStream::new(11);
        let s = initialize_swarm(&problem, 6, &mut rng).unwrap();
        assert_eq!(s.len(), 6);
        assert_eq!(s.evals, 6);
        assert_eq!(s.t, 0);
        let min = s.particles.iter().map(|p| p.f_curr).fold(f64::INFINITY, f64::min);
        assert_eq!(s.f_g, min);
        assert!(s.f_g >= 0.0);
        for p in &s.particles {
            assert!(p.f_prev.is_none());
            assert_eq!(p.p, p.x);
            assert_eq!(p.f_p, p.f_curr);
            assert!(problem.space().contains(&p.x));
            assert!(p.v.iter().all(|v| v.abs() <= 2.0));
        }
    }

    #[test]
    fn initialization_is_deterministic() {
        let problem = sphere_problem(3, -5.0, 5.0);
        let a = initialize_swarm(&problem, 9, &mut RngStream::new(5)).unwrap();
        let b = initialize_swarm(&problem, 9, &mut RngStream::new(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn initialization_requires_two_particles() {
        let problem = sphere_problem(2, -1.0, 1.0);
        assert!(matches!(
            initialize_swarm(&problem, 1, &mut RngStream::new(0)),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn non_finite_fitness_aborts_with_diagnostic() {
        let space = SearchSpace::cube(2, -1.0, 1.0).unwrap();
        let problem = FnObjective::new(space, |x: &[f64]| if x[0] > 0.0 { f64::NAN } else { 0.0 });
        let err = initialize_swarm(&problem, 20, &mut RngStream::new(1)).unwrap_err();
        match err {
            Error::NonFiniteFitness { position, value, .. } => {
                assert!(position[0] > 0.0);
                assert!(value.is_nan());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn warm_start_places_first_particles() {
        let problem = sphere_problem(2, -1.0, 1.0);
        let warm = vec![vec![0.25, -0.5], vec![3.0, 0.0]];
        let s = initialize_swarm_with(&problem, 5, &mut RngStream::new(2), &warm).unwrap();
        assert_eq!(s.particles[0].x, vec![0.25, -0.5]);
        assert_eq!(s.particles[1].x, vec![1.0, 0.0]);
        let cold = initialize_swarm(&problem, 5, &mut RngStream::new(2)).unwrap();
        assert_eq!(s.particles[2..], cold.particles[2..]);
    }

    fn toy_state(fs: &[f64]) -> SwarmState {
        let particles: Vec<Particle> = fs
            .iter()
            .enumerate()
            .map(|(k, &f)| Particle {
                x: vec![k as f64],
                v: vec![0.0],
                f_curr: f,
                f_prev: None,
                p: vec![k as f64],
                f_p: f,
            })
            .collect();
        let (best, f_g) = argmin_personal(&particles);
        SwarmState { g: particles[best].p.clone(), f_g, particles, t: 0, evals: fs.len() }
    }

    #[test]
    fn update_bests_single_improvement() {
        let mut s = toy_state(&[3.0, 2.0, 5.0]);
        s.particles[2].x = vec![10.0];
        s.particles[2].f_curr = 4.0;
        s.particles[0].x = vec![-1.0];
        s.particles[0].f_curr = 3.5;
        let before = s.clone();
        update_bests(&mut s);
        assert_eq!(s.particles[2].p, vec![10.0]);
        assert_eq!(s.particles[2].f_p, 4.0);
        assert_eq!(s.particles[0].p, before.particles[0].p);
        assert_eq!(s.particles[1], before.particles[1]);
        assert_eq!(s.f_g, 2.0);
    }

    #[test]
    fn update_bests_without_improvement_is_identity() {
        let mut s = toy_state(&[3.0, 2.0, 5.0]);
        let before = s.clone();
        update_bests(&mut s);
        assert_eq!(s, before);
    }

    #[test]
    fn global_tie_goes_to_lowest_index() {
        let mut s = toy_state(&[3.0, 2.0, 5.0]);
        s.particles[2].x = vec![20.0];
        s.particles[2].f_curr = 1.0;
        s.particles[1].x = vec![10.0];
        s.particles[1].f_curr = 1.0;
        update_bests(&mut s);
        assert_eq!(s.f_g, 1.0);
        assert_eq!(s.g, vec![10.0]);
    }
}
