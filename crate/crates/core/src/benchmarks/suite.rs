//! Seeded desk-scale benchmark suite.
//!
//! Twelve problems over `[-100, 100]^D` in the category proportions of the
//! CEC 2014 set (3 unimodal, 5 multimodal, 2 hybrid, 2 composition). Problem
//! `k` (1-based) has `f* = 100 k`; its shift, drawn uniformly from
//! `[-80, 80]^D`, and its rotation come from stream `1000 + k` of the suite
//! seed.
//!
//! | id  | category    | recipe                                                     |
//! |-----|-------------|------------------------------------------------------------|
//! | F01 | unimodal    | elliptic                                                   |
//! | F02 | unimodal    | bent cigar                                                 |
//! | F03 | unimodal    | discus                                                     |
//! | F04 | multimodal  | rosenbrock                                                 |
//! | F05 | multimodal  | ackley                                                     |
//! | F06 | multimodal  | weierstrass                                                |
//! | F07 | multimodal  | rastrigin                                                  |
//! | F08 | multimodal  | schwefel                                                   |
//! | F09 | hybrid      | rastrigin 0.5 + elliptic 0.5                               |
//! | F10 | hybrid      | griewank 0.4 + discus 0.6                                  |
//! | F11 | composition | rosenbrock, elliptic, rastrigin; sigma 10, 20, 30          |
//! | F12 | composition | schwefel, rastrigin, bent cigar; sigma 20, 20, 20          |
//!
//! Composition components carry biases `f*`, `f* + 100`, `f* + 200`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::functions::BaseFunction;
use super::problems::{
    make_composition, make_hybrid, transform, CompositionProblem, HybridPart, TransformedProblem,
};
use super::rotation::{random_rotation, Rotation};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::swarm::{Objective, SearchSpace};

pub const DOMAIN: f64 = 100.0;
pub const SHIFT_RANGE: f64 = 80.0;
pub const SUPPORTED_DIMS: [usize; 4] = [2, 10, 20, 50];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Unimodal,
    Multimodal,
    Hybrid,
    Composition,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::Unimodal => "unimodal",
            Category::Multimodal => "multimodal",
            Category::Hybrid => "hybrid",
            Category::Composition => "composition",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum SuiteProblem {
    Transformed(TransformedProblem),
    Composition(CompositionProblem),
}

impl SuiteProblem {
    /// Location of the global minimum.
    pub fn optimum(&self) -> &[f64] {
        match self {
            SuiteProblem::Transformed(p) => &p.shift,
            SuiteProblem::Composition(c) => c.optimum(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SuiteProblem::Transformed(p) => p.landscape.describe(),
            SuiteProblem::Composition(c) => format!(
                "composition({})",
                c.components
                    .iter()
                    .map(|p| p.landscape.describe())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        }
    }
}

impl Objective for SuiteProblem {
    fn space(&self) -> &SearchSpace {
        match self {
            SuiteProblem::Transformed(p) => p.space(),
            SuiteProblem::Composition(c) => c.space(),
        }
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            SuiteProblem::Transformed(p) => p.evaluate(x),
            SuiteProblem::Composition(c) => c.evaluate(x),
        }
    }

    fn f_star(&self) -> Option<f64> {
        match self {
            SuiteProblem::Transformed(p) => p.f_star(),
            SuiteProblem::Composition(c) => c.f_star(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub id: String,
    pub category: Category,
    pub problem: SuiteProblem,
}

impl SuiteEntry {
    pub fn f_star(&self) -> f64 {
        self.problem.f_star().expect("suite problems know their optimum")
    }
}

/// An ordered benchmark suite. Serialized, it is a complete recipe: every
/// shift, rotation and bias is stored, so the suite can be rebuilt bit for
/// bit without this crate's generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    pub dims: usize,
    pub seed: u64,
    pub entries: Vec<SuiteEntry>,
}

impl Suite {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The first `count` problems.
    pub fn truncated(&self, count: usize) -> Suite {
        Suite {
            dims: self.dims,
            seed: self.seed,
            entries: self.entries.iter().take(count).cloned().collect(),
        }
    }

    pub fn category_counts(&self) -> [usize; 4] {
        let mut counts = [0; 4];
        for e in &self.entries {
            counts[e.category as usize] += 1;
        }
        counts
    }

    pub fn to_recipe_json(&self) -> String {
        serde_json::to_string(self).expect("suite serializes")
    }

    pub fn from_recipe_json(text: &str) -> Result<Suite> {
        let suite: Suite = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("bad suite recipe: {e}")))?;
        if suite.entries.iter().any(|e| e.problem.space().dims() != suite.dims) {
            return Err(Error::InvalidConfig("recipe problems disagree with its dimension".into()));
        }
        Ok(suite)
    }

    /// SHA-256 of the recipe JSON.
    pub fn recipe_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_recipe_json().as_bytes()))
    }
}

struct Builder {
    space: SearchSpace,
    dims: usize,
}

impl Builder {
    fn shift(&self, rng: &mut RngStream) -> Vec<f64> {
        (0..self.dims).map(|_| rng.uniform(-SHIFT_RANGE, SHIFT_RANGE)).collect()
    }

    fn rotation(&self, rng: &mut RngStream) -> Rotation {
        random_rotation(self.dims, rng)
    }

    fn single(&self, name: &str, base: BaseFunction, bias: f64, rng: &mut RngStream) -> Result<TransformedProblem> {
        let shift = self.shift(rng);
        let rotation = self.rotation(rng);
        transform(name, base, shift, rotation, bias, self.space.clone())
    }

    fn hybrid(&self, name: &str, parts: &[(BaseFunction, f64)], bias: f64, rng: &mut RngStream) -> Result<TransformedProblem> {
        let shift = self.shift(rng);
        let rotation = self.rotation(rng);
        let parts = parts
            .iter()
            .map(|&(base, fraction)| HybridPart { base, fraction })
            .collect();
        make_hybrid(name, parts, shift, rotation, bias, self.space.clone())
    }

    fn composition(
        &self,
        name: &str,
        bases: &[BaseFunction],
        sigmas: &[f64],
        bias: f64,
        rng: &mut RngStream,
    ) -> Result<CompositionProblem> {
        let components = bases
            .iter()
            .enumerate()
            .map(|(i, &b)| self.single(&format!("{name}.{i}"), b, bias + 100.0 * i as f64, rng))
            .collect::<Result<Vec<_>>>()?;
        make_composition(name, components, sigmas.to_vec())
    }
}

/// The documented twelve-problem suite.
pub fn desk_suite(dims: usize, seed: u64) -> Result<Suite> {
    if dims < 2 {
        return Err(Error::InvalidConfig(format!("desk suite needs D >= 2, got {dims}")));
    }
    use BaseFunction::*;
    let b = Builder {
        space: SearchSpace::cube(dims, -DOMAIN, DOMAIN)?,
        dims,
    };
    let mut entries = Vec::with_capacity(12);
    for k in 1..=12usize {
        let id = format!("F{k:02}");
        let bias = 100.0 * k as f64;
        let mut rng = RngStream::keyed(seed, 1000 + k as u64);
        let (category, problem) = match k {
            1..=3 => {
                let base = [Elliptic, BentCigar, Discus][k - 1];
                (Category::Unimodal, SuiteProblem::Transformed(b.single(&id, base, bias, &mut rng)?))
            }
            4..=8 => {
                let base = [Rosenbrock, Ackley, Weierstrass, Rastrigin, Schwefel][k - 4];
                (Category::Multimodal, SuiteProblem::Transformed(b.single(&id, base, bias, &mut rng)?))
            }
            9 => (
                Category::Hybrid,
                SuiteProblem::Transformed(b.hybrid(&id, &[(Rastrigin, 0.5), (Elliptic, 0.5)], bias, &mut rng)?),
            ),
            10 => (
                Category::Hybrid,
                SuiteProblem::Transformed(b.hybrid(&id, &[(Griewank, 0.4), (Discus, 0.6)], bias, &mut rng)?),
            ),
            11 => (
                Category::Composition,
                SuiteProblem::Composition(b.composition(
                    &id,
                    &[Rosenbrock, Elliptic, Rastrigin],
                    &[10.0, 20.0, 30.0],
                    bias,
                    &mut rng,
                )?),
            ),
            _ => (
                Category::Composition,
                SuiteProblem::Composition(b.composition(
                    &id,
                    &[Schwefel, Rastrigin, BentCigar],
                    &[20.0, 20.0, 20.0],
                    bias,
                    &mut rng,
                )?),
            ),
        };
        entries.push(SuiteEntry { id, category, problem });
    }
    Ok(Suite { dims, seed, entries })
}

/// Shifted, rotated sphere over `[-100, 100]^D`, drawn from stream 1 of
/// `seed`.
pub fn shifted_rotated_sphere(dims: usize, seed: u64, bias: f64) -> Result<TransformedProblem> {
    let b = Builder {
        space: SearchSpace::cube(dims, -DOMAIN, DOMAIN)?,
        dims,
    };
    b.single("sphere", BaseFunction::Sphere, bias, &mut RngStream::keyed(seed, 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_is_deterministic() {
        assert_eq!(desk_suite(10, 42).unwrap(), desk_suite(10, 42).unwrap());
        assert_ne!(desk_suite(10, 42).unwrap(), desk_suite(10, 43).unwrap());
    }

    #[test]
    fn category_counts_follow_recipe() {
        for d in SUPPORTED_DIMS {
            let suite = desk_suite(d, 1).unwrap();
            assert_eq!(suite.len(), 12);
            assert_eq!(suite.category_counts(), [3, 5, 2, 2]);
        }
    }

    #[test]
    fn optima_evaluate_to_f_star() {
        for d in SUPPORTED_DIMS {
            for e in &desk_suite(d, 7).unwrap().entries {
                let at = e.problem.evaluate(e.problem.optimum());
                assert_eq!(at, e.f_star(), "{} D={d}", e.id);
                assert!(e.problem.space().contains_interior(e.problem.optimum()));
            }
        }
    }

    #[test]
    fn dense_sample_never_undercuts_f_star() {
        let suite = desk_suite(10, 3).unwrap();
        let mut rng = RngStream::new(77);
        for e in &suite.entries {
            let f_star = e.f_star();
            for _ in 0..10_000 {
                let x: Vec<f64> = (0..10).map(|_| rng.uniform(-DOMAIN, DOMAIN)).collect();
                let v = e.problem.evaluate(&x);
                assert!(v.is_finite(), "{}", e.id);
                assert!(v >= f_star - 1e-9, "{} at {x:?}: {v} < {f_star}", e.id);
            }
        }
    }

    #[test]
    fn recipe_round_trip_is_bit_exact() {
        let suite = desk_suite(10, 5).unwrap();
        let json = suite.to_recipe_json();
        let back = Suite::from_recipe_json(&json).unwrap();
        assert_eq!(back, suite);
        assert_eq!(back.recipe_hash(), suite.recipe_hash());
        let mut rng = RngStream::new(1);
        for (a, b) in suite.entries.iter().zip(&back.entries) {
            let x: Vec<f64> = (0..10).map(|_| rng.uniform(-DOMAIN, DOMAIN)).collect();
            assert_eq!(a.problem.evaluate(&x).to_bits(), b.problem.evaluate(&x).to_bits());
        }
    }

    #[test]
    fn one_dimensional_suite_is_rejected() {
        assert!(desk_suite(1, 0).is_err());
    }
}
