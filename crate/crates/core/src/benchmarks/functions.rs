//! Base test functions, each with its global minimum 0 at the origin.
//!
//! The multimodal functions rescale their input the way the CEC suites do, so
//! that the common `[-100, 100]^D` box covers the interesting region of each
//! landscape: `evaluate(y) = raw(scale * y)`.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Unimodal,
    Multimodal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseFunction {
    /// `sum z_i^2`
    Sphere,
    /// `sum 10^(6 i / (D - 1)) z_i^2`
    Elliptic,
    /// `z_1^2 + 10^6 sum_{i>1} z_i^2`
    BentCigar,
    /// `10^6 z_1^2 + sum_{i>1} z_i^2`
    Discus,
    /// `sum 100 (u_i^2 - u_{i+1})^2 + (u_i - 1)^2` with `u = z + 1`
    Rosenbrock,
    /// `20 - 20 exp(-0.2 sqrt(mean z^2)) + e - exp(mean cos 2 pi z)`
    Ackley,
    /// `sum_i sum_k a^k [cos(2 pi b^k (z_i + 1/2)) - cos(pi b^k)]`, `a = 0.5`, `b = 3`, `k = 0..=20`
    Weierstrass,
    /// `sum z^2 / 4000 - prod cos(z_i / sqrt(i)) + 1`
    Griewank,
    /// `sum z_i^2 + 10 (1 - cos 2 pi z_i)`
    Rastrigin,
    /// Modified Schwefel with the optimum moved to the origin.
    Schwefel,
}

const WEIERSTRASS_A: f64 = 0.5;
const WEIERSTRASS_B: f64 = 3.0;
const WEIERSTRASS_K: i32 = 20;

/// Shift that moves the Schwefel optimum to the origin.
const SCHWEFEL_OFFSET: f64 = 420.968_746_227_503_6;

impl BaseFunction {
    pub const ALL: [BaseFunction; 10] = [
        BaseFunction::Sphere,
        BaseFunction::Elliptic,
        BaseFunction::BentCigar,
        BaseFunction::Discus,
        BaseFunction::Rosenbrock,
        BaseFunction::Ackley,
        BaseFunction::Weierstrass,
        BaseFunction::Griewank,
        BaseFunction::Rastrigin,
        BaseFunction::Schwefel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseFunction::Sphere => "sphere",
            BaseFunction::Elliptic => "elliptic",
            BaseFunction::BentCigar => "bent_cigar",
            BaseFunction::Discus => "discus",
            BaseFunction::Rosenbrock => "rosenbrock",
            BaseFunction::Ackley => "ackley",
            BaseFunction::Weierstrass => "weierstrass",
            BaseFunction::Griewank => "griewank",
            BaseFunction::Rastrigin => "rastrigin",
            BaseFunction::Schwefel => "schwefel",
        }
    }

    pub fn modality(self) -> Modality {
        match self {
            BaseFunction::Sphere | BaseFunction::Elliptic | BaseFunction::BentCigar | BaseFunction::Discus => {
                Modality::Unimodal
            }
            _ => Modality::Multimodal,
        }
    }

    /// Factor applied to the input before the closed form.
    pub fn input_scale(self) -> f64 {
        match self {
            BaseFunction::Rosenbrock => 2.048 / 100.0,
            BaseFunction::Weierstrass => 0.5 / 100.0,
            BaseFunction::Griewank => 600.0 / 100.0,
            BaseFunction::Rastrigin => 5.12 / 100.0,
            BaseFunction::Schwefel => 1000.0 / 100.0,
            _ => 1.0,
        }
    }

    pub fn evaluate(self, y: &[f64]) -> f64 {
        let scale = self.input_scale();
        if scale == 1.0 {
            self.raw(y)
        } else {
            let z: Vec<f64> = y.iter().map(|v| v * scale).collect();
            self.raw(&z)
        }
    }

    /// Closed form without input scaling.
    pub fn raw(self, z: &[f64]) -> f64 {
        match self {
            BaseFunction::Sphere => z.iter().map(|v| v * v).sum(),
            BaseFunction::Elliptic => elliptic(z),
            BaseFunction::BentCigar => match z.split_first() {
                Some((head, tail)) => head * head + 1e6 * tail.iter().map(|v| v * v).sum::<f64>(),
                None => 0.0,
            },
            BaseFunction::Discus => match z.split_first() {
                Some((head, tail)) => 1e6 * head * head + tail.iter().map(|v| v * v).sum::<f64>(),
                None => 0.0,
            },
            BaseFunction::Rosenbrock => z
                .windows(2)
                .map(|w| {
                    let (a, b) = (w[0] + 1.0, w[1] + 1.0);
                    100.0 * (a * a - b).powi(2) + (a - 1.0).powi(2)
                })
                .sum(),
            BaseFunction::Ackley => ackley(z),
            BaseFunction::Weierstrass => weierstrass(z),
            BaseFunction::Griewank => {
                let sum = z.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let prod: f64 = z
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                sum + (1.0 - prod)
            }
            BaseFunction::Rastrigin => z
                .iter()
                .map(|v| v * v + 10.0 * (1.0 - (2.0 * PI * v).cos()))
                .sum(),
            BaseFunction::Schwefel => schwefel(z),
        }
    }
}

impl std::fmt::Display for BaseFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BaseFunction {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BaseFunction::ALL
            .into_iter()
            .find(|b| b.name() == s.to_ascii_lowercase().replace('-', "_"))
            .ok_or_else(|| crate::Error::InvalidConfig(format!("unknown base function `{s}`")))
    }
}

fn elliptic(z: &[f64]) -> f64 {
    let d = z.len();
    if d == 1 {
        return z[0] * z[0];
    }
    z.iter()
        .enumerate()
        .map(|(i, v)| 1e6_f64.powf(i as f64 / (d - 1) as f64) * v * v)
        .sum()
}

fn ackley(z: &[f64]) -> f64 {
    if z.is_empty() {
        return 0.0;
    }
    let d = z.len() as f64;
    let mean_sq = z.iter().map(|v| v * v).sum::<f64>() / d;
    let mean_cos = z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
    (20.0 - 20.0 * (-0.2 * mean_sq.sqrt()).exp()) + (E - mean_cos.exp())
}

fn weierstrass(z: &[f64]) -> f64 {
    let mut total = 0.0;
    for &v in z {
        let mut ak = 1.0;
        let mut bk = 1.0;
        for _ in 0..=WEIERSTRASS_K {
            total += ak * ((2.0 * PI * bk * (v + 0.5)).cos() - (PI * bk).cos());
            ak *= WEIERSTRASS_A;
            bk *= WEIERSTRASS_B;
        }
    }
    total
}

fn schwefel_term(u: f64, dims: f64) -> f64 {
    if u > 500.0 {
        let r = 500.0 - u % 500.0;
        r * r.sqrt().sin() - (u - 500.0).powi(2) / (10_000.0 * dims)
    } else if u < -500.0 {
        let r = u.abs() % 500.0;
        (r - 500.0) * (500.0 - r).sqrt().sin() - (u + 500.0).powi(2) / (10_000.0 * dims)
    } else {
        u * u.abs().sqrt().sin()
    }
}

fn schwefel(z: &[f64]) -> f64 {
    let dims = z.len() as f64;
    let peak = schwefel_term(SCHWEFEL_OFFSET, dims);
    z.iter().map(|v| peak - schwefel_term(v + SCHWEFEL_OFFSET, dims)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn catalog_examples() {
        assert_eq!(BaseFunction::Sphere.evaluate(&[1.0, 2.0]), 5.0);
        assert_eq!(BaseFunction::Rastrigin.evaluate(&[0.0; 7]), 0.0);
        assert!(BaseFunction::Ackley.evaluate(&[0.0; 7]).abs() < 1e-12);
    }

    #[test]
    fn closed_forms() {
        assert_eq!(BaseFunction::BentCigar.raw(&[1.0, 1.0]), 1.0 + 1e6);
        assert_eq!(BaseFunction::Discus.raw(&[1.0, 1.0]), 1e6 + 1.0);
        assert_eq!(BaseFunction::Elliptic.raw(&[1.0, 1.0, 1.0]), 1.0 + 1e3 + 1e6);
        assert_eq!(BaseFunction::Rosenbrock.raw(&[-1.0, -1.0]), 100.0 * 0.0 + 1.0);
        assert!((BaseFunction::Rastrigin.raw(&[0.5]) - 20.25).abs() < 1e-12);
        assert!((BaseFunction::Griewank.raw(&[PI]) - (PI * PI / 4000.0 + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn every_base_has_zero_minimum_at_origin() {
        let mut rng = RngStream::new(4);
        for base in BaseFunction::ALL {
            for d in [1, 2, 5, 10] {
                let at_origin = base.evaluate(&vec![0.0; d]);
                assert!(at_origin.abs() < 1e-12, "{base} D={d}: {at_origin}");
                for _ in 0..2000 {
                    let y: Vec<f64> = (0..d).map(|_| rng.uniform(-150.0, 150.0)).collect();
                    let v = base.evaluate(&y);
                    assert!(v.is_finite());
                    assert!(v >= -1e-9, "{base} below zero at {y:?}: {v}");
                }
            }
        }
    }

    #[test]
    fn modality_split() {
        let unimodal = BaseFunction::ALL
            .iter()
            .filter(|b| b.modality() == Modality::Unimodal)
            .count();
        assert_eq!(unimodal, 4);
    }

    #[test]
    fn names_parse_back() {
        for base in BaseFunction::ALL {
            assert_eq!(base.name().parse::<BaseFunction>().unwrap(), base);
        }
        assert!("katsuura".parse::<BaseFunction>().is_err());
    }
}
