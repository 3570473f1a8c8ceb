//! Shifted and rotated problems, hybrids and compositions.

use serde::{Deserialize, Serialize};

use super::functions::BaseFunction;
use super::rotation::Rotation;
use crate::error::{Error, Result};
use crate::swarm::{Objective, SearchSpace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridPart {
    pub base: BaseFunction,
    pub fraction: f64,
}

/// What is evaluated after shifting and rotating the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Landscape {
    Base { base: BaseFunction },
    /// Contiguous blocks of the transformed vector, one per part.
    Hybrid { parts: Vec<HybridPart>, blocks: Vec<usize> },
}

impl Landscape {
    pub fn evaluate(&self, y: &[f64]) -> f64 {
        match self {
            Landscape::Base { base } => base.evaluate(y),
            Landscape::Hybrid { parts, blocks } => {
                let mut start = 0;
                let mut total = 0.0;
                for (part, &len) in parts.iter().zip(blocks) {
                    total += part.base.evaluate(&y[start..start + len]);
                    start += len;
                }
                total
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Landscape::Base { base } => base.name().to_string(),
            Landscape::Hybrid { parts, .. } => parts
                .iter()
                .map(|p| format!("{}:{}", p.base.name(), p.fraction))
                .collect::<Vec<_>>()
                .join("+"),
        }
    }
}

/// Block sizes for a hybrid: `ceil(fraction * D)` for every part but the
/// last, which takes the remaining dimensions.
pub fn hybrid_blocks(parts: &[HybridPart], dims: usize) -> Result<Vec<usize>> {
    if parts.is_empty() {
        return Err(Error::InvalidConfig("hybrid needs at least one part".into()));
    }
    let total: f64 = parts.iter().map(|p| p.fraction).sum();
    if parts.iter().any(|p| !(p.fraction > 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!(
            "hybrid fractions must be positive and sum to 1, got {total}"
        )));
    }
    let mut blocks = Vec::with_capacity(parts.len());
    let mut used = 0usize;
    for part in &parts[..parts.len() - 1] {
        let len = (part.fraction * dims as f64 - 1e-9).ceil() as usize;
        blocks.push(len);
        used += len;
    }
    if used >= dims {
        return Err(Error::InvalidConfig(format!(
            "{} hybrid parts do not fit in {dims} dimensions",
            parts.len()
        )));
    }
    blocks.push(dims - used);
    if blocks.contains(&0) {
        return Err(Error::InvalidConfig(format!(
            "a hybrid part got no dimensions out of {dims}"
        )));
    }
    Ok(blocks)
}

/// `f(x) = landscape(M (x - o)) + bias`, minimal at `x = o`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformedProblem {
    pub name: String,
    pub landscape: Landscape,
    pub shift: Vec<f64>,
    pub rotation: Rotation,
    pub bias: f64,
    pub space: SearchSpace,
}

impl TransformedProblem {
    pub fn dims(&self) -> usize {
        self.shift.len()
    }

    fn check(self) -> Result<Self> {
        let d = self.space.dims();
        if self.shift.len() != d || self.rotation.dims() != d {
            return Err(Error::InvalidConfig(format!(
                "`{}`: shift ({}) and rotation ({}) must match the {d}-dimensional domain",
                self.name,
                self.shift.len(),
                self.rotation.dims()
            )));
        }
        if !self.space.contains_interior(&self.shift) {
            return Err(Error::InvalidConfig(format!(
                "`{}`: shifted optimum lies outside the open search domain",
                self.name
            )));
        }
        if let Landscape::Hybrid { blocks, .. } = &self.landscape {
            if blocks.iter().sum::<usize>() != d {
                return Err(Error::InvalidConfig(format!("`{}`: hybrid blocks do not cover D", self.name)));
            }
        }
        Ok(self)
    }
}

impl Objective for TransformedProblem {
    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        let diff: Vec<f64> = x.iter().zip(&self.shift).map(|(a, o)| a - o).collect();
        self.landscape.evaluate(&self.rotation.apply(&diff)) + self.bias
    }

    fn f_star(&self) -> Option<f64> {
        Some(self.bias)
    }
}

pub fn transform(
    name: impl Into<String>,
    base: BaseFunction,
    shift: Vec<f64>,
    rotation: Rotation,
    bias: f64,
    space: SearchSpace,
) -> Result<TransformedProblem> {
    TransformedProblem {
        name: name.into(),
        landscape: Landscape::Base { base },
        shift,
        rotation,
        bias,
        space,
    }
    .check()
}

pub fn make_hybrid(
    name: impl Into<String>,
    parts: Vec<HybridPart>,
    shift: Vec<f64>,
    rotation: Rotation,
    bias: f64,
    space: SearchSpace,
) -> Result<TransformedProblem> {
    let blocks = hybrid_blocks(&parts, space.dims())?;
    TransformedProblem {
        name: name.into(),
        landscape: Landscape::Hybrid { parts, blocks },
        shift,
        rotation,
        bias,
        space,
    }
    .check()
}

/// Gaussian-distance blend of shifted/rotated components.
///
/// Raw weights are `exp(-|x - o_i|^2 / (2 D sigma_i^2))`. Every weight below
/// the largest is damped by `1 - w_max^10`, so at a component's own optimum
/// all other components vanish, then the weights are normalized. Since each
/// component is bounded below by its bias, the blend is bounded below by the
/// smallest bias, which is attained at that component's shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionProblem {
    pub name: String,
    pub components: Vec<TransformedProblem>,
    pub sigmas: Vec<f64>,
    pub f_star: f64,
    pub space: SearchSpace,
}

impl CompositionProblem {
    /// Normalized blend weights at `x`.
    pub fn weights(&self, x: &[f64]) -> Vec<f64> {
        let dims = x.len() as f64;
        let dist2: Vec<f64> = self
            .components
            .iter()
            .map(|c| x.iter().zip(&c.shift).map(|(a, o)| (a - o).powi(2)).sum())
            .collect();
        let mut w: Vec<f64> = dist2
            .iter()
            .zip(&self.sigmas)
            .map(|(d2, s)| (-d2 / (2.0 * dims * s * s)).exp())
            .collect();
        let w_max = w.iter().copied().fold(0.0, f64::max);
        let damp = 1.0 - w_max.powi(10);
        for wi in w.iter_mut() {
            if *wi < w_max {
                *wi *= damp;
            }
        }
        let sum: f64 = w.iter().sum();
        if sum > 0.0 {
            w.iter_mut().for_each(|wi| *wi /= sum);
        } else {
            // All weights underflowed: fall back to the nearest component.
            let nearest = dist2
                .iter()
                .enumerate()
                .fold(0, |best, (i, d)| if *d < dist2[best] { i } else { best });
            w.iter_mut().enumerate().for_each(|(i, wi)| *wi = if i == nearest { 1.0 } else { 0.0 });
        }
        w
    }

    /// Index of the component with the smallest bias.
    pub fn best_component(&self) -> usize {
        self.components
            .iter()
            .enumerate()
            .fold(0, |best, (i, c)| if c.bias < self.components[best].bias { i } else { best })
    }

    pub fn optimum(&self) -> &[f64] {
        &self.components[self.best_component()].shift
    }
}

impl Objective for CompositionProblem {
    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        self.weights(x)
            .iter()
            .zip(&self.components)
            .filter(|(w, _)| **w > 0.0)
            .map(|(w, c)| w * c.evaluate(x))
            .sum()
    }

    fn f_star(&self) -> Option<f64> {
        Some(self.f_star)
    }
}

pub fn make_composition(
    name: impl Into<String>,
    components: Vec<TransformedProblem>,
    sigmas: Vec<f64>,
) -> Result<CompositionProblem> {
    let name = name.into();
    let first = components
        .first()
        .ok_or_else(|| Error::InvalidConfig(format!("`{name}`: composition needs components")))?;
    let space = first.space.clone();
    if components.iter().any(|c| c.space != space) {
        return Err(Error::InvalidConfig(format!("`{name}`: components live in different domains")));
    }
    if sigmas.len() != components.len() || sigmas.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::InvalidConfig(format!(
            "`{name}`: need one positive sigma per component"
        )));
    }
    let f_star = components.iter().map(|c| c.bias).fold(f64::INFINITY, f64::min);
    let problem = CompositionProblem {
        name,
        components,
        sigmas,
        f_star,
        space,
    };
    let at_optimum = problem.evaluate(problem.optimum());
    if (at_optimum - f_star).abs() > 1e-9 * (1.0 + f_star.abs()) {
        return Err(Error::InvalidConfig(format!(
            "`{}`: value {at_optimum} at the best component's shift differs from f* = {f_star}",
            problem.name
        )));
    }
    Ok(problem)
}
