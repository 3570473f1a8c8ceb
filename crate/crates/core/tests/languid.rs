use anakatabatic::benchmarks::desk_suite;
use anakatabatic::inertia::{InertiaRule, InertiaStrategy, WeightStep, DEFAULT_W0, LANGUID_BONUS};
use anakatabatic::pso::{run_with, PsoConfig};
use anakatabatic::rng::{derive_seed, RngStream};
use anakatabatic::Result;

/// Languid particle dynamics written as the plain rule: a particle keeps
/// inertia `w0 + 0.05` only if its fitness strictly improved during the last
/// iteration. Records every weight vector it hands out.
struct DirectSwitch {
    w0: f64,
    log: Vec<Vec<f64>>,
}

impl InertiaRule for DirectSwitch {
    fn weights(&mut self, step: &WeightStep<'_>, _rng: &mut RngStream) -> Result<Vec<f64>> {
        let w = match (step.t, step.previous) {
            (t, Some(prev)) if t >= 2 => step
                .current
                .iter()
                .zip(prev)
                .map(|(now, before)| if now < before { self.w0 + LANGUID_BONUS } else { 0.0 })
                .collect(),
            _ => vec![step.fallback; step.current.len()],
        };
        self.log.push(w.clone());
        Ok(w)
    }
}

struct Recorded {
    inner: InertiaStrategy,
    log: Vec<Vec<f64>>,
}

impl InertiaRule for Recorded {
    fn weights(&mut self, step: &WeightStep<'_>, rng: &mut RngStream) -> Result<Vec<f64>> {
        let w = self.inner.weights(step, rng)?;
        self.log.push(w.clone());
        Ok(w)
    }
}

#[test]
fn languid_strategy_matches_direct_switch() {
    let suite = desk_suite(2, 1).unwrap();
    for (p, entry) in suite.entries.iter().enumerate() {
        for r in 0..50u64 {
            let seed = derive_seed(99, &[p as u64, r]);
            let cfg = PsoConfig::standard(2, 2000, seed);
            let mut direct = DirectSwitch { w0: DEFAULT_W0, log: Vec::new() };
            let mut languid = Recorded {
                inner: InertiaStrategy::Languid { w0: DEFAULT_W0 },
                log: Vec::new(),
            };
            let a = run_with(&entry.problem, &cfg, &mut direct, &[], |_| {}).unwrap();
            let b = run_with(&entry.problem, &cfg, &mut languid, &[], |_| {}).unwrap();
            assert_eq!(direct.log, languid.log, "{} run {r}", entry.id);
            assert_eq!(a, b, "{} run {r}", entry.id);
        }
    }
}
