use anakatabatic::benchmarks::desk_suite;
use anakatabatic::inertia::{builtin_models, AkbModel, InertiaStrategy};
use anakatabatic::metrics::{alpha, epsilon_hat_from_finals, omega};
use anakatabatic::pso::{run, run_with, PsoConfig, Variant};
use anakatabatic::swarm::Objective;
use proptest::prelude::*;

fn strategy(pick: usize) -> InertiaStrategy {
    let models = builtin_models();
    match pick % (models.len() + 3) {
        0 => InertiaStrategy::Constant { w: 0.72 },
        1 => InertiaStrategy::Ldiw { w_min: 0.4, w_max: 0.9 },
        2 => InertiaStrategy::Languid { w0: 0.72 },
        k => InertiaStrategy::Anakatabatic { model: models[k - 3].clone() },
    }
}

fn config(variant: Variant, dims: usize, n: usize, evals: usize, seed: u64, pick: usize) -> PsoConfig {
    let mut cfg = match variant {
        Variant::Standard => PsoConfig::standard(dims, evals, seed),
        Variant::Tvac => PsoConfig::tvac(dims, evals, seed),
    };
    cfg.n = n;
    cfg.with_inertia(strategy(pick))
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Standard), Just(Variant::Tvac)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn runs_respect_budget_bounds_and_monotonicity(
        v in variant(),
        problem in 0usize..12,
        n in 2usize..12,
        evals in 24usize..400,
        seed in any::<u64>(),
        pick in 0usize..32,
    ) {
        let suite = desk_suite(2, 5).unwrap();
        let entry = &suite.entries[problem];
        let cfg = config(v, 2, n, evals, seed, pick);
        prop_assume!(evals >= 2 * n);
        let space = entry.problem.space().clone();
        let mut brute = f64::INFINITY;
        let mut states = 0usize;
        let mut rule = cfg.inertia.clone();
        let rec = run_with(&entry.problem, &cfg, &mut rule, &[], |s| {
            for p in &s.particles {
                assert!(space.contains(&p.x));
                assert!(p.f_p <= p.f_curr);
                brute = brute.min(p.f_curr);
            }
            assert_eq!(s.f_g, brute);
            states += 1;
        })
        .unwrap();

        prop_assert!(rec.evals_used <= evals);
        prop_assert_eq!(rec.evals_used, n * states);
        prop_assert!(rec.trace_is_non_increasing());
        prop_assert_eq!(rec.final_best, brute);
        prop_assert_eq!(entry.problem.evaluate(&rec.best_position), rec.final_best);
        prop_assert!(rec.final_best >= entry.f_star() - 1e-9);
    }

    #[test]
    fn same_seed_same_run(v in variant(), problem in 0usize..12, seed in any::<u64>(), pick in 0usize..32) {
        let suite = desk_suite(2, 9).unwrap();
        let entry = &suite.entries[problem];
        let cfg = config(v, 2, 6, 180, seed, pick);
        prop_assert_eq!(run(&entry.problem, &cfg).unwrap(), run(&entry.problem, &cfg).unwrap());
    }

    #[test]
    fn flat_model_is_constant_inertia(w in -0.5f64..1.2, seed in any::<u64>(), problem in 0usize..12) {
        let suite = desk_suite(2, 3).unwrap();
        let entry = &suite.entries[problem];
        let mut constant = config(Variant::Standard, 2, 6, 240, seed, 0).with_inertia(InertiaStrategy::Constant { w });
        constant.w0 = w;
        let flat = constant.clone().with_inertia(InertiaStrategy::Anakatabatic {
            model: AkbModel::new("flat", [w; 5], [w; 5]),
        });
        prop_assert_eq!(run(&entry.problem, &constant).unwrap(), run(&entry.problem, &flat).unwrap());
    }

    #[test]
    fn omega_agrees_with_alpha_on_averaged_errors(
        finals_x in proptest::collection::vec(0.0f64..1e6, 1..20),
        finals_xa in proptest::collection::vec(0.0f64..1e6, 1..20),
        f_star in -1e3f64..1e3,
    ) {
        let shift = |v: &[f64]| v.iter().map(|e| e + f_star).collect::<Vec<_>>();
        let ex = epsilon_hat_from_finals(&shift(&finals_x), f_star).unwrap();
        let exa = epsilon_hat_from_finals(&shift(&finals_xa), f_star).unwrap();
        prop_assert!(ex > 0.0 && exa > 0.0);
        let a = alpha(ex, exa).unwrap();
        let o = omega(ex, exa).unwrap();
        prop_assert!((-2.0..=2.0).contains(&a));
        if a != 0.0 {
            prop_assert_eq!(a > 0.0, o > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn suite_evaluations_are_finite_and_above_optimum(
        seed in any::<u64>(),
        dims in prop_oneof![Just(2usize), Just(10)],
        unit in proptest::collection::vec(-1.0f64..1.0, 10),
    ) {
        let suite = desk_suite(dims, seed).unwrap();
        for entry in &suite.entries {
            let x: Vec<f64> = unit[..dims].iter().map(|u| 100.0 * u).collect();
            let f = entry.problem.evaluate(&x);
            prop_assert!(f.is_finite(), "{} not finite", entry.id);
            prop_assert!(f >= entry.f_star() - 1e-9, "{} below optimum", entry.id);
        }
    }
}
