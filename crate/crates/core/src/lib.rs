//! Particle swarm optimization with particle-wise, fitness-adaptive
//! ("anakatabatic") inertia.
//!
//! The crate provides
//!
//! * Standard PSO and TVAC-PSO engines ([`pso`]) driven by pluggable inertia
//!   strategies ([`inertia`]): constant, linearly decreasing, languid and
//!   anakatabatic models, including the four published models;
//! * a seeded CEC-style benchmark suite ([`benchmarks`]);
//! * error and comparison metrics ([`metrics`]);
//! * a metaoptimizer that searches for new anakatabatic models ([`metaopt`]).
//!
//! ```
//! use anakatabatic::benchmarks::desk_suite;
//! use anakatabatic::inertia::{builtin_model, InertiaStrategy};
//! use anakatabatic::pso::{run, PsoConfig};
//!
//! let suite = desk_suite(2, 1).unwrap();
//! let model = builtin_model("Rightward Peaks").unwrap();
//! let cfg = PsoConfig::tvac(2, 2000, 7).with_inertia(InertiaStrategy::Anakatabatic { model });
//! let record = run(&suite.entries[0].problem, &cfg).unwrap();
//! assert!(record.evals_used <= 2000);
//! ```

pub mod benchmarks;
mod error;
pub mod inertia;
pub mod metaopt;
pub mod metrics;
pub mod pso;
pub mod rng;
pub mod swarm;

pub use error::{Error, Result};
