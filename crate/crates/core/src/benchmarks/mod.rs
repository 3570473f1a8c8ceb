//! Seeded, CEC-style benchmark problems with known optima.

mod functions;
mod problems;
mod rotation;
mod suite;

pub use functions::{BaseFunction, Modality};
pub use problems::{
    hybrid_blocks, make_composition, make_hybrid, transform, CompositionProblem, HybridPart, Landscape,
    TransformedProblem,
};
pub use rotation::{random_rotation, Rotation};
pub use suite::{
    desk_suite, shifted_rotated_sphere, Category, Suite, SuiteEntry, SuiteProblem, DOMAIN, SHIFT_RANGE,
    SUPPORTED_DIMS,
};
