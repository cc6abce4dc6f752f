//! Experiment front end: point-set file I/O, synthetic distortion
//! generation, and seeded single/battery registration drivers.

pub mod distort;
pub mod experiment;
pub mod io;

pub use distort::{generate_distortion, DistortionKind, DistortionSpec};
pub use experiment::{
    register, run_battery, BatterySummary, ExperimentSpec, RegisterConfig, RegisterOutcome,
    SummaryRow,
};
pub use io::{load_pointset, load_transform, save_pointset, save_pointset_with_header, save_transform};
