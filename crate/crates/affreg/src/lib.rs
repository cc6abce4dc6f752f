//! 2-D point-set registration by direct search over affine transform
//! parameters.
//!
//! A real-coded genetic algorithm evolves six-gene chromosomes (the affine
//! parameters) to align a deformed point-set with a static one. The
//! objective greedily matches the warped and static sets in both directions
//! under a per-generation randomized visit order and sums the matched
//! Euclidean distances, half-weighting matches found from both sides. The
//! randomized order makes the objective noisy; elitist replacement and
//! population-based search absorb the noise.
//!
//! Modules:
//!
//! * [`geometry`] -- points, point-sets, and the affine transform;
//! * [`matching`] -- the bidirectional greedy correspondence objective;
//! * [`ga`] -- SBX crossover, Gaussian mutation, tournament selection, and
//!   the elitist generation loop;
//! * [`harness`] -- file formats, synthetic distortions, and experiment
//!   batteries.
//!
//! With the default `parallel` feature, fitness evaluation and battery runs
//! fan out over rayon; outputs are bit-identical to the sequential build.

pub mod error;
pub mod ga;
pub mod geometry;
pub mod harness;
pub mod matching;

pub use error::{Error, Result};
pub use geometry::{rmse_by_index, AffineParams, Point2, PointSet};
