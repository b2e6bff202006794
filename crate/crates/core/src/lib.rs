//! Molecular-dynamics laboratory for the smoothed Lennard-Jones fluid plus
//! tools for comparing trajectory ensembles in distribution: exact empirical
//! Prokhorov distance, bounded-Lipschitz distance, Kolmogorov-Smirnov
//! distance, and a constructive weak-shadowing coupling.

pub mod error;
pub mod experiment;
pub mod md;
pub mod metrics;
pub mod observables;
pub mod rng;
pub mod sampler;
pub mod shadow;

pub use error::{Error, Result};
