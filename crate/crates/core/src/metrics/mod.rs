//! Distances between empirical distributions: exact Prokhorov distance via
//! threshold matchings, the bounded-Lipschitz distance, and
//! Kolmogorov-Smirnov distances for histograms.

mod assignment;
mod bounded_lipschitz;
mod ks;
pub mod matching;
mod prokhorov;
mod sample;

pub use assignment::{solve_assignment, Assignment};
pub use bounded_lipschitz::{bl_distance, bl_distance_empirical, bl_norm, bl_objective};
pub use ks::{ks_critical_value, ks_distance, ks_distance_samples};
pub use prokhorov::{prokhorov_empirical, MetricResult};
pub use sample::{pairwise_distances, DistanceMatrix, EmpiricalSample, MetricTag};
