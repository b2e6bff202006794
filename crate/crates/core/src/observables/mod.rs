//! Single-particle displacement paths, path functionals, the Brownian
//! reference, and histograms.

mod brownian;
mod functionals;
mod histogram;
mod path;

pub use brownian::brownian_reference;
pub use functionals::{eval_functional, FunctionalId};
pub use histogram::{histogram, BinSpec, Histogram};
pub use path::{sup_distance, unwrap_displacement, PathPL};
