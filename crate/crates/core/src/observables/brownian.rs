use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::PathPL;
use crate::error::{Error, Result};

/// Planar Brownian path on the grid `0, dt, ..., T` started at the origin,
/// scaled so each component has variance `target_variance_at_t` at time `T`.
pub fn brownian_reference(
    target_variance_at_t: f64,
    horizon: f64,
    dt_grid: f64,
    seed: u64,
) -> Result<PathPL> {
    if !(target_variance_at_t > 0.0 && target_variance_at_t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "target variance {target_variance_at_t} must be positive"
        )));
    }
    if !(horizon > 0.0 && dt_grid > 0.0) {
        return Err(Error::InvalidParameter("T and dt_grid must be positive".into()));
    }
    let steps = (horizon / dt_grid).round();
    if steps < 1.0 || (steps * dt_grid - horizon).abs() > 1e-9 * horizon {
        return Err(Error::InvalidParameter(format!(
            "T = {horizon} is not a multiple of dt_grid = {dt_grid}"
        )));
    }
    let steps = steps as usize;
    let sd = (target_variance_at_t / steps as f64).sqrt();
    let normal = Normal::new(0.0, sd).expect("sd is finite and positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(2 * (steps + 1));
    let (mut x, mut y) = (0.0, 0.0);
    data.extend([x, y]);
    for _ in 0..steps {
        x += normal.sample(&mut rng);
        y += normal.sample(&mut rng);
        data.extend([x, y]);
    }
    PathPL::from_flat(horizon / steps as f64, 2, data)
}
