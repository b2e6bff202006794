use super::forces::forces_at;
use super::{BoxSpec, PotentialSpec, SystemState, Vec2};
use crate::error::{Error, Result};

/// One Störmer-Verlet step: half drift, full kick at the half-step
/// positions, half drift. Positions are re-wrapped after each drift.
pub fn verlet_step(
    state: &SystemState,
    dt: f64,
    box_spec: &BoxSpec,
    spec: &PotentialSpec,
) -> Result<SystemState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
    }
    let half = 0.5 * dt;
    let q_half: Vec<Vec2> = state
        .q
        .iter()
        .zip(&state.p)
        .map(|(q, p)| box_spec.wrap(q + p * half))
        .collect();
    let forces = forces_at(&q_half, box_spec, spec)?;
    let p: Vec<Vec2> = state
        .p
        .iter()
        .zip(&forces.f)
        .map(|(p, f)| p + f * dt)
        .collect();
    let q: Vec<Vec2> = q_half
        .iter()
        .zip(&p)
        .map(|(q, p)| box_spec.wrap(q + p * half))
        .collect();
    let next = SystemState { q, p };
    if !next.is_finite() {
        return Err(Error::Instability { step: 1 });
    }
    Ok(next)
}

/// Number of steps of size `dt` covering `horizon`; the ratio must be an
/// integer up to rounding.
pub fn step_count(horizon: f64, dt: f64) -> Result<usize> {
    if !(horizon > 0.0 && horizon.is_finite() && dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("horizon {horizon} and dt {dt} must be positive")));
    }
    let n = (horizon / dt).round();
    if n < 1.0 || (n * dt - horizon).abs() > 1e-9 * horizon {
        return Err(Error::InvalidParameter(format!("horizon {horizon} is not a multiple of dt {dt}")));
    }
    Ok(n as usize)
}

/// Runs `num_steps` Verlet steps and records every `record_stride`-th
/// state, starting with the initial one.
pub fn integrate(
    state: &SystemState,
    dt: f64,
    num_steps: usize,
    record_stride: usize,
    box_spec: &BoxSpec,
    spec: &PotentialSpec,
) -> Result<Vec<SystemState>> {
    if num_steps == 0 {
        return Err(Error::InvalidParameter("num_steps must be at least 1".into()));
    }
    if record_stride == 0 {
        return Err(Error::InvalidParameter("record_stride must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(num_steps / record_stride + 1);
    out.push(state.clone());
    let mut current = state.clone();
    for step in 1..=num_steps {
        current = match verlet_step(&current, dt, box_spec, spec) {
            Ok(s) => s,
            Err(Error::Instability { .. }) => return Err(Error::Instability { step }),
            Err(e) => return Err(e),
        };
        if step % record_stride == 0 {
            out.push(current.clone());
        }
    }
    Ok(out)
}
