use super::{min_image, BoxSpec, CellList, PotentialSpec, SystemState, Vec2};
use crate::error::{Error, Result};

/// Per-particle forces `-dH/dq`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceField {
    pub f: Vec<Vec2>,
}

impl ForceField {
    pub fn total(&self) -> Vec2 {
        self.f.iter().fold(Vec2::zeros(), |acc, f| acc + f)
    }

    pub fn max_norm(&self) -> f64 {
        self.f.iter().map(|f| f.norm()).fold(0.0, f64::max)
    }
}

#[inline]
fn accumulate(
    acc: &mut Vec2,
    i: usize,
    j: usize,
    q: &[Vec2],
    box_spec: &BoxSpec,
    spec: &PotentialSpec,
    rc2: f64,
) -> Result<()> {
    let delta = min_image(q[i] - q[j], box_spec);
    let r2 = delta.norm_squared();
    if r2 == 0.0 {
        return Err(Error::ParticleOverlap { i: i.min(j), j: i.max(j) });
    }
    if r2 < rc2 {
        *acc += delta * spec.force_over_r(r2);
    }
    Ok(())
}

/// Forces from the cell list. Partners of each particle are summed in
/// ascending index order, which makes the result bit-identical to
/// [`compute_forces_naive`].
pub fn compute_forces(
    state: &SystemState,
    box_spec: &BoxSpec,
    spec: &PotentialSpec,
) -> Result<ForceField> {
    forces_at(&state.q, box_spec, spec)
}

pub(crate) fn forces_at(q: &[Vec2], box_spec: &BoxSpec, spec: &PotentialSpec) -> Result<ForceField> {
    let rc2 = spec.r_cutoff() * spec.r_cutoff();
    let cells = CellList::build(q, box_spec, spec.r_cutoff());
    let f = (0..q.len())
        .map(|i| {
            let mut acc = Vec2::zeros();
            for j in cells.neighbours(i) {
                accumulate(&mut acc, i, j, q, box_spec, spec, rc2)?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForceField { f })
}

/// O(n^2) reference loop over all partners in ascending index order.
pub fn compute_forces_naive(
    state: &SystemState,
    box_spec: &BoxSpec,
    spec: &PotentialSpec,
) -> Result<ForceField> {
    let q = &state.q;
    let rc2 = spec.r_cutoff() * spec.r_cutoff();
    let f = (0..q.len())
        .map(|i| {
            let mut acc = Vec2::zeros();
            for j in (0..q.len()).filter(|&j| j != i) {
                accumulate(&mut acc, i, j, q, box_spec, spec, rc2)?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForceField { f })
}

/// Pair energy `sum_{i<j} V(|q_i - q_j|)` with minimum-image distances.
pub fn potential_energy(state: &SystemState, box_spec: &BoxSpec, spec: &PotentialSpec) -> f64 {
    let q = &state.q;
    let cells = CellList::build(q, box_spec, spec.r_cutoff());
    let mut total = 0.0;
    for i in 0..q.len() {
        for j in cells.neighbours(i).filter(|&j| j > i) {
            let r = min_image(q[i] - q[j], box_spec).norm();
            total += if r > 0.0 { spec.energy_unchecked(r) } else { f64::INFINITY };
        }
    }
    total
}

/// Hamiltonian: kinetic plus pair energy. Overlapping particles give `+inf`.
pub fn total_energy(state: &SystemState, box_spec: &BoxSpec, spec: &PotentialSpec) -> f64 {
    state.kinetic_energy() + potential_energy(state, box_spec, spec)
}
