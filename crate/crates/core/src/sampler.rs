//! Initial conditions from the canonical density `exp(-beta H)`.
//!
//! Samples are produced by running BAOAB Langevin dynamics from a perturbed
//! square lattice; the normalising constant of the density is never needed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::md::{compute_forces, BoxSpec, ForceField, PotentialSpec, SystemState, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermostatSpec {
    pub beta: f64,
    pub gamma: f64,
    pub langevin_dt: f64,
    pub burn_in_steps: usize,
    pub seed: u64,
}

impl Default for ThermostatSpec {
    fn default() -> Self {
        Self {
            beta: 1.0,
            gamma: 1.0,
            langevin_dt: 0.01,
            burn_in_steps: 100_000,
            seed: 0,
        }
    }
}

impl ThermostatSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} = {v} must be positive")))
            }
        };
        positive("beta", self.beta)?;
        positive("gamma", self.gamma)?;
        positive("langevin_dt", self.langevin_dt)?;
        if self.burn_in_steps == 0 {
            return Err(Error::InvalidParameter("burn_in_steps must be positive".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// BAOAB splitting of underdamped Langevin dynamics with unit masses.
#[derive(Debug, Clone, Copy)]
pub struct Langevin {
    pub box_spec: BoxSpec,
    pub potential: PotentialSpec,
    pub gamma: f64,
    pub beta: f64,
    pub dt: f64,
}

impl Langevin {
    /// One B-A-O-A-B step. `forces` must hold the forces at `state.q`; the
    /// forces at the new positions are returned alongside the new state.
    /// Without an RNG the O substep only applies friction, so `gamma = 0`
    /// reduces the step to kick-drift-kick Verlet.
    pub fn step<R: Rng + ?Sized>(
        &self,
        state: &SystemState,
        forces: &ForceField,
        noise: Option<&mut R>,
    ) -> Result<(SystemState, ForceField)> {
        let half = 0.5 * self.dt;
        let decay = (-self.gamma * self.dt).exp();
        let spread = ((1.0 - decay * decay) / self.beta).sqrt();

        let mut p: Vec<Vec2> = state
            .p
            .iter()
            .zip(&forces.f)
            .map(|(p, f)| p + f * half)
            .collect();
        let mut q: Vec<Vec2> = state
            .q
            .iter()
            .zip(&p)
            .map(|(q, p)| self.box_spec.wrap(q + p * half))
            .collect();
        match noise {
            Some(rng) => {
                for pi in p.iter_mut() {
                    let xi = Vec2::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
                    *pi = *pi * decay + xi * spread;
                }
            }
            None => {
                for pi in p.iter_mut() {
                    *pi *= decay;
                }
            }
        }
        for (qi, pi) in q.iter_mut().zip(&p) {
            *qi = self.box_spec.wrap(*qi + pi * half);
        }
        let moved = SystemState { q, p };
        let new_forces = compute_forces(&moved, &self.box_spec, &self.potential)?;
        let p = moved
            .p
            .iter()
            .zip(&new_forces.f)
            .map(|(p, f)| p + f * half)
            .collect();
        Ok((SystemState { q: moved.q, p }, new_forces))
    }
}

/// Square lattice of `ceil(sqrt(n))^2` sites, filled in row order, each site
/// jittered by at most 10% of the spacing per coordinate.
pub fn lattice_positions<R: Rng + ?Sized>(n: usize, box_spec: &BoxSpec, rng: &mut R) -> Vec<Vec2> {
    let per_side = (n as f64).sqrt().ceil() as usize;
    let spacing = box_spec.side() / per_side as f64;
    (0..n)
        .map(|k| {
            let (ix, iy) = (k % per_side, k / per_side);
            let jitter = Vec2::new(rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1));
            let site = Vec2::new((ix as f64 + 0.5) * spacing, (iy as f64 + 0.5) * spacing);
            box_spec.wrap(site + jitter * spacing)
        })
        .collect()
}

/// Draws one state approximately distributed as `exp(-beta H)`.
pub fn sample_canonical(
    box_spec: &BoxSpec,
    potential: &PotentialSpec,
    n: usize,
    thermo: &ThermostatSpec,
) -> Result<SystemState> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 particles, got {n}")));
    }
    thermo.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(thermo.seed);
    let sd = thermo.beta.recip().sqrt();
    let q = lattice_positions(n, box_spec, &mut rng);
    let p = (0..n)
        .map(|_| {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            Vec2::new(x, y) * sd
        })
        .collect();
    let mut state = SystemState { q, p };
    let dynamics = Langevin {
        box_spec: *box_spec,
        potential: *potential,
        gamma: thermo.gamma,
        beta: thermo.beta,
        dt: thermo.langevin_dt,
    };
    let mut forces = compute_forces(&state, box_spec, potential)?;
    for step in 1..=thermo.burn_in_steps {
        let (s, f) = dynamics
            .step(&state, &forces, Some(&mut rng))
            .map_err(|_| Error::ThermostatInstability { step })?;
        if !s.is_finite() {
            return Err(Error::ThermostatInstability { step });
        }
        state = s;
        forces = f;
    }
    Ok(state)
}

/// Subtracts the mean momentum from every particle. The last particle takes
/// minus the sum of the others, so `total_momentum` is exactly zero.
pub fn remove_com_velocity(state: &SystemState) -> SystemState {
    let n = state.len().max(1) as f64;
    let mean = state.total_momentum() / n;
    let mut p: Vec<Vec2> = state.p.iter().map(|p| p - mean).collect();
    if let Some((last, rest)) = p.split_last_mut() {
        *last = -rest.iter().fold(Vec2::zeros(), |acc, v| acc + v);
    }
    SystemState {
        q: state.q.clone(),
        p,
    }
}

pub fn kick_particle(state: &SystemState, index: usize, dv: Vec2) -> Result<SystemState> {
    if index >= state.len() {
        return Err(Error::IndexOutOfRange {
            index,
            len: state.len(),
        });
    }
    let mut out = state.clone();
    out.p[index] += dv;
    Ok(out)
}
