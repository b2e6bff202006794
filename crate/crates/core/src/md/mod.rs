//! Two-dimensional periodic Lennard-Jones system integrated with the
//! drift-kick-drift Störmer-Verlet scheme.
//!
//! Positions live on the torus `[0, side)^2` and are re-wrapped after every
//! drift. All particles have unit mass, so momenta and velocities coincide.

mod cell_list;
mod forces;
mod integrator;
mod potential;

pub use cell_list::CellList;
pub use forces::{compute_forces, compute_forces_naive, potential_energy, total_energy, ForceField};
pub use integrator::{integrate, step_count, verlet_step};
pub use potential::{lj_force_pair, lj_potential, PotentialSpec};

use nalgebra::Vector2;

use crate::error::{Error, Result};

pub type Vec2 = Vector2<f64>;

/// Square periodic box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSpec {
    side: f64,
}

impl BoxSpec {
    pub const DIMENSION: usize = 2;

    /// Creates a box; `side` must exceed twice the cutoff of `potential` so the
    /// minimum-image pair is unique.
    pub fn new(side: f64, potential: &PotentialSpec) -> Result<Self> {
        if !(side.is_finite() && side > 0.0) {
            return Err(Error::InvalidParameter(format!("box side {side} must be positive")));
        }
        if side <= 2.0 * potential.r_cutoff() {
            return Err(Error::InvalidParameter(format!(
                "box side {side} must exceed 2 * r_cutoff = {}",
                2.0 * potential.r_cutoff()
            )));
        }
        Ok(Self { side })
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    /// Maps a coordinate into `[0, side)`.
    pub fn wrap_coord(&self, x: f64) -> f64 {
        let mut r = x.rem_euclid(self.side);
        // rem_euclid can round up to `side` for tiny negative inputs
        if r >= self.side {
            r -= self.side;
        }
        r
    }

    pub fn wrap(&self, q: Vec2) -> Vec2 {
        Vec2::new(self.wrap_coord(q.x), self.wrap_coord(q.y))
    }
}

/// Minimum-image representative of `delta` with components in `[-side/2, side/2)`.
pub fn min_image(delta: Vec2, box_spec: &BoxSpec) -> Vec2 {
    let side = box_spec.side;
    let half = 0.5 * side;
    let reduce = |c: f64| {
        let mut r = c - side * (c / side + 0.5).floor();
        if r >= half {
            r -= side;
        } else if r < -half {
            r += side;
        }
        r
    };
    Vec2::new(reduce(delta.x), reduce(delta.y))
}

/// Positions and momenta of `n` unit-mass particles.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub q: Vec<Vec2>,
    pub p: Vec<Vec2>,
}

impl SystemState {
    /// Builds a state, wrapping positions into the box.
    pub fn new(q: Vec<Vec2>, p: Vec<Vec2>, box_spec: &BoxSpec) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::InvalidParameter(format!(
                "{} positions but {} momenta",
                q.len(),
                p.len()
            )));
        }
        if q.iter().chain(p.iter()).any(|v| !(v.x.is_finite() && v.y.is_finite())) {
            return Err(Error::InvalidParameter("non-finite coordinate in state".into()));
        }
        let q = q.into_iter().map(|x| box_spec.wrap(x)).collect();
        Ok(Self { q, p })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.p.iter().map(|p| p.norm_squared()).sum::<f64>()
    }

    pub fn total_momentum(&self) -> Vec2 {
        self.p.iter().fold(Vec2::zeros(), |acc, p| acc + p)
    }

    pub fn is_finite(&self) -> bool {
        self.q
            .iter()
            .chain(self.p.iter())
            .all(|v| v.x.is_finite() && v.y.is_finite())
    }

    /// Same positions, all momenta negated.
    pub fn reversed(&self) -> Self {
        Self {
            q: self.q.clone(),
            p: self.p.iter().map(|p| -p).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box115() -> BoxSpec {
        BoxSpec::new(11.5, &PotentialSpec::default()).unwrap()
    }

    /// Exhaustive search over lattice shifts in {-1, 0, 1} * side, keeping the
    /// representative inside [-side/2, side/2).
    fn brute_min_image(d: Vec2, side: f64) -> Vec2 {
        let half = side / 2.0;
        let mut best = None;
        for kx in -1..=1 {
            for ky in -1..=1 {
                let c = Vec2::new(d.x + kx as f64 * side, d.y + ky as f64 * side);
                if c.x >= -half && c.x < half && c.y >= -half && c.y < half {
                    best = Some(c);
                }
            }
        }
        best.expect("representative exists for |d| < 1.5 side")
    }

    #[test]
    fn min_image_examples() {
        let b = box115();
        assert_eq!(min_image(Vec2::new(0.3, 0.0), &b), Vec2::new(0.3, 0.0));
        let w = min_image(Vec2::new(11.4, 0.0), &b);
        assert!((w.x + 0.1).abs() < 1e-12 && w.y == 0.0);
        let e = min_image(Vec2::new(5.75, -5.75), &b);
        assert_eq!(e, Vec2::new(-5.75, -5.75));
        assert_eq!(e, brute_min_image(Vec2::new(5.75, -5.75), 11.5));
    }

    #[test]
    fn min_image_matches_lattice_search() {
        let b = box115();
        for i in 0..200 {
            let x = -11.0 + 0.1103 * i as f64;
            let y = 10.9 - 0.0977 * i as f64;
            let d = Vec2::new(x, y);
            let got = min_image(d, &b);
            let want = brute_min_image(d, 11.5);
            assert!((got - want).norm() < 1e-12, "{d:?}: {got:?} vs {want:?}");
        }
    }

    #[test]
    fn wrap_stays_in_box() {
        let b = box115();
        for x in [-1e-17, -11.5, 11.5, 23.0, -0.0, 5.0, 11.499999999999998] {
            let w = b.wrap_coord(x);
            assert!((0.0..11.5).contains(&w), "{x} -> {w}");
        }
    }

    #[test]
    fn box_rejects_small_side() {
        let pot = PotentialSpec::default();
        assert!(BoxSpec::new(5.0, &pot).is_err());
        assert!(BoxSpec::new(-1.0, &pot).is_err());
        assert!(BoxSpec::new(5.2, &pot).is_ok());
    }
}
