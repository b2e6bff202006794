use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coupling::{build_shadow_map_with, verify_weak_shadowing, ShadowMap};
use super::partition::CellSizePolicy;
use crate::error::{Error, Result};
use crate::md::{integrate, step_count, BoxSpec, PotentialSpec, SystemState};
use crate::metrics::{pairwise_distances, prokhorov_empirical, EmpiricalSample};
use crate::observables::{unwrap_displacement, PathPL};
use crate::rng::derive_seed;
use crate::sampler::{remove_com_velocity, sample_canonical, ThermostatSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowPipelineConfig {
    pub n_particles: usize,
    pub box_side: f64,
    pub r_cutoff: f64,
    pub beta: f64,
    pub gamma: f64,
    pub langevin_dt: f64,
    pub burn_in_steps: usize,
    pub n_paths: usize,
    pub horizon: f64,
    pub dt: f64,
    /// Step of the fine-step run that stands in for the exact flow.
    pub dt_ref: f64,
    /// Particle whose unwrapped displacement is the projection.
    pub particle: usize,
    /// `None` picks the smallest feasible power of two.
    pub epsilon: Option<f64>,
    pub policy: CellSizePolicy,
    pub master_seed: u64,
}

impl Default for ShadowPipelineConfig {
    fn default() -> Self {
        let thermo = ThermostatSpec::default();
        Self {
            n_particles: 2,
            box_side: 6.0,
            r_cutoff: 2.5,
            beta: thermo.beta,
            gamma: thermo.gamma,
            langevin_dt: thermo.langevin_dt,
            burn_in_steps: thermo.burn_in_steps,
            n_paths: 64,
            horizon: 5.0,
            dt: 0.01,
            dt_ref: 0.001,
            particle: 0,
            epsilon: None,
            policy: CellSizePolicy::Finest,
            master_seed: 0,
        }
    }
}

/// Diagnostic record of one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowRecord {
    pub n_paths: usize,
    pub dt: f64,
    pub dt_ref: f64,
    pub horizon: f64,
    /// Prokhorov distance between the two path ensembles under the sup norm.
    pub alpha: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub k: usize,
    pub n_cells: usize,
    pub beta: f64,
    pub exceedance: f64,
    /// `k delta + epsilon`; the construction guarantees `exceedance < bound`.
    pub bound: f64,
    pub pass: bool,
    pub bijective: bool,
    pub exceedance_curve: Vec<(f64, f64)>,
    /// `(reference path, numerical path, sup distance)`.
    pub matching: Vec<(usize, usize, f64)>,
}

impl ShadowRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records always serialise")
    }
}

/// Reference and numerical projected paths for `n_paths` canonical initial
/// conditions. Numerical paths are refined onto the reference grid.
pub fn shadow_paths(cfg: &ShadowPipelineConfig) -> Result<(Vec<PathPL>, Vec<PathPL>)> {
    let potential = PotentialSpec::new(cfg.r_cutoff, 4.0)?;
    let box_spec = BoxSpec::new(cfg.box_side, &potential)?;
    if cfg.particle >= cfg.n_particles {
        return Err(Error::IndexOutOfRange {
            index: cfg.particle,
            len: cfg.n_particles,
        });
    }
    let n_ref = step_count(cfg.horizon, cfg.dt_ref)?;
    let n_num = step_count(cfg.horizon, cfg.dt)?;
    if n_ref % n_num != 0 {
        return Err(Error::InvalidParameter(format!(
            "dt = {} is not a multiple of dt_ref = {}",
            cfg.dt, cfg.dt_ref
        )));
    }
    let thermo = ThermostatSpec {
        beta: cfg.beta,
        gamma: cfg.gamma,
        langevin_dt: cfg.langevin_dt,
        burn_in_steps: cfg.burn_in_steps,
        seed: 0,
    };
    let run = |dt: f64, steps: usize, state: &SystemState| -> Result<PathPL> {
        let states = integrate(state, dt, steps, 1, &box_spec, &potential)
            .map_err(|e| Error::Simulation { dt, source: Box::new(e) })?;
        unwrap_displacement(&states, cfg.particle, dt)
    };
    let pairs: Vec<(PathPL, PathPL)> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(cfg.master_seed, i as u64);
            let state = sample_canonical(&box_spec, &potential, cfg.n_particles, &thermo.with_seed(seed))?;
            let state = remove_com_velocity(&state);
            let reference = run(cfg.dt_ref, n_ref, &state)?;
            let numerical = run(cfg.dt, n_num, &state)?.refine(n_ref / n_num);
            Ok((reference, numerical))
        })
        .collect::<Result<_>>()?;
    Ok(pairs.into_iter().unzip())
}

/// Smallest `2^-j` with a successful construction, or the given epsilon.
fn construct(
    x: &EmpiricalSample,
    y: &EmpiricalSample,
    alpha: f64,
    cfg: &ShadowPipelineConfig,
) -> Result<ShadowMap> {
    let cross = pairwise_distances(x, y)?;
    if let Some(eps) = cfg.epsilon {
        return build_shadow_map_with(x, y, &cross, alpha, eps, cfg.policy);
    }
    let mut best = None;
    for j in 1..=40 {
        let eps = 0.5f64.powi(j);
        match build_shadow_map_with(x, y, &cross, alpha, eps, cfg.policy) {
            Ok(s) => best = Some(s),
            Err(Error::InfeasiblePartition(msg)) => {
                if best.is_none() {
                    return Err(Error::InfeasiblePartition(msg));
                }
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(best.expect("loop either records a map or returns"))
}

/// Runs the full shadowing check: paths, `alpha`, shadow map, and the weak
/// shadowing test at `beta = alpha + 3 epsilon`.
pub fn shadow_md_pipeline(cfg: &ShadowPipelineConfig) -> Result<ShadowRecord> {
    let (reference, numerical) = shadow_paths(cfg)?;
    let x = EmpiricalSample::paths(reference)?;
    let y = EmpiricalSample::paths(numerical)?;
    let alpha = prokhorov_empirical(&pairwise_distances(&x, &y)?)?.value;
    let shadow = construct(&x, &y, alpha, cfg)?;
    let beta = alpha + 3.0 * shadow.epsilon;
    let report = verify_weak_shadowing(&shadow.map, beta);
    let curve_max = shadow
        .map
        .per_pair_distance
        .iter()
        .copied()
        .fold(beta, f64::max);
    Ok(ShadowRecord {
        n_paths: cfg.n_paths,
        dt: cfg.dt,
        dt_ref: cfg.dt_ref,
        horizon: cfg.horizon,
        alpha,
        epsilon: shadow.epsilon,
        delta: shadow.delta,
        k: shadow.k,
        n_cells: shadow.n_cells,
        beta,
        exceedance: report.exceedance,
        bound: shadow.bound(),
        pass: report.pass,
        bijective: shadow.map.is_bijection(),
        exceedance_curve: shadow.map.exceedance_curve(curve_max, 65),
        matching: shadow
            .map
            .assignment
            .iter()
            .zip(&shadow.map.per_pair_distance)
            .enumerate()
            .map(|(i, (&j, &d))| (i, j, d))
            .collect(),
    })
}
