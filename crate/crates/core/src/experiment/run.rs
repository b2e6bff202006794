use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{ExperimentConfig, ExperimentId};
use crate::error::{Error, Result};
use crate::md::{integrate, step_count, BoxSpec, PotentialSpec, SystemState, Vec2};
use crate::metrics::ks_distance_samples;
use crate::observables::{
    brownian_reference, eval_functional, histogram, sup_distance, unwrap_displacement, BinSpec,
    FunctionalId, PathPL,
};
use crate::rng::derive_seed;
use crate::sampler::{kick_particle, remove_com_velocity, sample_canonical, ThermostatSpec};
use crate::shadow::{shadow_md_pipeline, CellSizePolicy, ShadowPipelineConfig, ShadowRecord};

/// Streams at and above this offset seed the Brownian reference paths;
/// streams below it seed ensemble members.
const BROWNIAN_STREAM: u64 = 1 << 32;

pub const MANIFEST_FILE: &str = "manifest.sha256";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Two-sample KS distance of one functional between two step sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsRow {
    pub functional: String,
    pub dt_a: f64,
    pub dt_b: f64,
    pub ks: f64,
}

/// Separation of two runs from the same initial condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRow {
    pub member: usize,
    pub dt_a: f64,
    pub dt_b: f64,
    pub sup_distance: f64,
    /// First time the displacements are a unit distance apart.
    pub first_exceed_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct RunOutput {
    /// Every written file except the manifest, sorted by name.
    pub manifest: Vec<ManifestEntry>,
    pub ks: Vec<KsRow>,
    pub divergence: Vec<DivergenceRow>,
    pub shadow: Option<ShadowRecord>,
}

struct Setup {
    potential: PotentialSpec,
    box_spec: BoxSpec,
    thermo: ThermostatSpec,
}

impl Setup {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let potential = PotentialSpec::new(cfg.r_cutoff, 4.0)?;
        let box_spec = BoxSpec::new(cfg.box_side, &potential)?;
        let thermo = ThermostatSpec {
            beta: cfg.beta,
            gamma: cfg.gamma,
            langevin_dt: cfg.langevin_dt,
            burn_in_steps: cfg.burn_in_steps,
            seed: 0,
        };
        Ok(Self {
            potential,
            box_spec,
            thermo,
        })
    }

    /// Canonical draw for ensemble member `member` with zero total momentum;
    /// exp4 then adds the kick.
    fn initial_condition(&self, cfg: &ExperimentConfig, member: usize) -> Result<SystemState> {
        let thermo = self.thermo.with_seed(derive_seed(cfg.seed, member as u64));
        let state = sample_canonical(&self.box_spec, &self.potential, cfg.n_particles, &thermo)?;
        let state = remove_com_velocity(&state);
        if cfg.experiment == ExperimentId::Exp4 {
            kick_particle(&state, cfg.kick_particle, Vec2::new(cfg.kick[0], cfg.kick[1]))
        } else {
            Ok(state)
        }
    }

    fn path(&self, cfg: &ExperimentConfig, state: &SystemState, dt: f64) -> Result<PathPL> {
        let wrap = |e: Error| Error::Simulation {
            dt,
            source: Box::new(e),
        };
        let steps = step_count(cfg.horizon, dt).map_err(wrap)?;
        let states = integrate(state, dt, steps, 1, &self.box_spec, &self.potential).map_err(wrap)?;
        unwrap_displacement(&states, cfg.particle, dt)
    }
}

fn trajectory_csv(path: &PathPL) -> String {
    let mut s = String::from("t,qx,qy\n");
    for (n, q) in path.nodes().enumerate() {
        writeln!(s, "{},{},{}", path.time(n), q[0], q[1]).expect("writing to a String");
    }
    s
}

/// Both paths on the finer of their nested grids.
fn on_common_grid(a: &PathPL, b: &PathPL) -> (PathPL, PathPL) {
    let ratio = |c: &PathPL, f: &PathPL| ((c.len() - 1) / (f.len() - 1).max(1)).max(1);
    if a.len() >= b.len() {
        (a.clone(), b.refine(ratio(a, b)))
    } else {
        (a.refine(ratio(b, a)), b.clone())
    }
}

fn divergence(member: usize, dt_a: f64, a: &PathPL, dt_b: f64, b: &PathPL) -> Result<DivergenceRow> {
    let sup = sup_distance(a, b)?;
    let (fa, fb) = on_common_grid(a, b);
    let diff: Vec<f64> = fa.nodes().zip(fb.nodes()).flat_map(|(p, q)| [p[0] - q[0], p[1] - q[1]]).collect();
    let diff = PathPL::from_flat(fa.dt(), 2, diff)?;
    let first_exceed_time = if sup >= 1.0 {
        Some(eval_functional(FunctionalId::F4, &diff)?)
    } else {
        None
    };
    Ok(DivergenceRow {
        member,
        dt_a,
        dt_b,
        sup_distance: sup,
        first_exceed_time,
    })
}

fn exp1(cfg: &ExperimentConfig, setup: &Setup, files: &mut Vec<(String, String)>) -> Result<()> {
    let dt = cfg.dts[0];
    let paths: Vec<PathPL> = (0..cfg.ensemble)
        .into_par_iter()
        .map(|m| setup.path(cfg, &setup.initial_condition(cfg, m)?, dt))
        .collect::<Result<_>>()?;
    for (m, p) in paths.iter().enumerate() {
        files.push((format!("traj_{m}.csv"), trajectory_csv(p)));
    }
    Ok(())
}

fn exp2(
    cfg: &ExperimentConfig,
    setup: &Setup,
    files: &mut Vec<(String, String)>,
) -> Result<Vec<DivergenceRow>> {
    let runs: Vec<Vec<PathPL>> = (0..cfg.ensemble)
        .into_par_iter()
        .map(|m| {
            let state = setup.initial_condition(cfg, m)?;
            cfg.dts.iter().map(|&dt| setup.path(cfg, &state, dt)).collect()
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (m, paths) in runs.iter().enumerate() {
        for (i, p) in paths.iter().enumerate() {
            files.push((format!("traj_m{m}_dt{}.csv", cfg.dts[i]), trajectory_csv(p)));
            for (j, q) in paths.iter().enumerate().skip(i + 1) {
                rows.push(divergence(m, cfg.dts[i], p, cfg.dts[j], q)?);
            }
        }
    }
    let mut csv = String::from("member,dt_a,dt_b,sup_distance,first_exceed_time\n");
    for r in &rows {
        let t = r.first_exceed_time.map_or("nan".to_string(), |t| t.to_string());
        writeln!(csv, "{},{},{},{},{t}", r.member, r.dt_a, r.dt_b, r.sup_distance).expect("writing to a String");
    }
    files.push(("divergence.csv".into(), csv));
    Ok(rows)
}

/// Common bins for every sample of one functional.
fn shared_bins(samples: &[&[f64]], bins: usize) -> Result<BinSpec> {
    let (lo, hi) = samples
        .iter()
        .flat_map(|s| s.iter().copied())
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return BinSpec::new(-0.5, 0.5, bins);
    }
    if lo == hi {
        return BinSpec::new(lo - 0.5, hi + 0.5, bins);
    }
    BinSpec::new(lo, hi, bins)
}

fn histograms(
    cfg: &ExperimentConfig,
    setup: &Setup,
    files: &mut Vec<(String, String)>,
) -> Result<Vec<KsRow>> {
    let nf = cfg.functionals.len();
    // per member: functional values for each dt, and the endpoint x at the finest dt
    let per_member: Vec<(Vec<Vec<f64>>, f64)> = (0..cfg.ensemble)
        .into_par_iter()
        .map(|m| {
            let state = setup.initial_condition(cfg, m)?;
            let mut values = Vec::with_capacity(cfg.dts.len());
            let mut finest = (f64::INFINITY, 0.0);
            for &dt in &cfg.dts {
                let path = setup.path(cfg, &state, dt)?;
                if dt < finest.0 {
                    finest = (dt, path.node(path.len() - 1)[0]);
                }
                values.push(
                    cfg.functionals
                        .iter()
                        .map(|&f| eval_functional(f, &path))
                        .collect::<Result<Vec<f64>>>()?,
                );
            }
            Ok((values, finest.1))
        })
        .collect::<Result<_>>()?;

    // samples[d][f][member]
    let samples: Vec<Vec<Vec<f64>>> = (0..cfg.dts.len())
        .map(|d| (0..nf).map(|f| per_member.iter().map(|(v, _)| v[d][f]).collect()).collect())
        .collect();

    let brownian: Option<Vec<Vec<f64>>> = if cfg.experiment == ExperimentId::Exp3 && cfg.ensemble >= 2 {
        let ends: Vec<f64> = per_member.iter().map(|(_, x)| *x).collect();
        let mean = ends.iter().sum::<f64>() / ends.len() as f64;
        let var = ends.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (ends.len() - 1) as f64;
        let dt_grid = cfg.dts.iter().copied().fold(f64::INFINITY, f64::min);
        let per_path: Vec<Vec<f64>> = (0..cfg.ensemble)
            .into_par_iter()
            .map(|m| {
                let seed = derive_seed(cfg.seed, BROWNIAN_STREAM + m as u64);
                let b = brownian_reference(var, cfg.horizon, dt_grid, seed)?;
                cfg.functionals.iter().map(|&f| eval_functional(f, &b)).collect()
            })
            .collect::<Result<_>>()?;
        Some((0..nf).map(|f| per_path.iter().map(|v| v[f]).collect()).collect())
    } else {
        None
    };

    for (d, &dt) in cfg.dts.iter().enumerate() {
        let mut csv = String::from("member");
        for f in &cfg.functionals {
            write!(csv, ",{f}").expect("writing to a String");
        }
        csv.push('\n');
        for (m, (v, _)) in per_member.iter().enumerate() {
            write!(csv, "{m}").expect("writing to a String");
            for x in &v[d] {
                write!(csv, ",{x}").expect("writing to a String");
            }
            csv.push('\n');
        }
        files.push((format!("values_dt{dt}.csv"), csv));
    }

    let mut ks = Vec::new();
    for (f, id) in cfg.functionals.iter().enumerate() {
        let mut all: Vec<&[f64]> = samples.iter().map(|s| s[f].as_slice()).collect();
        if let Some(b) = &brownian {
            all.push(&b[f]);
        }
        let spec = shared_bins(&all, cfg.bins)?;
        for (d, &dt) in cfg.dts.iter().enumerate() {
            let h = histogram(&samples[d][f], &spec)?;
            files.push((format!("hist_{id}_dt{dt}.csv"), h.to_csv()));
        }
        if let Some(b) = &brownian {
            files.push((format!("hist_{id}_brownian.csv"), histogram(&b[f], &spec)?.to_csv()));
        }
        for a in 0..cfg.dts.len() {
            for b in a + 1..cfg.dts.len() {
                ks.push(KsRow {
                    functional: id.name().to_string(),
                    dt_a: cfg.dts[a],
                    dt_b: cfg.dts[b],
                    ks: ks_distance_samples(&samples[a][f], &samples[b][f])?,
                });
            }
        }
    }
    let mut csv = String::from("functional,dt_a,dt_b,ks\n");
    for r in &ks {
        writeln!(csv, "{},{},{},{}", r.functional, r.dt_a, r.dt_b, r.ks).expect("writing to a String");
    }
    files.push(("ks.csv".into(), csv));
    Ok(ks)
}

fn exp5(cfg: &ExperimentConfig, files: &mut Vec<(String, String)>) -> Result<ShadowRecord> {
    let pipeline = ShadowPipelineConfig {
        n_particles: cfg.n_particles,
        box_side: cfg.box_side,
        r_cutoff: cfg.r_cutoff,
        beta: cfg.beta,
        gamma: cfg.gamma,
        langevin_dt: cfg.langevin_dt,
        burn_in_steps: cfg.burn_in_steps,
        n_paths: cfg.ensemble,
        horizon: cfg.horizon,
        dt: cfg.dts[0],
        dt_ref: cfg.dt_ref,
        particle: cfg.particle,
        epsilon: cfg.epsilon,
        policy: CellSizePolicy::Finest,
        master_seed: cfg.seed,
    };
    let record = shadow_md_pipeline(&pipeline)?;
    files.push(("shadow_record.json".into(), record.to_json()));
    Ok(record)
}

/// Runs one experiment, writes its outputs and a sha256 manifest into
/// `cfg.out_dir`, and returns the manifest with the computed summaries.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.check()?;
    let setup = Setup::new(cfg)?;
    let mut files: Vec<(String, String)> = Vec::new();
    let mut out = RunOutput::default();
    match cfg.experiment {
        ExperimentId::Exp1 => exp1(cfg, &setup, &mut files)?,
        ExperimentId::Exp2 => out.divergence = exp2(cfg, &setup, &mut files)?,
        ExperimentId::Exp3 | ExperimentId::Exp4 => out.ks = histograms(cfg, &setup, &mut files)?,
        ExperimentId::Exp5 => out.shadow = Some(exp5(cfg, &mut files)?),
    }
    let resolved: String = cfg
        .to_text()
        .lines()
        .filter(|l| !l.starts_with("out_dir"))
        .map(|l| format!("{l}\n"))
        .collect();
    files.push(("config.txt".into(), resolved));
    files.sort_by(|a, b| a.0.cmp(&b.0));
    out.manifest = write_files(&cfg.out_dir, &files)?;
    Ok(out)
}

fn write_files(dir: &Path, files: &[(String, String)]) -> Result<Vec<ManifestEntry>> {
    fs::create_dir_all(dir)?;
    let mut manifest = Vec::with_capacity(files.len());
    let mut text = String::new();
    for (name, content) in files {
        fs::write(dir.join(name), content)?;
        let sha256 = hex::encode(Sha256::digest(content.as_bytes()));
        writeln!(text, "{sha256}  {name}").expect("writing to a String");
        manifest.push(ManifestEntry {
            file: name.clone(),
            sha256,
            bytes: content.len(),
        });
    }
    fs::write(dir.join(MANIFEST_FILE), text)?;
    Ok(manifest)
}
