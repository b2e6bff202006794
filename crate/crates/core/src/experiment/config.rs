use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::md::step_count;
use crate::observables::FunctionalId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExperimentId {
    /// Sample trajectories of one particle.
    Exp1,
    /// One initial condition integrated with every step size.
    Exp2,
    /// Functional histograms from equilibrium initial conditions.
    Exp3,
    /// Functional histograms after a velocity kick.
    Exp4,
    /// Shadow coupling of a two-particle system.
    Exp5,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 5] = [Self::Exp1, Self::Exp2, Self::Exp3, Self::Exp4, Self::Exp5];

    pub fn name(self) -> &'static str {
        match self {
            Self::Exp1 => "exp1",
            Self::Exp2 => "exp2",
            Self::Exp3 => "exp3",
            Self::Exp4 => "exp4",
            Self::Exp5 => "exp5",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "exp1" | "trajectories" => Ok(Self::Exp1),
            "exp2" | "divergence" => Ok(Self::Exp2),
            "exp3" | "equilibrium" => Ok(Self::Exp3),
            "exp4" | "nonequilibrium" => Ok(Self::Exp4),
            "exp5" | "shadow" => Ok(Self::Exp5),
            other => Err(format!("unknown experiment `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Preset {
    /// 16 particles; runs in minutes on one core.
    Desk,
    /// 100 particles in a box of side 11.5.
    #[default]
    Paper,
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "desk" => Ok(Self::Desk),
            "paper" => Ok(Self::Paper),
            other => Err(format!("unknown preset `{other}`")),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Desk => "desk",
            Self::Paper => "paper",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub preset: Preset,
    pub n_particles: usize,
    pub box_side: f64,
    pub r_cutoff: f64,
    pub beta: f64,
    pub gamma: f64,
    pub langevin_dt: f64,
    pub burn_in_steps: usize,
    pub dts: Vec<f64>,
    pub horizon: f64,
    pub ensemble: usize,
    /// Velocity added to `kick_particle` (exp4).
    pub kick: [f64; 2],
    pub kick_particle: usize,
    /// Particle whose displacement is observed.
    pub particle: usize,
    pub functionals: Vec<FunctionalId>,
    pub bins: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Reference step of exp5.
    pub dt_ref: f64,
    /// Cell diameter of exp5; `None` selects it automatically.
    pub epsilon: Option<f64>,
}

impl ExperimentConfig {
    /// Defaults of a preset for one experiment.
    pub fn preset(preset: Preset, experiment: ExperimentId) -> Self {
        use ExperimentId::*;
        let (n_particles, box_side) = match (preset, experiment) {
            (_, Exp5) => (2, if preset == Preset::Desk { 5.2 } else { 11.5 }),
            (Preset::Desk, _) => (16, 5.2),
            (Preset::Paper, _) => (100, 11.5),
        };
        let horizon = match (preset, experiment) {
            (_, Exp1) => 20.0,
            (_, Exp2) | (_, Exp4) => 10.0,
            (Preset::Desk, Exp3) => 20.0,
            (Preset::Paper, Exp3) => 100.0,
            (_, Exp5) => 5.0,
        };
        let ensemble = match experiment {
            Exp1 => 3,
            Exp2 => 1,
            Exp3 | Exp4 => 200,
            Exp5 => 64,
        };
        let dts = match experiment {
            Exp5 => vec![0.01],
            _ => vec![0.01, 0.005, 0.0025],
        };
        Self {
            experiment,
            preset,
            n_particles,
            box_side,
            r_cutoff: 2.5,
            beta: 1.0,
            gamma: 1.0,
            langevin_dt: 0.01,
            burn_in_steps: 100_000,
            dts,
            horizon,
            ensemble,
            kick: [10.0, 0.0],
            kick_particle: 0,
            particle: 0,
            functionals: FunctionalId::all(FunctionalId::DEFAULT_TAU).to_vec(),
            bins: 40,
            seed: 0,
            out_dir: PathBuf::from("out"),
            dt_ref: 0.001,
            epsilon: None,
        }
    }

    /// Checks every cross-field invariant.
    pub fn check(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::ConfigConstraint(msg));
        let positive = |name: &str, v: f64| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::ConfigConstraint(format!("{name} = {v} must be positive")))
            }
        };
        if self.dts.is_empty() {
            return fail("dts must list at least one step".into());
        }
        for &dt in &self.dts {
            positive("dt", dt)?;
        }
        positive("horizon", self.horizon)?;
        positive("beta", self.beta)?;
        positive("gamma", self.gamma)?;
        positive("langevin_dt", self.langevin_dt)?;
        positive("r_cutoff", self.r_cutoff)?;
        positive("dt_ref", self.dt_ref)?;
        for &dt in &self.dts {
            if step_count(self.horizon, dt).is_err() {
                return fail(format!("horizon {} is not a multiple of dt {dt}", self.horizon));
            }
        }
        if self.ensemble == 0 {
            return fail("ensemble must be at least 1".into());
        }
        if self.n_particles < 2 {
            return fail(format!("n_particles = {} must be at least 2", self.n_particles));
        }
        if !(self.box_side > 2.0 * self.r_cutoff) {
            return fail(format!(
                "box_side = {} must exceed twice r_cutoff = {}",
                self.box_side, self.r_cutoff
            ));
        }
        if self.particle >= self.n_particles || self.kick_particle >= self.n_particles {
            return fail(format!("particle indices must be below n_particles = {}", self.n_particles));
        }
        if self.burn_in_steps == 0 {
            return fail("burn_in_steps must be positive".into());
        }
        if self.bins == 0 {
            return fail("bins must be positive".into());
        }
        if self.functionals.is_empty() {
            return fail("functionals must list at least one functional".into());
        }
        if !self.kick.iter().all(|k| k.is_finite()) {
            return fail("kick must be finite".into());
        }
        if let Some(eps) = self.epsilon {
            positive("epsilon", eps)?;
        }
        if self.experiment == ExperimentId::Exp5 {
            let n_ref = step_count(self.horizon, self.dt_ref)
                .map_err(|_| Error::ConfigConstraint("horizon is not a multiple of dt_ref".into()))?;
            let n_num = step_count(self.horizon, self.dts[0]).expect("checked above");
            if n_ref % n_num != 0 {
                return fail(format!("dt {} is not a multiple of dt_ref {}", self.dts[0], self.dt_ref));
            }
        }
        Ok(())
    }

    /// Key-value text that parses back to this configuration.
    pub fn to_text(&self) -> String {
        let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(", ");
        let tau = self
            .functionals
            .iter()
            .find_map(|f| match f {
                FunctionalId::F5 { tau } => Some(*tau),
                _ => None,
            })
            .unwrap_or(FunctionalId::DEFAULT_TAU);
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k} = {v}").expect("writing to a String");
        kv("experiment", self.experiment.to_string());
        kv("preset", self.preset.to_string());
        kv("n_particles", self.n_particles.to_string());
        kv("box_side", self.box_side.to_string());
        kv("r_cutoff", self.r_cutoff.to_string());
        kv("beta", self.beta.to_string());
        kv("gamma", self.gamma.to_string());
        kv("langevin_dt", self.langevin_dt.to_string());
        kv("burn_in_steps", self.burn_in_steps.to_string());
        kv("dts", list(&self.dts));
        kv("horizon", self.horizon.to_string());
        kv("ensemble", self.ensemble.to_string());
        kv("kick", list(&self.kick));
        kv("kick_particle", self.kick_particle.to_string());
        kv("particle", self.particle.to_string());
        kv(
            "functionals",
            self.functionals.iter().map(|f| f.name()).collect::<Vec<_>>().join(", "),
        );
        kv("tau", tau.to_string());
        kv("bins", self.bins.to_string());
        kv("seed", self.seed.to_string());
        kv("out_dir", self.out_dir.display().to_string());
        kv("dt_ref", self.dt_ref.to_string());
        kv("epsilon", self.epsilon.map_or("auto".into(), |e| e.to_string()));
        s
    }
}

/// Overrides applied on top of the file, as given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub experiment: Option<ExperimentId>,
    pub preset: Option<Preset>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

/// Parses a key-value document onto the defaults of the `Paper` preset.
pub fn validate_config(raw: &str) -> Result<ExperimentConfig> {
    validate_config_with(raw, &Overrides::default())
}

/// Parses `key = value` lines; `#` starts a comment. The preset and
/// experiment select the defaults, then every other key overrides them.
pub fn validate_config_with(raw: &str, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (idx, line) in raw.lines().enumerate() {
        let line_no = idx + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::ConfigParse {
                line: line_no,
                message: format!("expected `key = value`, found `{content}`"),
            });
        };
        let key = key.trim().to_string();
        if entries.insert(key.clone(), (line_no, value.trim().to_string())).is_some() {
            return Err(Error::ConfigParse {
                line: line_no,
                message: format!("duplicate key `{key}`"),
            });
        }
    }

    let take = |entries: &mut BTreeMap<String, (usize, String)>, key: &str| entries.remove(key);
    let bad = |line: usize, key: &str, msg: String| Error::ConfigParse {
        line,
        message: format!("field `{key}`: {msg}"),
    };

    let preset = match (overrides.preset, take(&mut entries, "preset")) {
        (Some(p), _) => p,
        (None, Some((line, v))) => v.parse().map_err(|m| bad(line, "preset", m))?,
        (None, None) => Preset::Paper,
    };
    let experiment = match (overrides.experiment, take(&mut entries, "experiment")) {
        (Some(e), _) => e,
        (None, Some((line, v))) => v.parse().map_err(|m| bad(line, "experiment", m))?,
        (None, None) => ExperimentId::Exp3,
    };
    let mut cfg = ExperimentConfig::preset(preset, experiment);

    let tau = match take(&mut entries, "tau") {
        Some((line, v)) => v.parse::<f64>().map_err(|e| bad(line, "tau", e.to_string()))?,
        None => FunctionalId::DEFAULT_TAU,
    };
    if !(tau > 0.0) {
        return Err(Error::ConfigConstraint(format!("tau = {tau} must be positive")));
    }
    for f in cfg.functionals.iter_mut() {
        if let FunctionalId::F5 { tau: t } = f {
            *t = tau;
        }
    }

    for (key, (line, value)) in entries {
        let float = || value.parse::<f64>().map_err(|e| bad(line, &key, e.to_string()));
        let int = || value.parse::<usize>().map_err(|e| bad(line, &key, e.to_string()));
        let floats = || -> Result<Vec<f64>> {
            value
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|e| bad(line, &key, e.to_string())))
                .collect()
        };
        match key.as_str() {
            "n_particles" => cfg.n_particles = int()?,
            "box_side" => cfg.box_side = float()?,
            "r_cutoff" => cfg.r_cutoff = float()?,
            "beta" => cfg.beta = float()?,
            "gamma" => cfg.gamma = float()?,
            "langevin_dt" => cfg.langevin_dt = float()?,
            "burn_in_steps" => cfg.burn_in_steps = int()?,
            "dts" | "dt" => cfg.dts = floats()?,
            "horizon" | "T" => cfg.horizon = float()?,
            "ensemble" => cfg.ensemble = int()?,
            "kick" => {
                let v = floats()?;
                cfg.kick = v
                    .try_into()
                    .map_err(|_| bad(line, &key, "expected two components".into()))?;
            }
            "kick_particle" => cfg.kick_particle = int()?,
            "particle" => cfg.particle = int()?,
            "functionals" => {
                cfg.functionals = value
                    .split(',')
                    .map(|s| {
                        FunctionalId::parse(s, tau)
                            .ok_or_else(|| bad(line, &key, format!("unknown functional `{}`", s.trim())))
                    })
                    .collect::<Result<_>>()?;
            }
            "bins" => cfg.bins = int()?,
            "seed" => cfg.seed = value.parse().map_err(|e: std::num::ParseIntError| bad(line, &key, e.to_string()))?,
            "out_dir" => cfg.out_dir = PathBuf::from(&value),
            "dt_ref" => cfg.dt_ref = float()?,
            "epsilon" => cfg.epsilon = if value == "auto" { None } else { Some(float()?) },
            _ => return Err(bad(line, &key, "unknown key".into())),
        }
    }
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = &overrides.out_dir {
        cfg.out_dir = dir.clone();
    }
    cfg.check()?;
    Ok(cfg)
}
