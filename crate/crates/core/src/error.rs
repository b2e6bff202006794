use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid separation r = {0}: must be positive")]
    InvalidSeparation(f64),

    #[error("particles {i} and {j} overlap (zero separation)")]
    ParticleOverlap { i: usize, j: usize },

    #[error("numerical instability at step {step}: non-finite state")]
    Instability { step: usize },

    #[error("thermostat instability during burn-in at step {step}; reduce langevin_dt")]
    ThermostatInstability { step: usize },

    #[error("index {index} out of range for {len} particles")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("path grids differ and cannot be aligned: {0}")]
    GridMismatch(String),

    #[error("degenerate angle: an increment of the path is zero")]
    DegenerateAngle,

    #[error("metric mismatch: {0}")]
    MetricMismatch(String),

    #[error("non-finite distance between points {i} and {j}")]
    NonFiniteDistance { i: usize, j: usize },

    #[error("unequal sample sizes {left} and {right}")]
    UnequalSampleSizes { left: usize, right: usize },

    #[error("bounded-Lipschitz program did not converge; duality gap {gap:e}")]
    NonConvergence { gap: f64 },

    #[error("histogram bin edges differ")]
    EdgeMismatch,

    #[error("infeasible partition: {0}")]
    InfeasiblePartition(String),

    #[error("no perfect matching: set of size {set_size} has {neighborhood_size} neighbours")]
    NoPerfectMatching {
        violating_set: Vec<usize>,
        neighborhood: Vec<usize>,
        set_size: usize,
        neighborhood_size: usize,
    },

    #[error("config error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("config constraint violated: {0}")]
    ConfigConstraint(String),

    #[error("simulation at dt = {dt} failed: {source}")]
    Simulation {
        dt: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for failures caused by the numerics (blowup, overlap) rather than
    /// by bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Instability { .. }
            | Error::ThermostatInstability { .. }
            | Error::ParticleOverlap { .. } => true,
            Error::Simulation { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    /// Process exit status for the command-line driver: 2 for bad
    /// configuration, 3 for numerical failure, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::ConfigParse { .. } | Error::ConfigConstraint(_) => 2,
            e if e.is_numerical() => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
