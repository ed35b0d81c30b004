use thiserror::Error;

/// Errors raised by the walk, noise, observable and ensemble layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("lattice must have an even number of sites >= 2, got {0}")]
    OddSites(usize),
    #[error("injection port {port} is outside 1..={sites}")]
    InjectionOutOfRange { port: usize, sites: usize },
    #[error("embed dimension {embed_dim} is smaller than the lattice ({sites} sites)")]
    EmbedTooSmall { embed_dim: usize, sites: usize },
    #[error("step {step} is outside 1..={steps}")]
    StepOutOfRange { step: usize, steps: usize },
    #[error("phase must be finite, got {0}")]
    NonFinitePhase(f64),
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("state has {got} modes, lattice has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("phase schedule has {len} entries but the walk needs {steps}")]
    ScheduleTooShort { len: usize, steps: usize },
    #[error("invalid noise interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("dynamic noise needs at least one step")]
    NoSteps,
    #[error("unknown fixture schedule `{0}`")]
    UnknownFixture(String),
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("distributions differ in shape: {0}")]
    ShapeMismatch(String),
    #[error("series needs at least {needed} points, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("a linear fit needs at least 2 peaks, got {0}")]
    TooFewPeaks(usize),
    #[error("variance at step {step} is not positive ({value})")]
    NonPositiveVariance { step: usize, value: f64 },
    #[error("invalid scaling window [{lo}, {hi}]")]
    InvalidWindow { lo: usize, hi: usize },
    #[error("ensemble needs at least one configuration")]
    NoConfigurations,
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
