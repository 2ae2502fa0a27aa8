use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("photon number {n} does not fit in truncation dimension {dim}")]
    FockIndex { n: usize, dim: usize },

    #[error(
        "truncation: tail mass {tail_mass:.3e} exceeds {limit:.0e} at dim {dim}{}",
        min_dim.map(|d| format!("; minimal adequate dim is {d}")).unwrap_or_default()
    )]
    InsufficientDimension {
        dim: usize,
        tail_mass: f64,
        limit: f64,
        min_dim: Option<usize>,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("state is not normalized (trace {trace:.12})")]
    NotNormalized { trace: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge: {quantity} changed from {coarse:.10} to {fine:.10} \
         (relative {relative:.2e}) on node doubling"
    )]
    NonConvergence {
        quantity: &'static str,
        coarse: f64,
        fine: f64,
        relative: f64,
    },

    #[error("no samples satisfied |x_r| < {x0}; raise x0 or n_samples (had {n_samples})")]
    EmptySelection { x0: f64, n_samples: usize },

    #[error("too few samples for estimation: {have} < {need}")]
    TooFewSamples { have: usize, need: usize },

    #[error("unsupported value: {0}")]
    Unsupported(String),

    #[error("grids do not match")]
    GridMismatch,

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
