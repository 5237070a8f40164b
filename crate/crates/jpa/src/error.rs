use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config: {0}")]
    Config(String),
    #[error("config syntax: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("histogram file: {0}")]
    Format(String),
    #[error("unknown figure {0:?}")]
    UnknownFigure(String),
    #[error(transparent)]
    Core(#[from] jpa_core::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

/// Short stable code written into result rows for a failed point.
pub fn error_code(e: &jpa_core::Error) -> &'static str {
    use jpa_core::Error::*;
    match e {
        InvalidDimension { .. } | DimensionMismatch(..) => "bad_dimension",
        NegativeRate(_) | InvalidParameter(_) => "invalid_parameter",
        InvalidState(_) => "invalid_state",
        AboveThreshold { .. } => "above_threshold",
        Bifurcation => "bistable",
        NoConvergence(_) => "no_convergence",
        NonUniqueSteadyState(_) => "steady_state_not_unique",
        SteadyStateResidual(_) => "steady_state_residual",
        StepSizeUnderflow(_) => "step_underflow",
        ProbeTooStrong(_) => "probe_nonlinear",
        UnphysicalMoments(_) => "unphysical_moments",
        QuadratureNonConvergence => "quadrature",
        UnderResolvedGrid { .. } => "under_resolved",
        InsufficientDecay { .. } => "insufficient_decay",
        OrderTooHigh(_) | MissingMoment(..) => "moment_order",
        NonPositiveCovariance => "covariance",
        Singular => "singular",
    }
}
