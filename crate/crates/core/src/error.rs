use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension {got} (need at least {min})")]
    InvalidDimension { got: usize, min: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("negative rate {0}")]
    NegativeRate(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("pump {pump:.6} is at or above the parametric threshold {threshold:.6}")]
    AboveThreshold { pump: f64, threshold: f64 },
    #[error("classical field equation has three real branches (bistable regime)")]
    Bifurcation,
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
    #[error("steady state is not unique (relative pivot {0:e})")]
    NonUniqueSteadyState(f64),
    #[error("steady-state residual {0:e} above tolerance")]
    SteadyStateResidual(f64),
    #[error("step size underflow at t = {0}")]
    StepSizeUnderflow(f64),
    #[error("probe response nonlinear by {0:.4} at the smallest probe tried")]
    ProbeTooStrong(f64),
    #[error("unphysical moments: minimal quadrature variance {0}")]
    UnphysicalMoments(f64),
    #[error("frequency quadrature did not converge")]
    QuadratureNonConvergence,
    #[error("filter grid under-resolved: {points} points across the support (need 32)")]
    UnderResolvedGrid { points: usize },
    #[error("correlator time span {span} shorter than 10/kappa_tot = {needed}")]
    InsufficientDecay { span: f64, needed: f64 },
    #[error("moment order {0} exceeds the supported maximum of 4")]
    OrderTooHigh(usize),
    #[error("missing moment <(D^dag)^{0} D^{1}>")]
    MissingMoment(usize, usize),
    #[error("covariance matrix is not positive definite")]
    NonPositiveCovariance,
    #[error("singular matrix")]
    Singular,
}

pub type Result<T> = core::result::Result<T, Error>;
