use thiserror::Error;

/// Errors reported by state constructors, validators and channel operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be nonnegative, got {value}")]
    NegativeParameter { name: &'static str, value: f64 },

    #[error("expected {expected} modes, got {got}")]
    ModeCountMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("covariance matrix is not symmetric (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("covariance matrix violates the uncertainty relation (min eigenvalue {min_eigenvalue:e})")]
    Unphysical { min_eigenvalue: f64 },

    #[error("matrix does not preserve the symplectic form (max deviation {max_deviation:e})")]
    NotSymplectic { max_deviation: f64 },

    #[error("mode index {index} out of range for {n_modes} modes")]
    ModeOutOfRange { index: usize, n_modes: usize },

    #[error("beamsplitter requires two distinct modes, got index {0} twice")]
    EqualModes(usize),

    #[error("Fock cutoff must be at least 1")]
    InvalidCutoff,

    #[error("truncation deficit {achieved:e} exceeds requested bound {bound:e}; increase the cutoff")]
    TruncationDeficit { achieved: f64, bound: f64 },

    #[error("generating-function argument must satisfy |s| <= 1, got {0}")]
    GeneratingArgOutOfRange(f64),

    #[error("normally ordered covariance is degenerate (min eigenvalue {min_eigenvalue:e}); the P distribution is a delta-ring limit with no density")]
    DegenerateDistribution { min_eigenvalue: f64 },

    #[error("resource is not strictly classical (min noise eigenvalue {min_eigenvalue:e}); use the exact channel instead of the displacement average")]
    NotStrictlyClassical { min_eigenvalue: f64 },

    #[error("measured-quadrature covariance block is singular (det {det:e})")]
    SingularMeasurement { det: f64 },

    #[error("ensemble needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
