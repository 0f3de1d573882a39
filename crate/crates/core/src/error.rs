use thiserror::Error;

/// Errors produced by the construction and analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial degree {degree} exceeds the requested reversal length {n}")]
    InvalidDegree { degree: usize, n: usize },

    #[error("rational function has a pole at the expansion point {point}")]
    PoleAtExpansionPoint { point: String },

    #[error("synthetic division left a residual of {residual:.3e} (tolerance {tolerance:.3e}); input is inconsistent")]
    DeflationResidual { residual: f64, tolerance: f64 },

    #[error("the zero polynomial has no roots")]
    ZeroPolynomial,

    #[error("denominator root {root} has modulus {modulus:.6} inside or too close to the closed unit disc")]
    PoleInClosedDisc { root: String, modulus: f64 },

    #[error("trigonometric polynomial is not strictly positive on the circle: {detail}")]
    DegenerateFactorization { detail: String },

    #[error("spectral factorization root pairing failed: {detail}")]
    RootPairingFailure { detail: String },

    #[error("weight polynomial vanishes at its own point; the generator is not a strict 2m-isometry")]
    NotStrict,

    #[error("characteristic polynomial roots violate the required spectrum location: {detail}")]
    InvalidSpectrum { detail: String },

    #[error("dual basis interpolation system is numerically singular at point {point}")]
    DegenerateDualBasis { point: usize },

    #[error("Grammian is not positive definite after symmetrization (condition estimate {condition:.3e})")]
    IllConditionedGrammian { condition: f64 },

    #[error("defect operator has a negative eigenvalue {eigenvalue:.3e} beyond tolerance")]
    NotPositiveDefect { eigenvalue: f64 },

    #[error("kernel evaluation point {point} lies outside the open unit disc")]
    OutOfDomain { point: String },

    #[error("Moebius parameter has norm {norm:.6} >= 1")]
    OutOfBall { norm: f64 },

    #[error("backward shift image leaves the model space (residual {residual:.3e})")]
    NotInvariant { residual: f64 },

    #[error("no isometry order up to {max_order} detected")]
    NotDetected { max_order: usize },

    #[error("defect decomposition failed: {detail}")]
    DecompositionFailure { detail: String },

    #[error("dimension mismatch: {detail}")]
    DimensionMismatch { detail: String },

    #[error("invalid space specification: {detail}")]
    InvalidSpec { detail: String },

    #[error("internal consistency check failed: {detail}")]
    Internal { detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
