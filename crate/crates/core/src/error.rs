use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the numerical routines can report.
///
/// Variants fall in two families: [`Error::is_validation`] marks bad input
/// (the caller's fault), everything else is a numerical failure detected
/// while computing.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: |z| = {modulus} exceeds declared radius {radius}")]
    Domain { modulus: f64, radius: f64 },

    #[error("inconsistent samples: two-radius estimates of mode {mode} differ by {difference:e} (tolerance {tolerance:e})")]
    InconsistentSamples {
        mode: usize,
        difference: f64,
        tolerance: f64,
    },

    #[error("negative coefficients: mode {mode} has value {re:e}{im:+e}i")]
    NegativeCoefficients { mode: usize, re: f64, im: f64 },

    #[error("insufficient truncation: tail mass ratio {ratio:e} at M = {modes} (limit {limit:e})")]
    InsufficientTruncation { modes: usize, ratio: f64, limit: f64 },

    #[error("degenerate spectrum: |s_{odd}^2 - s_{even}^2| = {gap:e} below threshold {threshold:e}")]
    DegenerateSpectrum {
        odd: usize,
        even: usize,
        gap: f64,
        threshold: f64,
    },

    #[error("singular matrix: condition estimate {condition:e} exceeds {limit:e}")]
    SingularMatrix { condition: f64, limit: f64 },

    #[error("angles not zero: psi_{index} = {value}")]
    AnglesNotZero { index: usize, value: f64 },

    #[error("non-positive summand {index} = {value:e} in C1 closed form")]
    NonPositiveSummand { index: usize, value: f64 },

    #[error("blowup detected at t = {time}: L2 norm drifted by {relative_drift:e}")]
    BlowupDetected { time: f64, relative_drift: f64 },

    #[error("near pole: zeta = {re}{im:+}i lies within {distance:e} of pole {pole}")]
    NearPole {
        re: f64,
        im: f64,
        pole: f64,
        distance: f64,
    },

    #[error("zero on contour: min modulus {min_modulus:e} on radius {radius}")]
    ZeroOnContour { radius: f64, min_modulus: f64 },

    #[error("argument not resolved on radius {radius}: max increment {max_increment} with {nodes} nodes")]
    UnresolvedPhase {
        radius: f64,
        nodes: usize,
        max_increment: f64,
    },

    #[error("nonzero index {index}: symbol is not factorizable")]
    NonzeroIndex { index: i64 },

    #[error("singular truncation at N = {n}: smallest singular value {smallest:e}, norm {norm:e}")]
    SingularTruncation { n: usize, smallest: f64, norm: f64 },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors caused by malformed input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::Domain { .. })
    }

    /// Stable short name of the failing check.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::Domain { .. } => "Domain",
            Error::InconsistentSamples { .. } => "InconsistentSamples",
            Error::NegativeCoefficients { .. } => "NegativeCoefficients",
            Error::InsufficientTruncation { .. } => "InsufficientTruncation",
            Error::DegenerateSpectrum { .. } => "DegenerateSpectrum",
            Error::SingularMatrix { .. } => "SingularMatrix",
            Error::AnglesNotZero { .. } => "AnglesNotZero",
            Error::NonPositiveSummand { .. } => "NonPositiveSummand",
            Error::BlowupDetected { .. } => "BlowupDetected",
            Error::NearPole { .. } => "NearPole",
            Error::ZeroOnContour { .. } => "ZeroOnContour",
            Error::UnresolvedPhase { .. } => "UnresolvedPhase",
            Error::NonzeroIndex { .. } => "NonzeroIndex",
            Error::SingularTruncation { .. } => "SingularTruncation",
        }
    }
}
