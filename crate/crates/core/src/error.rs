use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Every failure the charting pipeline can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Error {
    /// Non-square or non-Hermitian input to the eigensolver.
    InvalidMatrix,
    EmptyInput,
    /// Operand shapes disagree.
    ShapeMismatch,
    InvalidConfig(&'static str),
    /// Too few UEs to draw at least one point on every glyph stroke.
    GlyphTooSparse,
    /// A ray with non-positive length.
    DegenerateGeometry,
    InvalidAngle,
    InvalidRange,
    /// Every eigenvalue fell in the signal subspace.
    NoNoiseSubspace,
    /// The CSI carries no energy.
    NoSignal,
    InsufficientSubcarriers,
    DegenerateInput,
    SingularFit,
    SubarrayTooLarge,
    MissingModel,
    DegenerateFeatures,
    DuplicatePoints,
    TooFewPoints,
    InvalidK,
}

impl Error {
    /// Stable machine-readable name, used in CSV error flags.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidMatrix => "InvalidMatrix",
            Error::EmptyInput => "EmptyInput",
            Error::ShapeMismatch => "ShapeMismatch",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::GlyphTooSparse => "GlyphTooSparse",
            Error::DegenerateGeometry => "DegenerateGeometry",
            Error::InvalidAngle => "InvalidAngle",
            Error::InvalidRange => "InvalidRange",
            Error::NoNoiseSubspace => "NoNoiseSubspace",
            Error::NoSignal => "NoSignal",
            Error::InsufficientSubcarriers => "InsufficientSubcarriers",
            Error::DegenerateInput => "DegenerateInput",
            Error::SingularFit => "SingularFit",
            Error::SubarrayTooLarge => "SubarrayTooLarge",
            Error::MissingModel => "MissingModel",
            Error::DegenerateFeatures => "DegenerateFeatures",
            Error::DuplicatePoints => "DuplicatePoints",
            Error::TooFewPoints => "TooFewPoints",
            Error::InvalidK => "InvalidK",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidMatrix => f.write_str("matrix is not square Hermitian"),
            Error::EmptyInput => f.write_str("empty input"),
            Error::ShapeMismatch => f.write_str("operand shapes do not match"),
            Error::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
            Error::GlyphTooSparse => f.write_str("too few UEs to draw the VIP glyph"),
            Error::DegenerateGeometry => f.write_str("ray length must be positive"),
            Error::InvalidAngle => f.write_str("angle must lie in [0, 180] degrees"),
            Error::InvalidRange => f.write_str("range must be non-negative"),
            Error::NoNoiseSubspace => f.write_str("no eigenvalue fell below the noise threshold"),
            Error::NoSignal => f.write_str("CSI carries no energy"),
            Error::InsufficientSubcarriers => f.write_str("at least two subcarriers are required"),
            Error::DegenerateInput => f.write_str("channel magnitudes sum to zero"),
            Error::SingularFit => f.write_str("regression needs at least two distinct inputs"),
            Error::SubarrayTooLarge => f.write_str("smoothing subarray exceeds the CSI matrix"),
            Error::MissingModel => f.write_str("no fitted regression model supplied"),
            Error::DegenerateFeatures => f.write_str("feature covariance has rank below two"),
            Error::DuplicatePoints => f.write_str("duplicate points remain after jitter"),
            Error::TooFewPoints => f.write_str("not enough points"),
            Error::InvalidK => f.write_str("neighborhood size K out of range"),
        }
    }
}

impl core::error::Error for Error {}
