//! Error type shared by all segi-core operations.

use core::fmt;

/// Errors reported for rejected inputs and degenerate states.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two images that must share dimensions do not.
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    /// Pixel buffer length does not match `width * height`.
    PixelCountMismatch { expected: usize, actual: usize },
    /// A pixel value fell outside `[0, 1]` (or was not finite).
    PixelOutOfRange { index: usize, value: f64 },
    /// Zero-sized images are not representable.
    EmptyImage,
    /// Binary fill fraction must lie strictly inside (0, 1).
    InvalidFill(f64),
    /// Noise standard deviation must be finite and nonnegative.
    InvalidSigma(f64),
    /// All initial signals (or all initial pattern weights) were zero, so
    /// the cost-function baseline is undefined.
    DegenerateBaseline,
    /// Parent selection needs at least two members.
    PopulationTooSmall(usize),
    /// Correlation needs at least two measurements.
    TooFewMeasurements(usize),
    /// Pattern and signal lists of a measurement set differ in length.
    MeasurementLengthMismatch { patterns: usize, signals: usize },
    /// A primitive's geometry does not fit inside the requested frame.
    GeometryOutOfBounds,
    /// Image is smaller than the filter or metric window.
    ImageTooSmall {
        width: usize,
        height: usize,
        min: usize,
    },
    /// A configuration invariant was violated.
    InvalidConfig(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { left, right } => write!(
                f,
                "dimension mismatch: {}x{} vs {}x{}",
                left.0, left.1, right.0, right.1
            ),
            Error::PixelCountMismatch { expected, actual } => write!(
                f,
                "pixel count mismatch: expected {expected}, got {actual}"
            ),
            Error::PixelOutOfRange { index, value } => {
                write!(f, "pixel {index} out of [0, 1]: {value}")
            }
            Error::EmptyImage => write!(f, "image dimensions must be at least 1x1"),
            Error::InvalidFill(v) => write!(f, "fill fraction must be in (0, 1), got {v}"),
            Error::InvalidSigma(v) => write!(f, "noise sigma must be finite and >= 0, got {v}"),
            Error::DegenerateBaseline => write!(
                f,
                "degenerate baseline: initial population produced no signal"
            ),
            Error::PopulationTooSmall(n) => {
                write!(f, "population of {n} is too small for parent selection")
            }
            Error::TooFewMeasurements(n) => {
                write!(f, "correlation needs at least 2 measurements, got {n}")
            }
            Error::MeasurementLengthMismatch { patterns, signals } => write!(
                f,
                "measurement set has {patterns} patterns but {signals} signals"
            ),
            Error::GeometryOutOfBounds => write!(f, "primitive geometry does not fit the frame"),
            Error::ImageTooSmall { width, height, min } => write!(
                f,
                "image {width}x{height} is smaller than the {min}x{min} window"
            ),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
