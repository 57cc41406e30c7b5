//! Error type shared by all solver modules.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the solver stack.
///
/// Variants are grouped by failure class so the CLI can map them onto
/// exit codes: configuration problems, domain violations, and numerical
/// failures are kept distinguishable.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A physical or numerical parameter violates its documented domain.
    InvalidParameter {
        name: &'static str,
        message: String,
    },
    /// Transform evaluation was requested too close to a pole.
    PoleProximity {
        p: (f64, f64),
        denom_magnitude: f64,
        scale: f64,
    },
    /// The real pole pair magnitude coincides with a modal pole magnitude,
    /// which the term-by-term closed forms cannot represent.
    DegeneratePoles { modal_index: u32, location: f64 },
    /// A residue contour would enclose more than one pole.
    ContourGeometry {
        requested_radius: f64,
        max_radius: f64,
    },
    /// An iterative scheme failed to converge; carries the last two iterates.
    NonConvergence {
        what: &'static str,
        last: f64,
        previous: f64,
    },
    /// A hyperbolic factor would overflow; reports the usable time horizon.
    Overflow { argument: f64, horizon: f64 },
    /// NaN or infinity appeared during time stepping.
    Divergence { step: usize },
    /// The damping regime is outside the underdamped closed form.
    UnsupportedRegime { omega1_sq: f64 },
    /// A quantity that must be real carries a non-negligible imaginary part.
    ResidualImaginary { real: f64, imag: f64 },
    /// The operation is only defined for the published boundary convention.
    UnsupportedBoundaryMode { operation: &'static str },
    /// No signal above the noise floor was found (arrival detection).
    NoSignal { what: &'static str },
    /// Configuration file error with key and line context.
    Config {
        line: usize,
        key: String,
        message: String,
    },
    /// A mandatory section of the validation report is missing or duplicated.
    IncompleteReport { message: String },
    /// File-system failure while reading or writing artifacts.
    Io(String),
}

impl Error {
    pub fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }

    pub fn config(line: usize, key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            line,
            key: key.into(),
            message: message.into(),
        }
    }

    /// True for failures of numerical machinery (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::PoleProximity { .. }
                | Error::DegeneratePoles { .. }
                | Error::ContourGeometry { .. }
                | Error::NonConvergence { .. }
                | Error::Overflow { .. }
                | Error::Divergence { .. }
                | Error::ResidualImaginary { .. }
                | Error::NoSignal { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, message } => {
                write!(f, "invalid parameter `{name}`: {message}")
            }
            Error::PoleProximity {
                p,
                denom_magnitude,
                scale,
            } => write!(
                f,
                "evaluation too close to a transform pole at p = {} + {}i \
                 (|denominator| = {:.3e}, scale = {:.3e})",
                p.0, p.1, denom_magnitude, scale
            ),
            Error::DegeneratePoles {
                modal_index,
                location,
            } => write!(
                f,
                "degenerate pole catalog: real pair magnitude {location} coincides with \
                 modal index {modal_index}; term-by-term closed forms assume simple, \
                 non-coincident poles"
            ),
            Error::ContourGeometry {
                requested_radius,
                max_radius,
            } => write!(
                f,
                "residue contour radius {requested_radius} would enclose a second pole \
                 (must be below {max_radius})"
            ),
            Error::NonConvergence {
                what,
                last,
                previous,
            } => write!(
                f,
                "{what} did not converge (last two iterates {last:.9e}, {previous:.9e})"
            ),
            Error::Overflow { argument, horizon } => write!(
                f,
                "hyperbolic argument {argument:.3e} exceeds 700; evaluation is limited \
                 to t <= {horizon:.6e} s"
            ),
            Error::Divergence { step } => {
                write!(f, "non-finite field value detected at step {step}")
            }
            Error::UnsupportedRegime { omega1_sq } => write!(
                f,
                "oscillator is not underdamped (omega1^2 = {omega1_sq:.6e} <= 0); \
                 only the underdamped closed form is provided"
            ),
            Error::ResidualImaginary { real, imag } => write!(
                f,
                "residue sum must be real; got {real:.6e} + {imag:.6e}i"
            ),
            Error::UnsupportedBoundaryMode { operation } => write!(
                f,
                "{operation} is only defined for the `paper` boundary convention"
            ),
            Error::NoSignal { what } => write!(f, "no signal found in {what}"),
            Error::Config { line, key, message } => {
                write!(f, "config error at line {line}, key `{key}`: {message}")
            }
            Error::IncompleteReport { message } => {
                write!(f, "incomplete validation report: {message}")
            }
            Error::Io(message) => write!(f, "i/o error: {message}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
