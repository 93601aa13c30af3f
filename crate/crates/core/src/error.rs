//! Error types for model construction and simulation.

use std::fmt;

/// A configuration was rejected at construction time. Each variant names
/// the violated condition so callers can report the failed assumption.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// A frame length that must be strictly positive was not.
    NonPositiveLength { name: &'static str, value: f64 },
    /// An anchor offset `b1`/`b2` reached or passed the base length, which
    /// would flip the sign of the along-base coefficient of segment (i,1).
    AnchorBeyondBase {
        name: &'static str,
        value: f64,
        base: f64,
    },
    /// `compute_alpha` was called with the zero vector.
    DegenerateDirection,
    /// A segment has `sqrt(a^2 + c^2) == |b|`: the two routing points can
    /// coincide and the segment length is not bounded away from zero.
    SegmentDegenerate {
        muscle: u8,
        segment: u8,
        rho: f64,
        b_abs: f64,
    },
    /// A derived coefficient has the wrong sign for its segment.
    CoefficientSign {
        what: &'static str,
        muscle: u8,
        segment: u8,
        value: f64,
    },
    /// A dynamics parameter that must be strictly positive was not.
    NonPositiveParam { name: &'static str, value: f64 },
    /// Penalty bounds do not bracket the target angle.
    PenaltyBounds {
        theta_min: f64,
        theta_d: f64,
        theta_max: f64,
    },
    /// The admissible range for the domain margin `theta0` is empty, or a
    /// pinned `theta0` falls outside it.
    Theta0OutOfRange { theta0: f64, bound: f64 },
    /// A value that must be finite was NaN or infinite.
    NonFinite { name: &'static str },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::NonPositiveLength { name, value } => {
                write!(f, "length `{name}` must be > 0, got {value}")
            }
            ModelError::AnchorBeyondBase { name, value, base } => {
                write!(f, "anchor offset `{name}` = {value} must stay below the base length {base}")
            }
            ModelError::DegenerateDirection => {
                write!(f, "phase angle undefined for the zero direction (a, c) = (0, 0)")
            }
            ModelError::SegmentDegenerate {
                muscle,
                segment,
                rho,
                b_abs,
            } => write!(
                f,
                "segment ({muscle},{segment}): sqrt(a^2+c^2) = {rho} equals |b| = {b_abs}; \
                 the segment length is not bounded away from zero"
            ),
            ModelError::CoefficientSign {
                what,
                muscle,
                segment,
                value,
            } => write!(
                f,
                "segment ({muscle},{segment}): coefficient `{what}` = {value} has the wrong sign"
            ),
            ModelError::NonPositiveParam { name, value } => {
                write!(f, "parameter `{name}` must be > 0, got {value}")
            }
            ModelError::PenaltyBounds {
                theta_min,
                theta_d,
                theta_max,
            } => write!(
                f,
                "penalty bounds must satisfy theta_min < theta_d < theta_max, \
                 got ({theta_min}, {theta_d}, {theta_max})"
            ),
            ModelError::Theta0OutOfRange { theta0, bound } => write!(
                f,
                "theta0 = {theta0} outside the admissible range (0, {bound})"
            ),
            ModelError::NonFinite { name } => write!(f, "`{name}` must be finite"),
        }
    }
}

impl std::error::Error for ModelError {}
