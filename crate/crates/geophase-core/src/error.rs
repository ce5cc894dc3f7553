//! Crate-wide error type.

use core::fmt;

/// Errors raised by the algorithmic layer.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The anti-Hermiticity precondition of a skew exponential was violated.
    NotAntiHermitian { residual: f64, bound: f64 },
    /// A 2x2 operation received a 3x3 matrix (or vice versa).
    DimensionMismatch { expected: usize, got: usize },
    /// Physical parameters out of range (Ω ≤ 0, negative decay, ...).
    InvalidParams(&'static str),
    /// The requested chart of the spin-1/2 frame is singular at this field
    /// (B_z → ±B divides by √(B ∓ B_z)).
    ChartSingularity { b: f64, bz: f64 },
    /// A loop specification violates its parameter ranges.
    InvalidSpec(&'static str),
    /// A parameter loop does not end where it starts.
    NotClosed,
    /// A discretization step exceeds the integrator's accuracy domain.
    StepTooLarge { step: f64, max: f64 },
    /// A state vector is not normalized to the required tolerance.
    NotNormalized { norm: f64 },
    /// A time outside the schedule window [0, T] was requested.
    InvalidTime { t: f64, duration: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotAntiHermitian { residual, bound } => write!(
                f,
                "matrix is not anti-Hermitian: ||M + M'|| = {residual:.3e} exceeds {bound:.3e}"
            ),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}x{expected}, got {got}x{got}")
            }
            Error::InvalidParams(what) => write!(f, "invalid parameters: {what}"),
            Error::ChartSingularity { b, bz } => write!(
                f,
                "chart singular at B_z = {bz:.6e} with |B| = {b:.6e} (pole of the frame)"
            ),
            Error::InvalidSpec(what) => write!(f, "invalid loop spec: {what}"),
            Error::NotClosed => write!(f, "parameter loop is not closed"),
            Error::StepTooLarge { step, max } => {
                write!(f, "step {step:.6e} exceeds the allowed {max:.6e}")
            }
            Error::NotNormalized { norm } => {
                write!(f, "state norm {norm:.12} differs from 1 beyond tolerance")
            }
            Error::InvalidTime { t, duration } => {
                write!(f, "time {t:.6e} outside the schedule window [0, {duration:.6e}]")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
