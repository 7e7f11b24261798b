use core::fmt;

/// Failures reported by the analysis routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A model parameter is outside its admissible range.
    InvalidParameter { name: &'static str, value: f64 },
    /// A state coordinate is negative.
    InvalidState { x: f64, y: f64 },
    /// The lottery map with `a = 0` is singular at the origin.
    Singular,
    /// An input or an intermediate value is NaN or infinite.
    NonFinite,
    /// A coordinate exceeded the overflow guard during iteration.
    Overflow { step: usize },
    /// `D_eps` is only defined for `r1 != r2`.
    EqualGrowthRates,
    /// The Ricker map has no 2-cycle for `r2 <= 2`.
    NoBoundaryCycle { r2: f64 },
    /// The closed-form interior 2-cycle does not exist or leaves the open quadrant.
    NoInteriorOrbit(&'static str),
    /// The operation's precondition does not hold for these inputs.
    Precondition(&'static str),
    /// The operation is not defined for this map family.
    Unsupported(&'static str),
    /// A stored orbit no longer satisfies the 2-cycle equations.
    StaleOrbit { residual: f64 },
    /// An iterative solve did not reach its tolerance.
    NotConverged(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, value } => {
                write!(f, "invalid parameter {name} = {value}")
            }
            Error::InvalidState { x, y } => write!(f, "state ({x}, {y}) has a negative coordinate"),
            Error::Singular => f.write_str("the lottery map is singular at the origin"),
            Error::NonFinite => f.write_str("non-finite value"),
            Error::Overflow { step } => write!(f, "coordinate overflow at step {step}"),
            Error::EqualGrowthRates => f.write_str("invariant region requires r1 != r2"),
            Error::NoBoundaryCycle { r2 } => {
                write!(f, "no Ricker 2-cycle: r2 = {r2} must exceed 2")
            }
            Error::NoInteriorOrbit(why) => write!(f, "no interior 2-cycle: {why}"),
            Error::Precondition(why) => write!(f, "precondition violated: {why}"),
            Error::Unsupported(why) => write!(f, "unsupported: {why}"),
            Error::StaleOrbit { residual } => {
                write!(f, "orbit residual {residual:e} exceeds the 2-cycle tolerance")
            }
            Error::NotConverged(what) => write!(f, "{what} did not converge"),
        }
    }
}

impl core::error::Error for Error {}
