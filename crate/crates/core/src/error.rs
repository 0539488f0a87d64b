use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Errors fall into two groups that the CLI maps onto different exit codes:
/// validation problems (bad input, violated preconditions) and numerical
/// failures (non-convergence, escaping orbits, stiffness).
#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({x}, {y}) lies outside the domain")]
    OutsideDomain { x: f64, y: f64 },

    #[error("point ({x}, {y}) is not on the switching boundary (|h| = {residual:e})")]
    NotOnBoundary { x: f64, y: f64, residual: f64 },

    #[error("point ({x}, {y}) lies in the crossing set")]
    CrossingPoint { x: f64, y: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("system is not in normal form h(x, y) = y")]
    NotNormalForm,

    #[error("gradient of h vanishes on the boundary near ({x}, {y})")]
    DegenerateBoundary { x: f64, y: f64 },

    #[error("denominator (Z+ - Z-)(h) vanishes at ({x}, {y}) away from a two-fold")]
    DenominatorVanishes { x: f64, y: f64 },

    #[error("Jacobian of the coordinate change is singular near ({x}, {y})")]
    SingularJacobian { x: f64, y: f64 },

    #[error("multiplier is not strictly positive near ({x}, {y}) (g = {value})")]
    NonPositiveMultiplier { x: f64, y: f64, value: f64 },

    #[error("pseudo-equilibrium inside the segment near v = {at}")]
    PseudoEquilibrium { at: f64 },

    #[error("slow divergence integral diverges: {0}")]
    Divergent(String),

    #[error("slow divergence integral undefined: {0}")]
    Undefined(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no sign change found: {0}")]
    NoBracket(String),

    #[error("{what} did not converge (estimate {estimate:e}, tolerance {tolerance:e})")]
    NotConverged {
        what: &'static str,
        estimate: f64,
        tolerance: f64,
    },

    #[error("step size underflow at t = {t} near ({x}, {y})")]
    StepUnderflow { t: f64, x: f64, y: f64 },

    #[error("orbit left the domain at t = {t} near ({x}, {y})")]
    Escaped { t: f64, x: f64, y: f64 },

    #[error("orbit did not return to the section within t = {t_max}")]
    NoReturn { t_max: f64 },

    #[error("model file: {0}")]
    Model(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. }
                | Error::StepUnderflow { .. }
                | Error::Escaped { .. }
                | Error::NoReturn { .. }
                | Error::NoBracket(_)
                | Error::Divergent(_)
                | Error::PseudoEquilibrium { .. }
                | Error::DenominatorVanishes { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
