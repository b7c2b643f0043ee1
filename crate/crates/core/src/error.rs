use thiserror::Error;

/// Errors shared across the crate.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("angle out of range: {name} = {value} not in {range}")]
    AngleOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("parameter out of range: {name} = {value}")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("Kraus set violates completeness: max residual {residual:.3e}")]
    KrausIncomplete { residual: f64 },

    #[error("matrix is not a valid density matrix: {reason}")]
    InvalidState { reason: String },

    #[error("degenerate spectrum (|lambda_+ - lambda_-| = {gap:.3e}) at t = {t}")]
    Degenerate { gap: f64, t: f64 },

    #[error("initial state is mixed (lambda_- = {lambda_minus:.3e}); trajectory GP requires a pure start")]
    MixedInitialState { lambda_minus: f64 },

    #[error(
        "quadrature did not converge within {subdivisions} subdivisions: \
         best estimate {estimate:.12e}, residual {residual:.3e}"
    )]
    QuadratureNonConvergence {
        estimate: f64,
        residual: f64,
        subdivisions: usize,
    },

    #[error("ODE right-hand side returned a non-finite value at t = {t}")]
    NonFiniteRhs { t: f64 },

    #[error("SGAD channel parameter {name} = {value:.6} outside [0,1] at t = {t}")]
    SgadParameterInvalid {
        name: &'static str,
        value: f64,
        t: f64,
    },

    #[error(
        "no valid SGAD probability p2 in [0,1] at t = {t}: \
         roots {root_plus:.6} and {root_minus:.6}"
    )]
    SgadNoValidRoot {
        root_plus: f64,
        root_minus: f64,
        t: f64,
    },

    #[error("trajectory is invalid: {reason}")]
    InvalidTrajectory { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
