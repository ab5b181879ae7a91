use thiserror::Error;

/// Errors raised by the physics models and the verification solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric input lies outside the domain of the operation.
    #[error("invalid {field}: {value} ({reason})")]
    Domain {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Structural problem with a level scheme, state or model configuration.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// The coherent threshold relation has no real solution for this coherence.
    #[error("coherence too large for phase: log argument {argument} <= 0 (Re rho_bc = {re_coherence}, rho_aa = {rho_aa})")]
    CoherenceTooLarge {
        argument: f64,
        re_coherence: f64,
        rho_aa: f64,
    },

    /// The rate matrix has no unique steady state.
    #[error("degenerate rate model: {0}")]
    Degenerate(String),

    /// The requested load current cannot be delivered at a non-negative voltage.
    #[error("infeasible operating point: load current {requested} exceeds short-circuit current {short_circuit}")]
    Infeasible { requested: f64, short_circuit: f64 },

    /// A bracketing root finder was handed an interval without a sign change.
    #[error(
        "bracket [{low}, {high}] does not straddle a root: f(low) = {f_low}, f(high) = {f_high}"
    )]
    Bracket {
        low: f64,
        high: f64,
        f_low: f64,
        f_high: f64,
    },

    /// An iterative method stopped before meeting its tolerance.
    #[error("no convergence after {steps} steps (last residual {residual:e})")]
    Convergence { steps: usize, residual: f64 },

    /// The operation was called on a configuration it does not handle.
    #[error("misuse: {0}")]
    Misuse(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks that `value` is finite and strictly positive.
pub(crate) fn positive(field: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::Domain {
            field,
            value,
            reason: "must be finite",
        });
    }
    if value <= 0.0 {
        return Err(Error::Domain {
            field,
            value,
            reason: "must be > 0",
        });
    }
    Ok(value)
}

/// Checks that `value` is finite and not negative.
pub(crate) fn non_negative(field: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::Domain {
            field,
            value,
            reason: "must be finite",
        });
    }
    if value < 0.0 {
        return Err(Error::Domain {
            field,
            value,
            reason: "must be >= 0",
        });
    }
    Ok(value)
}

pub(crate) fn finite(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain {
            field,
            value,
            reason: "must be finite",
        })
    }
}
