use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("property violation: {0}")]
    PropertyViolation(String),

    #[error("declared flag `{flag}` is {declared} but measurement says {measured}")]
    FlagMismatch {
        flag: &'static str,
        declared: bool,
        measured: bool,
    },

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {intervals} intervals")]
    Quadrature {
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("L1-Linf bound violated at node {node} (x = {x}): |u| = {value:e} > bound {bound:e}")]
    BoundViolation {
        node: usize,
        x: f64,
        value: f64,
        bound: f64,
    },

    #[error("cross-check failed: {what} differ by {difference:e} (tolerance {tolerance:e})")]
    CrossCheckFailure {
        what: &'static str,
        difference: f64,
        tolerance: f64,
    },

    #[error("no admissible root: {0}")]
    NoRoot(String),
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

pub(crate) fn ensure_nonzero_time(t: f64) -> Result<()> {
    if t.is_finite() && t != 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be finite and nonzero, got {t}")))
    }
}
