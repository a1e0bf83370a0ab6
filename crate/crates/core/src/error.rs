use thiserror::Error;

/// Errors produced across the toolkit.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("no sign change found while bracketing root (f({lo})={flo:.3e}, f({hi})={fhi:.3e})")]
    NoRoot { lo: f64, hi: f64, flo: f64, fhi: f64 },

    #[error("numerical blow-up at t={t}")]
    Blowup { t: f64 },

    #[error("controller blow-up at stage {stage}, t={t}")]
    ControllerBlowup { stage: usize, t: f64 },

    #[error("invalid {what}: {why}")]
    Invalid { what: &'static str, why: String },

    #[error("infeasible attack-schedule parameters: {0}")]
    Infeasible(String),

    #[error("scenario validation failed: {0}")]
    Validation(String),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::Invalid { what, why: why.into() }
    }
}
