use thiserror::Error;

/// Errors raised by the numeric and simulation layers.
///
/// The variants follow the failure classes the toolkit distinguishes when it
/// reports to the harness: bad inputs (`Domain`, `Parameter`, `Parse`), lookup
/// outside a simulated range (`Range`), missing precomputed state (`State`)
/// and numerical breakdown (`Numeric`).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("invalid parameter for {op}: {detail}")]
    Parameter { op: &'static str, detail: String },

    #[error("range error in {op}: {detail}")]
    Range { op: &'static str, detail: String },

    #[error("numeric failure in {op}: {detail}")]
    Numeric { op: &'static str, detail: String },

    #[error("missing state for {op}: {detail}")]
    State { op: &'static str, detail: String },

    #[error("cannot parse {what} `{input}`: {detail}")]
    Parse {
        what: &'static str,
        input: String,
        detail: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn parameter(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Parameter {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn range(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Range {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn numeric(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Numeric {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn state(op: &'static str, detail: impl Into<String>) -> Self {
        Error::State {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn parse(what: &'static str, input: &str, detail: impl Into<String>) -> Self {
        Error::Parse {
            what,
            input: input.to_string(),
            detail: detail.into(),
        }
    }

    /// True for errors caused by invalid user input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. } | Error::Parameter { .. } | Error::Parse { .. } | Error::Range { .. }
        )
    }
}

/// Reject non-finite or non-positive values.
pub(crate) fn require_positive(op: &'static str, name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("{name} must be positive and finite, got {value}")))
    }
}
