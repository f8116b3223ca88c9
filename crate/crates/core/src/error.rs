use thiserror::Error;

/// Errors raised by the closed-form model and analysis functions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// An argument fell outside the open set on which a function is defined.
    #[error("{what} = {value} is outside the domain {domain}")]
    OutsideDomain {
        what: &'static str,
        value: f64,
        domain: String,
    },

    /// A parameter set violates a structural constraint.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The state vector does not match the vehicle count or topology.
    #[error("state shape mismatch: {0}")]
    Shape(String),

    /// The requested quantity has no meaning for this configuration.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

pub(crate) fn outside(what: &'static str, value: f64, domain: impl Into<String>) -> ModelError {
    ModelError::OutsideDomain {
        what,
        value,
        domain: domain.into(),
    }
}
