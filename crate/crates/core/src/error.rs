use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An index argument (degree, site, chain) is outside its range.
    #[error("{name} = {value} is outside 0..={max}")]
    IndexOutOfRange {
        name: &'static str,
        value: usize,
        max: usize,
    },

    /// A real argument is outside the domain of the function.
    #[error("{name} = {value} is outside its domain")]
    Domain { name: &'static str, value: f64 },

    /// A value object failed its invariant check.
    #[error("invalid {field}: {reason}")]
    Validation { field: &'static str, reason: String },

    /// Integrator settings do not resolve the dynamics they were given.
    #[error("integrator configuration: {0}")]
    Configuration(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn check_index(name: &'static str, value: usize, max: usize) -> Result<()> {
        if value > max {
            Err(Error::IndexOutOfRange { name, value, max })
        } else {
            Ok(())
        }
    }
}
