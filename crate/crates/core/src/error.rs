use std::fmt;

use thiserror::Error;

/// Which state field an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    V,
    U,
    Theta,
    Phi,
    G,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Field::V => "v",
            Field::U => "u",
            Field::Theta => "theta",
            Field::Phi => "phi",
            Field::G => "G",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("boundary phases must be +1 or -1, got left = {left}, right = {right}")]
    InvalidBoundary { left: f64, right: f64 },

    #[error("equilibrium requires equal far-field phases, got left = {left}, right = {right}")]
    MismatchedPhases { left: f64, right: f64 },

    #[error("positivity violated: {field} = {value:e} in cell {cell} (x = {x}) at t = {t}")]
    Positivity {
        field: Field,
        cell: usize,
        x: f64,
        value: f64,
        t: f64,
    },

    #[error("non-finite {field} in cell {cell} at t = {t}")]
    NonFinite { field: Field, cell: usize, t: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("at resolution N = {n}: {source}")]
    AtResolution { n: usize, source: Box<SimError> },
}

pub type Result<T> = std::result::Result<T, SimError>;
