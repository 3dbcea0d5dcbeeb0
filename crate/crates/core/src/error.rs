use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Location of a pointwise failure on the grid, when known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell(pub Option<usize>);

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(i) => write!(f, " at cell {i}"),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: String,
    },

    #[error("relaxation rate {name} = {value} outside the stability domain (0, 2)")]
    StabilityDomain { name: &'static str, value: f64 },

    #[error("non-positive density {rho}{cell}")]
    Positivity { rho: f64, cell: Cell },

    #[error("thermodynamic failure{cell}: {reason}")]
    Thermodynamic { reason: String, cell: Cell },

    #[error("closure infeasible: {0}")]
    ClosureInfeasible(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigenvalue computation failed at k_dx = {0}")]
    Eigen(f64),

    #[error("step {step} (t = {time}): {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("incompatible runs: {0}")]
    Incompatible(String),

    #[error("malformed data in {path}: {reason}")]
    Data { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Attach a grid location to a pointwise error that does not carry one yet.
    pub fn at_cell(self, index: usize) -> Self {
        match self {
            Error::Positivity { rho, cell: Cell(None) } => Error::Positivity {
                rho,
                cell: Cell(Some(index)),
            },
            Error::Thermodynamic {
                reason,
                cell: Cell(None),
            } => Error::Thermodynamic {
                reason,
                cell: Cell(Some(index)),
            },
            other => other,
        }
    }

    pub fn at_step(self, step: usize, time: f64) -> Self {
        Error::Step {
            step,
            time,
            source: Box::new(self),
        }
    }

    pub(crate) fn positivity(rho: f64) -> Self {
        Error::Positivity { rho, cell: Cell(None) }
    }

    pub(crate) fn thermo(reason: impl Into<String>) -> Self {
        Error::Thermodynamic {
            reason: reason.into(),
            cell: Cell(None),
        }
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0".into(),
        })
    }
}

pub(crate) fn require_rate(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 2.0 {
        Ok(())
    } else {
        Err(Error::StabilityDomain { name, value })
    }
}
