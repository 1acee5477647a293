//! Error-to-exit-code mapping.
//!
//! Contract: 0 ok, 1 validation, 2 convergence, 3 stability.

use std::fmt;

use hyperlq_core::frequency::FrequencyError;
use hyperlq_core::model::ModelError;
use hyperlq_core::numerics::NumericsError;
use hyperlq_core::pde::PdeError;
use hyperlq_core::riccati::RiccatiError;

#[derive(Debug)]
pub enum CmdError {
    Validation(String),
    Convergence(String),
    Stability(String),
}

impl CmdError {
    pub fn validation(msg: String) -> Self {
        CmdError::Validation(msg)
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Validation(_) => 1,
            CmdError::Convergence(_) => 2,
            CmdError::Stability(_) => 3,
        }
    }
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Validation(m) => write!(f, "validation error: {m}"),
            CmdError::Convergence(m) => write!(f, "convergence error: {m}"),
            CmdError::Stability(m) => write!(f, "stability error: {m}"),
        }
    }
}

impl std::error::Error for CmdError {}

impl From<ModelError> for CmdError {
    fn from(e: ModelError) -> Self {
        // Variant name first so scripts can match on it.
        CmdError::Validation(format!("{e:?}: {e}"))
    }
}

impl From<NumericsError> for CmdError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::NoConvergence => CmdError::Convergence(e.to_string()),
            NumericsError::UnstableMatrix => CmdError::Stability(e.to_string()),
            other => CmdError::Validation(other.to_string()),
        }
    }
}

impl From<RiccatiError> for CmdError {
    fn from(e: RiccatiError) -> Self {
        match e {
            RiccatiError::NoConvergence => CmdError::Convergence(e.to_string()),
            RiccatiError::Numerics(n) => CmdError::Convergence(n.to_string()),
        }
    }
}

impl From<FrequencyError> for CmdError {
    fn from(e: FrequencyError) -> Self {
        match e {
            FrequencyError::PoleHit => CmdError::Validation(e.to_string()),
            FrequencyError::Numerics(n) => n.into(),
        }
    }
}

impl From<PdeError> for CmdError {
    fn from(e: PdeError) -> Self {
        match e {
            PdeError::UnstableMatrix => CmdError::Stability(e.to_string()),
            PdeError::OverflowGuard => CmdError::Validation(e.to_string()),
            PdeError::Model(m) => m.into(),
            PdeError::Numerics(n) => n.into(),
        }
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Validation(e.to_string())
    }
}
