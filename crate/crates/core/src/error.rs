use thiserror::Error;

use crate::circuit::CircuitError;
use crate::dbcause::CauseError;
use crate::mlscore::ScoreError;
use crate::relcore::RelError;
use crate::repair::RepairError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Rel(#[from] RelError),
    #[error(transparent)]
    Repair(#[from] RepairError),
    #[error(transparent)]
    Cause(#[from] CauseError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// Module-qualified machine code, e.g. `repair.hitting_set_aborted`.
    pub fn code(&self) -> String {
        match self {
            Error::Rel(e) => format!("relcore.{}", e.kind()),
            Error::Repair(e) => format!("repair.{}", e.kind()),
            Error::Cause(e) => format!("dbcause.{}", e.kind()),
            Error::Circuit(e) => format!("circuit.{}", e.kind()),
            Error::Score(e) => format!("mlscore.{}", e.kind()),
            Error::Config(_) => "cli.config".to_string(),
        }
    }
}
