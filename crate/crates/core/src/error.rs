use thiserror::Error;

use crate::lisa::DropletLabel;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rank {j} is not admissible for droplet {label}")]
    InvalidRank { label: DropletLabel, j: u32 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("measurement plan has no entry for droplet {label}, rank {j}")]
    PlanIncomplete { label: DropletLabel, j: u32 },

    #[error("invalid couplings: {0}")]
    InvalidCouplings(String),

    /// A numerical invariant that should hold by construction was violated.
    #[error("numerical contract violated: {0}")]
    Contract(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
