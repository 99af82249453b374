//! Problem-level analyses built on the engine and the compilers.

use thiserror::Error;

use crate::{AlgebraError, ModelError, ResourceError};

pub mod crp;
pub mod cutoff;
pub mod generators;
pub mod leader;

pub use crp::{crp_check_io, crp_check_rbn, CrpReport, CrpVariant};
pub use cutoff::{cutoff_scan, CutoffReport, Polarity};
pub use leader::{leader_reach_bounded, leader_to_cube, LeaderCubes, LeaderProtocol, LeaderReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error("{0}")]
    Invalid(String),
}
