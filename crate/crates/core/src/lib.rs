//! Anonymous-process protocol models and the reductions between them.
//!
//! Three models of populations of identical finite-state processes are
//! provided, all with configurations given as multisets of states:
//!
//! * reconfigurable broadcast networks ([`RbnModel`]): one process
//!   broadcasts, any sub-multiset of processes with a matching receive
//!   transition moves along;
//! * asynchronous shared-memory systems ([`AsmsModel`]): processes read or
//!   write a single shared register;
//! * immediate-observation nets ([`IoNetModel`]): a process moves after
//!   observing another process in a given state.
//!
//! On top of the models sit an explicit-state reachability engine
//! ([`engine`]), compilers translating models into each other while
//! preserving reachability ([`compile`]), problem-level analyses
//! ([`analyses`]) and a small text format for models, cubes and runs
//! ([`dsl`]).

use thiserror::Error;

pub mod analyses;
pub mod compile;
pub mod cube;
pub mod dsl;
pub mod engine;
pub mod model;
pub mod multiset;
pub mod trace;

pub use cube::{Bound, ConstraintNorm, CountingConstraint, Cube, NormReport};
pub use model::asms::{AsmsConfig, AsmsCube, AsmsModel, AsmsOp, AsmsTransition};
pub use model::io::{IoNetModel, IoTransition};
pub use model::rbn::{RbnAction, RbnLabel, RbnModel, RbnTransition};
pub use model::{CubeSystem, LetterId, ModelError, StateId, StepError, TransitionSystem};
pub use multiset::MultiSet;
pub use trace::{replay, ReplayOutcome, RunTrace};

/// Errors of the multiset and cube algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("subtraction below zero at element {element}")]
    Underflow { element: usize },
    #[error("supports overlap at element {element}")]
    Overlap { element: usize },
    #[error("lower bound exceeds upper bound at element {element}")]
    EmptyBounds { element: usize },
    #[error("bounded enumeration would exceed {cap} multisets")]
    EnumerationCap { cap: u64 },
}

/// A configured resource limit was hit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{what} exceeded the cap of {cap}")]
pub struct ResourceError {
    pub what: &'static str,
    pub cap: usize,
}
