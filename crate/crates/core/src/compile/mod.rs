//! Reductions between the protocol models.
//!
//! Each reduction builds a target model together with an embedding of source
//! configurations into target configurations. The image of the embedding is
//! the set of *good* target configurations. A reduction is a strong
//! simulation when, for all source configurations `C` and `C'`,
//! `C'` is reachable from `C` exactly when `embed(C')` is reachable from
//! `embed(C)`. [`check_strong_simulation`] tests this by brute force on all
//! small source configurations.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::engine::post_star;
use crate::model::{CubeSystem, StepError, SymbolTable, TransitionSystem};
use crate::trace::{replay, RunTrace};
use crate::ResourceError;

pub mod asms_to_rbn;
pub mod io_to_rbn;
pub mod rbn_to_asms;

pub use asms_to_rbn::AsmsToRbn;
pub use io_to_rbn::IoToRbn;
pub use rbn_to_asms::{PseudoStep, RbnToAsms};

pub type ConfigOf<S> = <S as TransitionSystem>::Config;
pub type LabelOf<S> = <S as TransitionSystem>::Label;
pub type CubeOf<S> = <S as CubeSystem>::Cube;
pub type TraceOf<S> = RunTrace<ConfigOf<S>, LabelOf<S>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionKind {
    RbnToAsms,
    AsmsToRbn,
    IoToRbn,
    Composed,
}

impl ReductionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReductionKind::RbnToAsms => "rbn-to-asms",
            ReductionKind::AsmsToRbn => "asms-to-rbn",
            ReductionKind::IoToRbn => "io-to-rbn",
            ReductionKind::Composed => "composed",
        }
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("{which} configuration of the run is not good")]
    NotGood { which: &'static str },
    #[error("run does not replay: step {index} fails")]
    Replay { index: usize },
    #[error("run cannot be decomposed: {0}")]
    NotDecomposable(String),
    #[error("decoded run is invalid: {0}")]
    Decode(StepError),
}

/// A translation of one model into another that preserves reachability
/// between embedded configurations.
pub trait Reduction: Sync {
    type Source: CubeSystem;
    type Target: CubeSystem;

    fn kind(&self) -> ReductionKind;
    fn source(&self) -> &Self::Source;
    fn target(&self) -> &Self::Target;

    /// Embeds a source configuration; the result includes the padding.
    fn embed(&self, c: &ConfigOf<Self::Source>) -> ConfigOf<Self::Target>;

    /// Inverse of [`Reduction::embed`] on good configurations, `None` elsewhere.
    fn decode_config(&self, c: &ConfigOf<Self::Target>) -> Option<ConfigOf<Self::Source>>;

    fn is_good(&self, c: &ConfigOf<Self::Target>) -> bool {
        self.decode_config(c).is_some()
    }

    fn embed_cube(&self, cube: &CubeOf<Self::Source>) -> CubeOf<Self::Target>;

    /// Translates a target run between good configurations into a source run
    /// between their pre-images.
    fn decode_run(&self, run: &TraceOf<Self::Target>) -> Result<TraceOf<Self::Source>, CompileError>;

    /// Human-readable description of the padding multiset.
    fn padding(&self) -> String;

    /// Number of padding elements.
    fn padding_size(&self) -> u64;

    /// Number of target states that are not source states.
    fn helper_states(&self) -> usize {
        self.target().states().len() - self.source().states().len()
    }
}

/// Checks that `run` replays and starts and ends in good configurations.
pub(crate) fn check_good_run<R: Reduction + ?Sized>(
    red: &R,
    run: &TraceOf<R::Target>,
) -> Result<(), CompileError> {
    let out = replay(red.target(), run);
    if let Some(index) = out.first_bad {
        return Err(CompileError::Replay { index });
    }
    if !red.is_good(&run.initial) {
        return Err(CompileError::NotGood { which: "initial" });
    }
    if !red.is_good(run.last()) {
        return Err(CompileError::NotGood { which: "final" });
    }
    Ok(())
}

/// Builds a source trace from labels and checks it against the expected end.
pub(crate) fn source_trace<S: TransitionSystem>(
    system: &S,
    initial: S::Config,
    labels: Vec<S::Label>,
    expected_end: &S::Config,
) -> Result<RunTrace<S::Config, S::Label>, CompileError> {
    let trace = RunTrace::from_labels(system, initial, labels)
        .map_err(|(_, e)| CompileError::Decode(e))?;
    if trace.last() != expected_end {
        return Err(CompileError::NotDecomposable(
            "decoded run ends in the wrong configuration".into(),
        ));
    }
    Ok(trace)
}

/// `first` followed by `second`, where `second` translates the target of
/// `first`.
pub struct Composed<A, B> {
    pub first: A,
    pub second: B,
}

impl<A, B> Composed<A, B> {
    pub fn new(first: A, second: B) -> Self {
        Self { first, second }
    }
}

impl<A, B> Reduction for Composed<A, B>
where
    A: Reduction,
    B: Reduction<Source = A::Target>,
{
    type Source = A::Source;
    type Target = B::Target;

    fn kind(&self) -> ReductionKind {
        ReductionKind::Composed
    }

    fn source(&self) -> &A::Source {
        self.first.source()
    }

    fn target(&self) -> &B::Target {
        self.second.target()
    }

    fn embed(&self, c: &ConfigOf<A::Source>) -> ConfigOf<B::Target> {
        self.second.embed(&self.first.embed(c))
    }

    fn decode_config(&self, c: &ConfigOf<B::Target>) -> Option<ConfigOf<A::Source>> {
        self.second
            .decode_config(c)
            .and_then(|m| self.first.decode_config(&m))
    }

    fn embed_cube(&self, cube: &CubeOf<A::Source>) -> CubeOf<B::Target> {
        self.second.embed_cube(&self.first.embed_cube(cube))
    }

    fn decode_run(&self, run: &TraceOf<B::Target>) -> Result<TraceOf<A::Source>, CompileError> {
        check_good_run(self, run)?;
        let middle = self.second.decode_run(run)?;
        self.first.decode_run(&middle)
    }

    fn padding(&self) -> String {
        format!("{} then {}", self.first.padding(), self.second.padding())
    }

    fn padding_size(&self) -> u64 {
        self.first.padding_size() + self.second.padding_size()
    }
}

/// One disagreement between source and target reachability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulationCounterexample {
    pub from: String,
    pub to: String,
    pub source_reaches: bool,
    pub target_reaches: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimulationReport {
    /// Source configurations used as starting points.
    pub sources: usize,
    /// Ordered pairs compared (starting point times same-size configuration).
    pub pairs: usize,
    pub counterexamples: Vec<SimulationCounterexample>,
    /// Source configurations whose embedding does not decode back.
    pub embedding_failures: Vec<String>,
}

impl SimulationReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty() && self.embedding_failures.is_empty()
    }
}

/// Compares source and target reachability from every source configuration
/// with at most `population_bound` processes.
///
/// For each such `C`, the set of source configurations reachable from `C`
/// must equal the decoded good part of what the target reaches from
/// `embed(C)`. Since every model here conserves population, this covers all
/// pairs `(C, C')` with `|C| <= population_bound`.
pub fn check_strong_simulation<R: Reduction>(
    red: &R,
    population_bound: u64,
    cap: usize,
) -> Result<SimulationReport, ResourceError> {
    let sources: Vec<ConfigOf<R::Source>> = (0..=population_bound)
        .flat_map(|n| red.source().configurations(n))
        .collect();
    let per_source: Vec<Result<SimulationReport, ResourceError>> = sources
        .par_iter()
        .map(|c| check_one(red, c, cap))
        .collect();
    let mut report = SimulationReport::default();
    for r in per_source {
        let r = r?;
        report.sources += r.sources;
        report.pairs += r.pairs;
        report.counterexamples.extend(r.counterexamples);
        report.embedding_failures.extend(r.embedding_failures);
    }
    Ok(report)
}

fn check_one<R: Reduction>(
    red: &R,
    c: &ConfigOf<R::Source>,
    cap: usize,
) -> Result<SimulationReport, ResourceError> {
    let mut report = SimulationReport {
        sources: 1,
        ..Default::default()
    };
    let embedded = red.embed(c);
    if red.decode_config(&embedded).as_ref() != Some(c) {
        report.embedding_failures.push(format!("{c:?}"));
    }
    let src = post_star(red.source(), c, cap)?;
    let tgt = post_star(red.target(), &embedded, cap)?;
    if !src.exhausted || !tgt.exhausted {
        return Err(ResourceError {
            what: "simulation check exploration",
            cap,
        });
    }
    let in_source: HashSet<_> = src.reached.into_iter().collect();
    let in_target: HashSet<_> = tgt
        .reached
        .iter()
        .filter_map(|t| red.decode_config(t))
        .collect();
    let population = red.source().population(c);
    report.pairs = red.source().configurations(population).len();
    let mut diff: Vec<_> = in_source.symmetric_difference(&in_target).collect();
    diff.sort();
    for d in diff {
        report.counterexamples.push(SimulationCounterexample {
            from: format!("{c:?}"),
            to: format!("{d:?}"),
            source_reaches: in_source.contains(d),
            target_reaches: in_target.contains(d),
        });
    }
    Ok(report)
}

/// Adds `base`, or `base` followed by primes, whichever is free.
pub(crate) fn fresh_name(table: &mut SymbolTable, base: &str) -> u32 {
    let mut name = base.to_string();
    while table.contains(&name) {
        name.push('\'');
    }
    table.intern(&name)
}
