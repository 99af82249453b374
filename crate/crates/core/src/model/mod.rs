//! The three protocol models and their single-step semantics.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

use crate::ResourceError;

pub mod asms;
pub mod io;
pub mod rbn;

/// Default cap on the number of distinct successors of one configuration.
pub const DEFAULT_SUCCESSOR_CAP: usize = 1_000_000;

/// Index of a state within its model.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct StateId(pub u32);

/// Index of a letter (message or register value) within its model.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LetterId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl LetterId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Structural problems found while building a model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate letter `{0}`")]
    DuplicateLetter(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("state index {0} out of range")]
    StateOutOfRange(u32),
    #[error("letter index {0} out of range")]
    LetterOutOfRange(u32),
    #[error("duplicate transition `{0}`")]
    DuplicateTransition(String),
    #[error("state sets overlap on `{0}`")]
    Overlap(String),
}

/// Why a step could not be taken.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("step not enabled: {0}")]
    NotEnabled(String),
    #[error("invalid step label: {0}")]
    InvalidLabel(String),
}

/// An ordered, duplicate-free list of names with reverse lookup.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns a new name; `false` if it was already present.
    pub fn insert(&mut self, name: &str) -> bool {
        if self.index.contains_key(name) {
            return false;
        }
        self.index.insert(name.to_string(), self.names.len() as u32);
        self.names.push(name.to_string());
        true
    }

    /// Interns `name` if needed and returns its index.
    pub fn intern(&mut self, name: &str) -> u32 {
        self.insert(name);
        self.index[name]
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: u32) -> &str {
        &self.names[i as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    fn from_names<I, S>(names: I, dup: fn(String) -> ModelError) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut t = Self::new();
        for n in names {
            if !t.insert(n.as_ref()) {
                return Err(dup(n.as_ref().to_string()));
            }
        }
        Ok(t)
    }
}

impl fmt::Debug for SymbolTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.names).finish()
    }
}

/// A labelled transition system over configurations of a fixed model.
///
/// Implementations must return successors in a deterministic order and at
/// most one entry per distinct successor configuration.
pub trait TransitionSystem: Sync {
    type Config: Clone + Eq + Hash + Ord + Send + Sync + fmt::Debug;
    type Label: Clone + PartialEq + Send + Sync + fmt::Debug;

    /// All one-step successors, each with one label realizing it.
    fn successors(
        &self,
        c: &Self::Config,
    ) -> Result<Vec<(Self::Label, Self::Config)>, ResourceError>;

    /// Fires one labelled step.
    fn apply(&self, c: &Self::Config, label: &Self::Label) -> Result<Self::Config, StepError>;

    /// Number of processes in a configuration.
    fn population(&self, c: &Self::Config) -> u64;

    /// Whether at least one process occupies `state`.
    fn covers(&self, c: &Self::Config, state: StateId) -> bool;

    fn states(&self) -> &SymbolTable;
}

/// A transition system whose parameterized configuration sets are cubes.
pub trait CubeSystem: TransitionSystem {
    type Cube: Clone + fmt::Debug + Send + Sync;

    fn cube_contains(&self, cube: &Self::Cube, c: &Self::Config) -> bool;

    /// Members of the cube with exactly `population` processes.
    fn cube_members(&self, cube: &Self::Cube, population: u64) -> Vec<Self::Config>;

    /// Smallest and (if finite) largest population of a member.
    fn cube_population_range(&self, cube: &Self::Cube) -> (u64, Option<u64>);

    /// Every configuration with exactly `population` processes.
    fn configurations(&self, population: u64) -> Vec<Self::Config>;
}

pub(crate) fn check_state(states: &SymbolTable, s: StateId) -> Result<(), ModelError> {
    if s.index() >= states.len() {
        return Err(ModelError::StateOutOfRange(s.0));
    }
    Ok(())
}

pub(crate) fn check_letter(letters: &SymbolTable, a: LetterId) -> Result<(), ModelError> {
    if a.index() >= letters.len() {
        return Err(ModelError::LetterOutOfRange(a.0));
    }
    Ok(())
}

pub(crate) fn lookup_state(states: &SymbolTable, name: &str) -> Result<StateId, ModelError> {
    states
        .get(name)
        .map(StateId)
        .ok_or_else(|| ModelError::UnknownState(name.to_string()))
}
