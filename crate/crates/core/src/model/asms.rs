//! Asynchronous shared-memory systems: processes and one shared register.

use std::collections::HashSet;
use std::fmt;

use crate::model::{
    check_letter, check_state, lookup_state, CubeSystem, LetterId, ModelError, StateId,
    StepError, SymbolTable, TransitionSystem,
};
use crate::{Cube, MultiSet, ResourceError};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum AsmsOp {
    Read(LetterId),
    Write(LetterId),
}

impl AsmsOp {
    pub fn letter(self) -> LetterId {
        match self {
            AsmsOp::Read(a) | AsmsOp::Write(a) => a,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AsmsTransition {
    pub source: StateId,
    pub op: AsmsOp,
    pub target: StateId,
}

/// Processes plus the single register value.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AsmsConfig {
    pub processes: MultiSet,
    pub register: LetterId,
}

impl AsmsConfig {
    pub fn new(processes: MultiSet, register: LetterId) -> Self {
        Self {
            processes,
            register,
        }
    }
}

impl fmt::Debug for AsmsConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, r{})", self.processes, self.register.0)
    }
}

/// A cube over the process states together with a register value.
///
/// Source cubes fix the register; a target cube may leave it open.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AsmsCube {
    pub processes: Cube,
    pub register: Option<LetterId>,
}

impl AsmsCube {
    pub fn new(processes: Cube, register: LetterId) -> Self {
        Self {
            processes,
            register: Some(register),
        }
    }

    /// A cube that accepts any register value.
    pub fn any_register(processes: Cube) -> Self {
        Self {
            processes,
            register: None,
        }
    }

    pub fn contains(&self, c: &AsmsConfig) -> bool {
        self.register.is_none_or(|d| d == c.register)
            && self.processes.contains_unchecked(&c.processes)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct AsmsModel {
    states: SymbolTable,
    letters: SymbolTable,
    transitions: Vec<AsmsTransition>,
}

impl AsmsModel {
    pub fn new<S: AsRef<str>, L: AsRef<str>>(
        states: impl IntoIterator<Item = S>,
        letters: impl IntoIterator<Item = L>,
        transitions: Vec<AsmsTransition>,
    ) -> Result<Self, ModelError> {
        let states = SymbolTable::from_names(states, ModelError::DuplicateState)?;
        let letters = SymbolTable::from_names(letters, ModelError::DuplicateLetter)?;
        Self::from_tables(states, letters, transitions)
    }

    pub(crate) fn from_tables(
        states: SymbolTable,
        letters: SymbolTable,
        transitions: Vec<AsmsTransition>,
    ) -> Result<Self, ModelError> {
        let mut seen = HashSet::new();
        for t in &transitions {
            check_state(&states, t.source)?;
            check_state(&states, t.target)?;
            check_letter(&letters, t.op.letter())?;
            if !seen.insert(*t) {
                return Err(ModelError::DuplicateTransition(render_transition(
                    &states, &letters, t,
                )));
            }
        }
        Ok(Self {
            states,
            letters,
            transitions,
        })
    }

    pub fn builder<S: AsRef<str>>(states: impl IntoIterator<Item = S>) -> AsmsBuilder {
        let mut b = AsmsBuilder::default();
        for s in states {
            if !b.states.insert(s.as_ref()) && b.error.is_none() {
                b.error = Some(ModelError::DuplicateState(s.as_ref().to_string()));
            }
        }
        b
    }

    pub fn states(&self) -> &SymbolTable {
        &self.states
    }

    pub fn letters(&self) -> &SymbolTable {
        &self.letters
    }

    pub fn transitions(&self) -> &[AsmsTransition] {
        &self.transitions
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.states.get(name).map(StateId)
    }

    pub fn letter(&self, name: &str) -> Option<LetterId> {
        self.letters.get(name).map(LetterId)
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn find_transition(&self, t: &AsmsTransition) -> Option<usize> {
        self.transitions.iter().position(|u| u == t)
    }

    pub fn describe_transition(&self, i: usize) -> String {
        render_transition(&self.states, &self.letters, &self.transitions[i])
    }

    pub fn without_transition(&self, index: usize) -> Self {
        let mut ts = self.transitions.clone();
        ts.remove(index);
        Self::from_tables(self.states.clone(), self.letters.clone(), ts)
            .expect("removing a transition keeps the model well-formed")
    }

    /// Disjoint union of two models sharing the alphabet by name.
    pub fn merge(&self, other: &AsmsModel) -> Result<AsmsModel, ModelError> {
        let mut states = self.states.clone();
        for s in other.states.names() {
            if !states.insert(s) {
                return Err(ModelError::Overlap(s.clone()));
            }
        }
        let mut letters = self.letters.clone();
        for a in other.letters.names() {
            letters.insert(a);
        }
        let offset = self.states.len() as u32;
        let mut transitions = self.transitions.clone();
        for t in &other.transitions {
            let a = LetterId(letters.get(other.letters.name(t.op.letter().0)).unwrap());
            transitions.push(AsmsTransition {
                source: StateId(t.source.0 + offset),
                op: match t.op {
                    AsmsOp::Read(_) => AsmsOp::Read(a),
                    AsmsOp::Write(_) => AsmsOp::Write(a),
                },
                target: StateId(t.target.0 + offset),
            });
        }
        Self::from_tables(states, letters, transitions)
    }

    /// Fires transition `t` (an index into [`AsmsModel::transitions`]).
    pub fn step(&self, c: &AsmsConfig, t: usize) -> Result<AsmsConfig, StepError> {
        let tr = self
            .transitions
            .get(t)
            .ok_or_else(|| StepError::InvalidLabel(format!("no transition {t}")))?;
        if c.processes.dim() != self.states.len() {
            return Err(StepError::InvalidLabel(format!(
                "configuration has {} components, model has {} states",
                c.processes.dim(),
                self.states.len()
            )));
        }
        if c.processes.get(tr.source.index()) == 0 {
            return Err(StepError::NotEnabled(format!(
                "no process in `{}`",
                self.states.name(tr.source.0)
            )));
        }
        let register = match tr.op {
            AsmsOp::Read(d) if d != c.register => {
                return Err(StepError::NotEnabled(format!(
                    "`{}` needs register `{}` but it holds `{}`",
                    self.describe_transition(t),
                    self.letters.name(d.0),
                    self.letters.name(c.register.0)
                )))
            }
            AsmsOp::Read(d) | AsmsOp::Write(d) => d,
        };
        let mut processes = c.processes.clone();
        processes.decrement(tr.source.index(), 1).expect("checked");
        processes.increment(tr.target.index(), 1);
        Ok(AsmsConfig {
            processes,
            register,
        })
    }
}

impl fmt::Debug for AsmsModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AsmsModel")
            .field("states", &self.states)
            .field("letters", &self.letters)
            .field(
                "transitions",
                &(0..self.transitions.len())
                    .map(|i| self.describe_transition(i))
                    .collect::<Vec<_>>(),
            )
            .finish()
    }
}

fn render_transition(states: &SymbolTable, letters: &SymbolTable, t: &AsmsTransition) -> String {
    let (op, a) = match t.op {
        AsmsOp::Read(a) => ('R', a),
        AsmsOp::Write(a) => ('W', a),
    };
    format!(
        "{} {}({}) {}",
        states.name(t.source.0),
        op,
        letters.name(a.0),
        states.name(t.target.0)
    )
}

#[derive(Default)]
pub struct AsmsBuilder {
    states: SymbolTable,
    letters: SymbolTable,
    transitions: Vec<AsmsTransition>,
    error: Option<ModelError>,
}

impl AsmsBuilder {
    pub fn letter(mut self, name: &str) -> Self {
        self.letters.insert(name);
        self
    }

    pub fn read(self, from: &str, letter: &str, to: &str) -> Self {
        self.transition(from, letter, to, false)
    }

    pub fn write(self, from: &str, letter: &str, to: &str) -> Self {
        self.transition(from, letter, to, true)
    }

    fn transition(mut self, from: &str, letter: &str, to: &str, write: bool) -> Self {
        if self.error.is_some() {
            return self;
        }
        let ends = lookup_state(&self.states, from).and_then(|s| {
            lookup_state(&self.states, to).map(|t| (s, t))
        });
        match ends {
            Ok((source, target)) => {
                let a = LetterId(self.letters.intern(letter));
                let op = if write {
                    AsmsOp::Write(a)
                } else {
                    AsmsOp::Read(a)
                };
                self.transitions.push(AsmsTransition { source, op, target });
            }
            Err(e) => self.error = Some(e),
        }
        self
    }

    pub fn build(self) -> Result<AsmsModel, ModelError> {
        if let Some(e) = self.error {
            return Err(e);
        }
        AsmsModel::from_tables(self.states, self.letters, self.transitions)
    }
}

impl TransitionSystem for AsmsModel {
    type Config = AsmsConfig;
    type Label = usize;

    fn successors(&self, c: &AsmsConfig) -> Result<Vec<(usize, AsmsConfig)>, ResourceError> {
        let mut out: Vec<(usize, AsmsConfig)> = (0..self.transitions.len())
            .filter_map(|t| self.step(c, t).ok().map(|n| (t, n)))
            .collect();
        out.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        out.dedup_by(|a, b| a.1 == b.1);
        Ok(out)
    }

    fn apply(&self, c: &AsmsConfig, label: &usize) -> Result<AsmsConfig, StepError> {
        self.step(c, *label)
    }

    fn population(&self, c: &AsmsConfig) -> u64 {
        c.processes.size()
    }

    fn covers(&self, c: &AsmsConfig, state: StateId) -> bool {
        c.processes.get(state.index()) > 0
    }

    fn states(&self) -> &SymbolTable {
        &self.states
    }
}

impl CubeSystem for AsmsModel {
    type Cube = AsmsCube;

    fn cube_contains(&self, cube: &AsmsCube, c: &AsmsConfig) -> bool {
        cube.contains(c)
    }

    fn cube_members(&self, cube: &AsmsCube, population: u64) -> Vec<AsmsConfig> {
        let registers: Vec<LetterId> = match cube.register {
            Some(d) => vec![d],
            None => (0..self.letters.len() as u32).map(LetterId).collect(),
        };
        let members = cube.processes.members_of_size(population);
        registers
            .into_iter()
            .flat_map(|d| members.iter().map(move |m| AsmsConfig::new(m.clone(), d)))
            .collect()
    }

    fn cube_population_range(&self, cube: &AsmsCube) -> (u64, Option<u64>) {
        cube.processes.size_range()
    }

    fn configurations(&self, population: u64) -> Vec<AsmsConfig> {
        let ms = MultiSet::all_of_size(self.states.len(), population);
        (0..self.letters.len() as u32)
            .flat_map(|d| ms.iter().map(move |m| AsmsConfig::new(m.clone(), LetterId(d))))
            .collect()
    }
}
