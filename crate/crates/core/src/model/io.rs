//! Immediate-observation nets.
//!
//! A transition `p @ q -> p'` moves one process from `p` to `p'` when some
//! process sits in `q`. The enabling condition is the multiset inequality
//! `C >= {p, q}`, so when `p = q` two processes must be present.

use std::collections::HashSet;
use std::fmt;

use crate::model::{
    check_state, lookup_state, CubeSystem, ModelError, StateId, StepError, SymbolTable,
    TransitionSystem,
};
use crate::{Cube, MultiSet, ResourceError};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct IoTransition {
    pub source: StateId,
    pub observed: StateId,
    pub target: StateId,
}

#[derive(Clone, PartialEq, Eq)]
pub struct IoNetModel {
    states: SymbolTable,
    transitions: Vec<IoTransition>,
}

impl IoNetModel {
    pub fn new<S: AsRef<str>>(
        states: impl IntoIterator<Item = S>,
        transitions: Vec<IoTransition>,
    ) -> Result<Self, ModelError> {
        let states = SymbolTable::from_names(states, ModelError::DuplicateState)?;
        Self::from_table(states, transitions)
    }

    pub(crate) fn from_table(
        states: SymbolTable,
        transitions: Vec<IoTransition>,
    ) -> Result<Self, ModelError> {
        let mut seen = HashSet::new();
        for t in &transitions {
            check_state(&states, t.source)?;
            check_state(&states, t.observed)?;
            check_state(&states, t.target)?;
            if !seen.insert(*t) {
                return Err(ModelError::DuplicateTransition(render(&states, t)));
            }
        }
        Ok(Self {
            states,
            transitions,
        })
    }

    /// Builds a net from `(source, observed, target)` name triples.
    pub fn from_named<S: AsRef<str>>(
        states: impl IntoIterator<Item = S>,
        transitions: &[(&str, &str, &str)],
    ) -> Result<Self, ModelError> {
        let table = SymbolTable::from_names(states, ModelError::DuplicateState)?;
        let mut ts = Vec::new();
        for (p, q, r) in transitions {
            ts.push(IoTransition {
                source: lookup_state(&table, p)?,
                observed: lookup_state(&table, q)?,
                target: lookup_state(&table, r)?,
            });
        }
        Self::from_table(table, ts)
    }

    pub fn states(&self) -> &SymbolTable {
        &self.states
    }

    pub fn transitions(&self) -> &[IoTransition] {
        &self.transitions
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.states.get(name).map(StateId)
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn describe_transition(&self, i: usize) -> String {
        render(&self.states, &self.transitions[i])
    }

    pub fn step(&self, c: &MultiSet, t: usize) -> Result<MultiSet, StepError> {
        let tr = self
            .transitions
            .get(t)
            .ok_or_else(|| StepError::InvalidLabel(format!("no transition {t}")))?;
        if c.dim() != self.states.len() {
            return Err(StepError::InvalidLabel(format!(
                "configuration has {} components, model has {} states",
                c.dim(),
                self.states.len()
            )));
        }
        let mut needed = MultiSet::singleton(c.dim(), tr.source.index());
        needed.increment(tr.observed.index(), 1);
        if !needed.leq(c).expect("same dimension") {
            return Err(StepError::NotEnabled(format!(
                "`{}` needs a process in each of its source and observed states",
                self.describe_transition(t)
            )));
        }
        let mut next = c.clone();
        next.decrement(tr.source.index(), 1).expect("checked");
        next.increment(tr.target.index(), 1);
        Ok(next)
    }
}

fn render(states: &SymbolTable, t: &IoTransition) -> String {
    format!(
        "{} @ {} -> {}",
        states.name(t.source.0),
        states.name(t.observed.0),
        states.name(t.target.0)
    )
}

impl fmt::Debug for IoNetModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IoNetModel")
            .field("states", &self.states)
            .field(
                "transitions",
                &(0..self.transitions.len())
                    .map(|i| self.describe_transition(i))
                    .collect::<Vec<_>>(),
            )
            .finish()
    }
}

impl TransitionSystem for IoNetModel {
    type Config = MultiSet;
    type Label = usize;

    fn successors(&self, c: &MultiSet) -> Result<Vec<(usize, MultiSet)>, ResourceError> {
        let mut out: Vec<(usize, MultiSet)> = (0..self.transitions.len())
            .filter_map(|t| self.step(c, t).ok().map(|n| (t, n)))
            .collect();
        out.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        out.dedup_by(|a, b| a.1 == b.1);
        Ok(out)
    }

    fn apply(&self, c: &MultiSet, label: &usize) -> Result<MultiSet, StepError> {
        self.step(c, *label)
    }

    fn population(&self, c: &MultiSet) -> u64 {
        c.size()
    }

    fn covers(&self, c: &MultiSet, state: StateId) -> bool {
        c.get(state.index()) > 0
    }

    fn states(&self) -> &SymbolTable {
        &self.states
    }
}

impl CubeSystem for IoNetModel {
    type Cube = Cube;

    fn cube_contains(&self, cube: &Cube, c: &MultiSet) -> bool {
        cube.contains_unchecked(c)
    }

    fn cube_members(&self, cube: &Cube, population: u64) -> Vec<MultiSet> {
        cube.members_of_size(population)
    }

    fn cube_population_range(&self, cube: &Cube) -> (u64, Option<u64>) {
        cube.size_range()
    }

    fn configurations(&self, population: u64) -> Vec<MultiSet> {
        MultiSet::all_of_size(self.states.len(), population)
    }
}
