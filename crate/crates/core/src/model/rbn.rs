//! Reconfigurable broadcast networks.
//!
//! A step picks one broadcast transition `p -!a-> q` and any multiset of
//! receive transitions `p_i -?a-> q_i` on the same letter, provided the
//! configuration holds one process for the broadcaster and one for every
//! receiver. Processes with a matching receive transition may abstain, so
//! the communication topology never needs to be modelled explicitly.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::model::{
    check_letter, check_state, lookup_state, CubeSystem, LetterId, ModelError, StateId,
    StepError, SymbolTable, TransitionSystem, DEFAULT_SUCCESSOR_CAP,
};
use crate::{Cube, MultiSet, ResourceError};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum RbnAction {
    Broadcast(LetterId),
    Receive(LetterId),
}

impl RbnAction {
    pub fn letter(self) -> LetterId {
        match self {
            RbnAction::Broadcast(a) | RbnAction::Receive(a) => a,
        }
    }

    pub fn is_broadcast(self) -> bool {
        matches!(self, RbnAction::Broadcast(_))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RbnTransition {
    pub source: StateId,
    pub action: RbnAction,
    pub target: StateId,
}

/// One broadcast transition plus the (sorted, possibly repeated) receive
/// transitions taken by the processes that heard it. Indices refer to
/// [`RbnModel::transitions`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RbnLabel {
    pub broadcast: usize,
    pub receivers: Vec<usize>,
}

impl RbnLabel {
    pub fn new(broadcast: usize, mut receivers: Vec<usize>) -> Self {
        receivers.sort_unstable();
        Self {
            broadcast,
            receivers,
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct RbnModel {
    states: SymbolTable,
    letters: SymbolTable,
    transitions: Vec<RbnTransition>,
    broadcasts: Vec<usize>,
    // receives[letter][state] = receive transitions from `state` on `letter`
    receives: Vec<Vec<Vec<usize>>>,
    successor_cap: usize,
}

impl RbnModel {
    pub fn new<S: AsRef<str>, L: AsRef<str>>(
        states: impl IntoIterator<Item = S>,
        letters: impl IntoIterator<Item = L>,
        transitions: Vec<RbnTransition>,
    ) -> Result<Self, ModelError> {
        let states = SymbolTable::from_names(states, ModelError::DuplicateState)?;
        let letters = SymbolTable::from_names(letters, ModelError::DuplicateLetter)?;
        Self::from_tables(states, letters, transitions)
    }

    pub(crate) fn from_tables(
        states: SymbolTable,
        letters: SymbolTable,
        transitions: Vec<RbnTransition>,
    ) -> Result<Self, ModelError> {
        let mut seen = HashSet::new();
        for t in &transitions {
            check_state(&states, t.source)?;
            check_state(&states, t.target)?;
            check_letter(&letters, t.action.letter())?;
            if !seen.insert(*t) {
                return Err(ModelError::DuplicateTransition(render_transition(
                    &states, &letters, t,
                )));
            }
        }
        let mut receives = vec![vec![Vec::new(); states.len()]; letters.len()];
        let mut broadcasts = Vec::new();
        for (i, t) in transitions.iter().enumerate() {
            match t.action {
                RbnAction::Broadcast(_) => broadcasts.push(i),
                RbnAction::Receive(a) => receives[a.index()][t.source.index()].push(i),
            }
        }
        Ok(Self {
            states,
            letters,
            transitions,
            broadcasts,
            receives,
            successor_cap: DEFAULT_SUCCESSOR_CAP,
        })
    }

    /// Starts a model over the given states; letters are added on first use.
    pub fn builder<S: AsRef<str>>(states: impl IntoIterator<Item = S>) -> RbnBuilder {
        let mut b = RbnBuilder::default();
        for s in states {
            if !b.states.insert(s.as_ref()) && b.error.is_none() {
                b.error = Some(ModelError::DuplicateState(s.as_ref().to_string()));
            }
        }
        b
    }

    pub fn with_successor_cap(mut self, cap: usize) -> Self {
        self.successor_cap = cap;
        self
    }

    pub fn states(&self) -> &SymbolTable {
        &self.states
    }

    pub fn letters(&self) -> &SymbolTable {
        &self.letters
    }

    pub fn transitions(&self) -> &[RbnTransition] {
        &self.transitions
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.states.get(name).map(StateId)
    }

    pub fn letter(&self, name: &str) -> Option<LetterId> {
        self.letters.get(name).map(LetterId)
    }

    /// Index of the transition `(source, action, target)`, if present.
    pub fn find_transition(&self, t: &RbnTransition) -> Option<usize> {
        self.transitions.iter().position(|u| u == t)
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn describe_transition(&self, i: usize) -> String {
        render_transition(&self.states, &self.letters, &self.transitions[i])
    }

    /// The same model without transition `index`.
    pub fn without_transition(&self, index: usize) -> Self {
        let mut ts = self.transitions.clone();
        ts.remove(index);
        Self::from_tables(self.states.clone(), self.letters.clone(), ts)
            .expect("removing a transition keeps the model well-formed")
    }

    /// Disjoint union of two models sharing letters by name. States of
    /// `other` follow those of `self`.
    pub fn merge(&self, other: &RbnModel) -> Result<RbnModel, ModelError> {
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
            let a = LetterId(letters.get(other.letters.name(t.action.letter().0)).unwrap());
            transitions.push(RbnTransition {
                source: StateId(t.source.0 + offset),
                action: match t.action {
                    RbnAction::Broadcast(_) => RbnAction::Broadcast(a),
                    RbnAction::Receive(_) => RbnAction::Receive(a),
                },
                target: StateId(t.target.0 + offset),
            });
        }
        Self::from_tables(states, letters, transitions)
    }

    /// Fires the step described by `label` from `c`.
    pub fn step(&self, c: &MultiSet, label: &RbnLabel) -> Result<MultiSet, StepError> {
        if c.dim() != self.states.len() {
            return Err(StepError::InvalidLabel(format!(
                "configuration has {} components, model has {} states",
                c.dim(),
                self.states.len()
            )));
        }
        let t = self.transitions.get(label.broadcast).ok_or_else(|| {
            StepError::InvalidLabel(format!("no transition {}", label.broadcast))
        })?;
        let a = match t.action {
            RbnAction::Broadcast(a) => a,
            RbnAction::Receive(_) => {
                return Err(StepError::InvalidLabel(format!(
                    "`{}` is not a broadcast",
                    self.describe_transition(label.broadcast)
                )))
            }
        };
        let mut needed = MultiSet::singleton(c.dim(), t.source.index());
        let mut gained = MultiSet::singleton(c.dim(), t.target.index());
        for &r in &label.receivers {
            let rt = self
                .transitions
                .get(r)
                .ok_or_else(|| StepError::InvalidLabel(format!("no transition {r}")))?;
            if rt.action != RbnAction::Receive(a) {
                return Err(StepError::InvalidLabel(format!(
                    "`{}` does not receive `{}`",
                    self.describe_transition(r),
                    self.letters.name(a.0)
                )));
            }
            needed.increment(rt.source.index(), 1);
            gained.increment(rt.target.index(), 1);
        }
        let rest = c.checked_sub(&needed).map_err(|_| {
            StepError::NotEnabled(format!(
                "not enough processes for `{}` with {} receivers",
                self.describe_transition(label.broadcast),
                label.receivers.len()
            ))
        })?;
        Ok(rest.add(&gained).expect("same dimension"))
    }

    /// All distinct successors of `c`, computed by choosing a broadcast and
    /// then, state by state, how many of the remaining processes take each
    /// matching receive transition.
    pub fn successor_steps(
        &self,
        c: &MultiSet,
    ) -> Result<Vec<(RbnLabel, MultiSet)>, ResourceError> {
        let mut out: BTreeMap<MultiSet, RbnLabel> = BTreeMap::new();
        let mut generated = 0usize;
        for &bi in &self.broadcasts {
            let t = self.transitions[bi];
            if c.get(t.source.index()) == 0 {
                continue;
            }
            let mut base = c.clone();
            base.decrement(t.source.index(), 1).expect("checked above");
            let recv = &self.receives[t.action.letter().index()];
            let groups: Vec<(usize, &[usize])> = (0..base.dim())
                .filter(|&r| base.get(r) > 0 && !recv[r].is_empty())
                .map(|r| (r, recv[r].as_slice()))
                .collect();
            let mut result = base.clone();
            let mut receivers = Vec::new();
            let mut ctx = Distribute {
                model: self,
                base: &base,
                groups: &groups,
                broadcast: bi,
                out: &mut out,
                generated: &mut generated,
            };
            ctx.group(0, &mut result, &mut receivers)?;
        }
        Ok(out.into_iter().map(|(m, l)| (l, m)).collect())
    }
}

struct Distribute<'a> {
    model: &'a RbnModel,
    base: &'a MultiSet,
    groups: &'a [(usize, &'a [usize])],
    broadcast: usize,
    out: &'a mut BTreeMap<MultiSet, RbnLabel>,
    generated: &'a mut usize,
}

impl Distribute<'_> {
    fn group(
        &mut self,
        g: usize,
        result: &mut MultiSet,
        receivers: &mut Vec<usize>,
    ) -> Result<(), ResourceError> {
        if g == self.groups.len() {
            *self.generated += 1;
            if *self.generated > self.model.successor_cap {
                return Err(ResourceError {
                    what: "successor enumeration",
                    cap: self.model.successor_cap,
                });
            }
            let mut succ = result.clone();
            succ.increment(self.model.transitions[self.broadcast].target.index(), 1);
            self.out
                .entry(succ)
                .or_insert_with(|| RbnLabel::new(self.broadcast, receivers.clone()));
            return Ok(());
        }
        let (state, ts) = self.groups[g];
        let available = self.base.get(state);
        self.split(g, state, ts, 0, available, result, receivers)
    }

    #[allow(clippy::too_many_arguments)]
    fn split(
        &mut self,
        g: usize,
        state: usize,
        ts: &[usize],
        j: usize,
        left: u64,
        result: &mut MultiSet,
        receivers: &mut Vec<usize>,
    ) -> Result<(), ResourceError> {
        if j == ts.len() {
            return self.group(g + 1, result, receivers);
        }
        let target = self.model.transitions[ts[j]].target.index();
        for k in 0..=left {
            if k > 0 {
                result.decrement(state, 1).expect("bounded by base count");
                result.increment(target, 1);
                receivers.push(ts[j]);
            }
            self.split(g, state, ts, j + 1, left - k, result, receivers)?;
        }
        // undo the moves made for this transition
        result.increment(state, left);
        result.decrement(target, left).expect("moved above");
        receivers.truncate(receivers.len() - left as usize);
        Ok(())
    }
}

impl fmt::Debug for RbnModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RbnModel")
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

fn render_transition(states: &SymbolTable, letters: &SymbolTable, t: &RbnTransition) -> String {
    let (sym, a) = match t.action {
        RbnAction::Broadcast(a) => ('!', a),
        RbnAction::Receive(a) => ('?', a),
    };
    format!(
        "{} {}{} {}",
        states.name(t.source.0),
        sym,
        letters.name(a.0),
        states.name(t.target.0)
    )
}

/// Incremental construction of an [`RbnModel`] by state and letter names.
#[derive(Default)]
pub struct RbnBuilder {
    states: SymbolTable,
    letters: SymbolTable,
    transitions: Vec<RbnTransition>,
    error: Option<ModelError>,
}

impl RbnBuilder {
    pub fn letter(mut self, name: &str) -> Self {
        self.letters.insert(name);
        self
    }

    pub fn broadcast(self, from: &str, letter: &str, to: &str) -> Self {
        self.transition(from, letter, to, true)
    }

    pub fn receive(self, from: &str, letter: &str, to: &str) -> Self {
        self.transition(from, letter, to, false)
    }

    fn transition(mut self, from: &str, letter: &str, to: &str, broadcast: bool) -> Self {
        if self.error.is_some() {
            return self;
        }
        let ends = lookup_state(&self.states, from).and_then(|s| {
            lookup_state(&self.states, to).map(|t| (s, t))
        });
        match ends {
            Ok((source, target)) => {
                let a = LetterId(self.letters.intern(letter));
                let action = if broadcast {
                    RbnAction::Broadcast(a)
                } else {
                    RbnAction::Receive(a)
                };
                self.transitions.push(RbnTransition {
                    source,
                    action,
                    target,
                });
            }
            Err(e) => self.error = Some(e),
        }
        self
    }

    pub fn build(self) -> Result<RbnModel, ModelError> {
        if let Some(e) = self.error {
            return Err(e);
        }
        RbnModel::from_tables(self.states, self.letters, self.transitions)
    }
}

impl TransitionSystem for RbnModel {
    type Config = MultiSet;
    type Label = RbnLabel;

    fn successors(&self, c: &MultiSet) -> Result<Vec<(RbnLabel, MultiSet)>, ResourceError> {
        self.successor_steps(c)
    }

    fn apply(&self, c: &MultiSet, label: &RbnLabel) -> Result<MultiSet, StepError> {
        self.step(c, label)
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

impl CubeSystem for RbnModel {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyses::generators::counter_rbn;

    fn fig1() -> RbnModel {
        counter_rbn(3).unwrap().model
    }

    fn conf(m: &RbnModel, pairs: &[(&str, u64)]) -> MultiSet {
        MultiSet::from_pairs(
            m.state_count(),
            pairs.iter().map(|(s, n)| (m.state(s).unwrap().index(), *n)),
        )
    }

    fn tr(m: &RbnModel, from: &str, bang: bool, a: &str, to: &str) -> usize {
        let a = m.letter(a).unwrap();
        let action = if bang {
            RbnAction::Broadcast(a)
        } else {
            RbnAction::Receive(a)
        };
        m.find_transition(&RbnTransition {
            source: m.state(from).unwrap(),
            action,
            target: m.state(to).unwrap(),
        })
        .unwrap()
    }

    #[test]
    fn broadcast_with_one_receiver() {
        let m = fig1();
        let t = tr(&m, "tok", true, "1", "sent");
        let t1 = tr(&m, "a1", false, "1", "b1");
        let next = m
            .step(&conf(&m, &[("tok", 1), ("a1", 1)]), &RbnLabel::new(t, vec![t1]))
            .unwrap();
        assert_eq!(next, conf(&m, &[("sent", 1), ("b1", 1)]));
    }

    #[test]
    fn broadcast_without_receivers() {
        let m = fig1();
        let t = tr(&m, "tok", true, "1", "sent");
        let next = m
            .step(&conf(&m, &[("tok", 1)]), &RbnLabel::new(t, vec![]))
            .unwrap();
        assert_eq!(next, conf(&m, &[("sent", 1)]));
    }

    #[test]
    fn missing_broadcaster_is_not_enabled() {
        let m = fig1();
        let t = tr(&m, "tok", true, "1", "sent");
        assert!(matches!(
            m.step(&conf(&m, &[("a1", 1)]), &RbnLabel::new(t, vec![])),
            Err(StepError::NotEnabled(_))
        ));
    }

    #[test]
    fn letter_mismatch_is_invalid() {
        let m = fig1();
        let t = tr(&m, "tok", true, "1", "sent");
        let wrong = tr(&m, "a2", false, "2", "b2");
        assert!(matches!(
            m.step(
                &conf(&m, &[("tok", 1), ("a2", 1)]),
                &RbnLabel::new(t, vec![wrong])
            ),
            Err(StepError::InvalidLabel(_))
        ));
        assert!(matches!(
            m.step(&conf(&m, &[("a2", 1)]), &RbnLabel::new(wrong, vec![])),
            Err(StepError::InvalidLabel(_))
        ));
    }

    #[test]
    fn successor_sets() {
        let m = fig1();
        let succ: Vec<MultiSet> = m
            .successor_steps(&conf(&m, &[("tok", 1), ("a1", 1)]))
            .unwrap()
            .into_iter()
            .map(|(_, c)| c)
            .collect();
        let mut expected = vec![
            conf(&m, &[("sent", 1), ("a1", 1)]),
            conf(&m, &[("sent", 1), ("b1", 1)]),
        ];
        expected.sort();
        assert_eq!(succ, expected);

        assert!(m.successor_steps(&MultiSet::zero(11)).unwrap().is_empty());

        let succ = m.successor_steps(&conf(&m, &[("tok", 2)])).unwrap();
        assert_eq!(succ.len(), 1);
        assert_eq!(succ[0].1, conf(&m, &[("tok", 1), ("sent", 1)]));
    }

    #[test]
    fn successor_cap_is_a_resource_error() {
        let m = RbnModel::builder(["p", "q", "r"])
            .broadcast("p", "a", "p")
            .receive("q", "a", "q")
            .receive("q", "a", "r")
            .build()
            .unwrap()
            .with_successor_cap(3);
        let c = MultiSet::from_counts(vec![1, 6, 0]);
        assert!(m.successor_steps(&c).is_err());
    }

    #[test]
    fn builder_rejects_unknown_and_duplicate() {
        assert_eq!(
            RbnModel::builder(["p"]).broadcast("p", "a", "x").build(),
            Err(ModelError::UnknownState("x".into()))
        );
        assert!(matches!(
            RbnModel::builder(["p"])
                .broadcast("p", "a", "p")
                .broadcast("p", "a", "p")
                .build(),
            Err(ModelError::DuplicateTransition(_))
        ));
        assert!(matches!(
            RbnModel::builder(["p", "p"]).build(),
            Err(ModelError::DuplicateState(_))
        ));
    }

    #[test]
    fn merge_requires_disjoint_states() {
        let a = RbnModel::builder(["p"]).broadcast("p", "x", "p").build().unwrap();
        let b = RbnModel::builder(["q"]).receive("q", "x", "q").build().unwrap();
        let m = a.merge(&b).unwrap();
        assert_eq!(m.state_count(), 2);
        assert_eq!(m.letters().len(), 1);
        assert_eq!(a.merge(&a), Err(ModelError::Overlap("p".into())));
    }
}
