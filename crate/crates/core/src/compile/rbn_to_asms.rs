//! Simulating a reconfigurable broadcast network with a shared register.
//!
//! Every source transition `t` gets an intermediary state `I_t`. A broadcast
//! `q -!a-> q'` becomes `q -W(a)-> I_t -W(#)-> q'` and a receive
//! `q -?a-> q'` becomes `q -R(a)-> I_t -W(#)-> q'`, where `#` is a fresh
//! register value. The first transition is written `t^` and the second
//! `t#`. A configuration is good when no process is in an intermediary and
//! the register holds `#`.
//!
//! A source step `t + t1..tn` is encoded by the pseudo-step
//! `t^ t1^ .. tn^ t# t1# .. tn#`. Any run between good configurations can
//! be rearranged into a sequence of pseudo-steps ([`RbnToAsms::normalize`]):
//! after a broadcast write only reads of the written value can happen until
//! the next write, so the leading write and the reads following it form one
//! block. The `#` exits of that block's processes can be moved forward to
//! right after the block, because a `#` write is never read and moving a
//! process out of an intermediary earlier only makes more processes
//! available.

use crate::compile::{
    check_good_run, fresh_name, source_trace, CompileError, Reduction, ReductionKind, TraceOf,
};
use crate::cube::Bound;
use crate::model::{LetterId, StateId, SymbolTable};
use crate::{
    AsmsConfig, AsmsCube, AsmsModel, AsmsOp, AsmsTransition, Cube, MultiSet, RbnAction,
    RbnLabel, RbnModel, RunTrace,
};

/// A block of the normal form: one source step and its target word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoStep {
    pub letter: LetterId,
    /// Source broadcast transition.
    pub core: usize,
    /// Source receive transitions, in the order they were read.
    pub companions: Vec<usize>,
    /// Target transitions `t^ t1^ .. tn^ t# t1# .. tn#`.
    pub word: Vec<usize>,
}

impl PseudoStep {
    pub fn label(&self) -> RbnLabel {
        RbnLabel::new(self.core, self.companions.clone())
    }
}

#[derive(Clone, Debug)]
pub struct RbnToAsms {
    source: RbnModel,
    target: AsmsModel,
    sharp: LetterId,
}

impl RbnToAsms {
    pub fn new(source: &RbnModel) -> Self {
        let mut states = SymbolTable::new();
        for s in source.states().names() {
            states.insert(s);
        }
        let nq = states.len() as u32;
        for i in 0..source.transitions().len() {
            let name = intermediary_name(source, i);
            fresh_name(&mut states, &name);
        }
        let mut letters = SymbolTable::new();
        for a in source.letters().names() {
            letters.insert(a);
        }
        let sharp = LetterId(fresh_name(&mut letters, "#"));
        let mut transitions = Vec::with_capacity(2 * source.transitions().len());
        for (i, t) in source.transitions().iter().enumerate() {
            let mid = StateId(nq + i as u32);
            let op = match t.action {
                RbnAction::Broadcast(a) => AsmsOp::Write(a),
                RbnAction::Receive(a) => AsmsOp::Read(a),
            };
            transitions.push(AsmsTransition {
                source: t.source,
                op,
                target: mid,
            });
            transitions.push(AsmsTransition {
                source: mid,
                op: AsmsOp::Write(sharp),
                target: t.target,
            });
        }
        let target = AsmsModel::from_tables(states, letters, transitions)
            .expect("compiled model is well-formed");
        Self {
            source: source.clone(),
            target,
            sharp,
        }
    }

    /// The idle register value.
    pub fn sharp(&self) -> LetterId {
        self.sharp
    }

    /// Target transition `t^` of source transition `t`.
    pub fn hat(&self, t: usize) -> usize {
        2 * t
    }

    /// Target transition `t#` of source transition `t`.
    pub fn sharp_of(&self, t: usize) -> usize {
        2 * t + 1
    }

    pub fn intermediary(&self, t: usize) -> StateId {
        StateId((self.source.state_count() + t) as u32)
    }

    /// The pseudo-step word of a source step.
    pub fn encode_step(&self, label: &RbnLabel) -> Vec<usize> {
        let mut word = vec![self.hat(label.broadcast)];
        word.extend(label.receivers.iter().map(|&r| self.hat(r)));
        word.push(self.sharp_of(label.broadcast));
        word.extend(label.receivers.iter().map(|&r| self.sharp_of(r)));
        word
    }

    /// Encodes a source run step by step.
    pub fn encode_run(
        &self,
        run: &RunTrace<MultiSet, RbnLabel>,
    ) -> Result<RunTrace<AsmsConfig, usize>, CompileError> {
        let labels: Vec<usize> = run.labels().flat_map(|l| self.encode_step(l)).collect();
        RunTrace::from_labels(&self.target, self.embed(&run.initial), labels)
            .map_err(|(_, e)| CompileError::Decode(e))
    }

    fn is_hat(&self, label: usize) -> bool {
        label.is_multiple_of(2)
    }

    /// Splits a run that is already a concatenation of pseudo-step words.
    pub fn decompose(&self, run: &RunTrace<AsmsConfig, usize>) -> Option<Vec<PseudoStep>> {
        let labels: Vec<usize> = run.labels().copied().collect();
        let mut steps = Vec::new();
        let mut i = 0;
        while i < labels.len() {
            let core = labels[i] / 2;
            if !self.is_hat(labels[i]) || !self.source.transitions()[core].action.is_broadcast() {
                return None;
            }
            let letter = self.source.transitions()[core].action.letter();
            let mut companions = Vec::new();
            let mut j = i + 1;
            while j < labels.len()
                && self.is_hat(labels[j])
                && self.source.transitions()[labels[j] / 2].action == RbnAction::Receive(letter)
            {
                companions.push(labels[j] / 2);
                j += 1;
            }
            let step = PseudoStep {
                letter,
                core,
                word: self.encode_step(&RbnLabel {
                    broadcast: core,
                    receivers: companions.clone(),
                }),
                companions,
            };
            let end = i + step.word.len();
            if end > labels.len() || labels[i..end] != step.word[..] {
                return None;
            }
            steps.push(step);
            i = end;
        }
        Some(steps)
    }

    /// Rearranges a run between good configurations into pseudo-steps with
    /// the same endpoints.
    pub fn normalize(
        &self,
        run: &RunTrace<AsmsConfig, usize>,
    ) -> Result<(RunTrace<AsmsConfig, usize>, Vec<PseudoStep>), CompileError> {
        check_good_run(self, run)?;
        let mut rest: Vec<usize> = run.labels().copied().collect();
        let mut steps = Vec::new();
        while !rest.is_empty() {
            let core = rest[0] / 2;
            let t = self.source.transitions()[core];
            if !self.is_hat(rest[0]) || !t.action.is_broadcast() {
                return Err(CompileError::NotDecomposable(format!(
                    "block starts with `{}` instead of a broadcast write",
                    self.target.describe_transition(rest[0])
                )));
            }
            let letter = t.action.letter();
            let mut companions = Vec::new();
            let mut k = 1;
            while k < rest.len() && self.is_hat(rest[k]) {
                let r = rest[k] / 2;
                if self.source.transitions()[r].action.is_broadcast() {
                    break;
                }
                if self.source.transitions()[r].action != RbnAction::Receive(letter) {
                    return Err(CompileError::NotDecomposable(format!(
                        "`{}` reads a value other than the one just written",
                        self.target.describe_transition(rest[k])
                    )));
                }
                companions.push(r);
                k += 1;
            }
            let mut tail = rest.split_off(k);
            for &u in std::iter::once(&core).chain(&companions) {
                let exit = self.sharp_of(u);
                let pos = tail.iter().position(|&l| l == exit).ok_or_else(|| {
                    CompileError::NotDecomposable(format!(
                        "no exit `{}` after its block",
                        self.target.describe_transition(exit)
                    ))
                })?;
                tail.remove(pos);
            }
            let label = RbnLabel {
                broadcast: core,
                receivers: companions.clone(),
            };
            steps.push(PseudoStep {
                letter,
                core,
                word: self.encode_step(&label),
                companions,
            });
            rest = tail;
        }
        let labels: Vec<usize> = steps.iter().flat_map(|s| s.word.iter().copied()).collect();
        let normal = RunTrace::from_labels(&self.target, run.initial.clone(), labels)
            .map_err(|(_, e)| CompileError::Decode(e))?;
        if normal.last() != run.last() {
            return Err(CompileError::NotDecomposable(
                "normalized run ends elsewhere".into(),
            ));
        }
        Ok((normal, steps))
    }
}

fn intermediary_name(source: &RbnModel, t: usize) -> String {
    let tr = source.transitions()[t];
    let (sym, a) = match tr.action {
        RbnAction::Broadcast(a) => ('!', a),
        RbnAction::Receive(a) => ('?', a),
    };
    format!(
        "[{},{}{},{}]",
        source.states().name(tr.source.0),
        sym,
        source.letters().name(a.0),
        source.states().name(tr.target.0)
    )
}

impl Reduction for RbnToAsms {
    type Source = RbnModel;
    type Target = AsmsModel;

    fn kind(&self) -> ReductionKind {
        ReductionKind::RbnToAsms
    }

    fn source(&self) -> &RbnModel {
        &self.source
    }

    fn target(&self) -> &AsmsModel {
        &self.target
    }

    fn embed(&self, c: &MultiSet) -> AsmsConfig {
        AsmsConfig::new(c.extend_to(self.target.state_count()), self.sharp)
    }

    fn decode_config(&self, c: &AsmsConfig) -> Option<MultiSet> {
        let nq = self.source.state_count();
        let parked = (nq..c.processes.dim()).any(|i| c.processes.get(i) > 0);
        (c.register == self.sharp && !parked).then(|| c.processes.truncate(nq))
    }

    fn embed_cube(&self, cube: &Cube) -> AsmsCube {
        let n = self.target.state_count();
        let mut lower = cube.lower().to_vec();
        let mut upper = cube.upper().to_vec();
        lower.resize(n, 0);
        upper.resize(n, Bound::Finite(0));
        AsmsCube::new(
            Cube::new(lower, upper).expect("source cube is non-empty"),
            self.sharp,
        )
    }

    fn decode_run(&self, run: &TraceOf<AsmsModel>) -> Result<TraceOf<RbnModel>, CompileError> {
        let (_, steps) = self.normalize(run)?;
        let initial = self.decode_config(&run.initial).expect("checked good");
        let end = self.decode_config(run.last()).expect("checked good");
        source_trace(
            &self.source,
            initial,
            steps.iter().map(PseudoStep::label).collect(),
            &end,
        )
    }

    fn padding(&self) -> String {
        format!("register {}", self.target.letters().name(self.sharp.0))
    }

    fn padding_size(&self) -> u64 {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyses::generators::counter_rbn;
    use crate::compile::check_strong_simulation;
    use crate::engine::DEFAULT_CAP;
    use crate::replay;

    #[test]
    fn single_broadcast_gives_two_transitions() {
        let m = RbnModel::builder(["q", "q'"]).broadcast("q", "a", "q'").build().unwrap();
        let r = RbnToAsms::new(&m);
        assert_eq!(r.target().transitions().len(), 2);
        assert_eq!(r.helper_states(), 1);
        assert_eq!(r.target().describe_transition(0), "q W(a) [q,!a,q']");
        assert_eq!(r.target().describe_transition(1), "[q,!a,q'] W(#) q'");
    }

    #[test]
    fn empty_model() {
        let m = RbnModel::builder(["p", "q"]).letter("a").build().unwrap();
        let r = RbnToAsms::new(&m);
        assert_eq!(r.target().state_count(), 2);
        assert_eq!(r.target().letters().names(), &["a", "#"]);
        assert!(r.target().transitions().is_empty());
    }

    #[test]
    fn sharp_is_fresh() {
        let m = RbnModel::builder(["p"]).broadcast("p", "#", "p").build().unwrap();
        let r = RbnToAsms::new(&m);
        assert_eq!(r.target().letters().name(r.sharp().0), "#'");
    }

    #[test]
    fn counter_sizes() {
        let r = RbnToAsms::new(&counter_rbn(3).unwrap().model);
        assert_eq!(r.target().state_count(), 21);
        assert_eq!(r.target().transitions().len(), 20);
    }

    #[test]
    fn pseudo_step_replays() {
        let m = counter_rbn(3).unwrap().model;
        let r = RbnToAsms::new(&m);
        let c = MultiSet::from_pairs(11, [(0, 1), (2, 1)]);
        let label = RbnLabel::new(0, vec![1]);
        let next = m.step(&c, &label).unwrap();
        let run = RunTrace::from_labels(&m, c, [label]).unwrap();
        let enc = r.encode_run(&run).unwrap();
        assert_eq!(enc.len(), 4);
        assert_eq!(enc.last(), &r.embed(&next));
        assert_eq!(r.decompose(&enc).unwrap().len(), 1);
    }

    #[test]
    fn interleaved_broadcasts_normalize() {
        let m = counter_rbn(3).unwrap().model;
        let r = RbnToAsms::new(&m);
        let (tok, a1) = (m.state("tok").unwrap().index(), m.state("a1").unwrap().index());
        let c0 = MultiSet::from_pairs(11, [(tok, 2), (a1, 1)]);
        // two tok processes write 1; a1 reads the first write; exits come late
        let labels = [r.hat(0), r.hat(1), r.hat(0), r.sharp_of(0), r.sharp_of(0), r.sharp_of(1)];
        let run = RunTrace::from_labels(r.target(), r.embed(&c0), labels).unwrap();
        assert!(r.decompose(&run).is_none());
        let (normal, steps) = r.normalize(&run).unwrap();
        assert_eq!(steps.len(), 2);
        assert_eq!(normal.initial, run.initial);
        assert_eq!(normal.last(), run.last());
        assert_eq!(r.decompose(&normal).unwrap(), steps);
        let decoded = r.decode_run(&run).unwrap();
        assert!(replay(&m, &decoded).ok);
        assert_eq!(decoded.len(), 2);
    }

    #[test]
    fn normal_run_is_unchanged() {
        let m = counter_rbn(1).unwrap().model;
        let r = RbnToAsms::new(&m);
        let c = MultiSet::from_pairs(5, [(0, 1), (2, 1)]);
        let run = RunTrace::from_labels(&m, c, [RbnLabel::new(0, vec![1])]).unwrap();
        let enc = r.encode_run(&run).unwrap();
        assert_eq!(r.normalize(&enc).unwrap().0, enc);
        let empty = RunTrace::empty(enc.initial.clone());
        assert_eq!(r.normalize(&empty).unwrap().0, empty);
        assert_eq!(r.decode_run(&empty).unwrap().len(), 0);
    }

    #[test]
    fn bad_endpoints_rejected() {
        let m = counter_rbn(1).unwrap().model;
        let r = RbnToAsms::new(&m);
        let c = MultiSet::from_pairs(5, [(0, 1)]);
        let run = RunTrace::from_labels(r.target(), r.embed(&c), [r.hat(0)]).unwrap();
        assert_eq!(
            r.normalize(&run).unwrap_err(),
            CompileError::NotGood { which: "final" }
        );
    }

    #[test]
    fn strong_simulation_small_counter() {
        let r = RbnToAsms::new(&counter_rbn(1).unwrap().model);
        let rep = check_strong_simulation(&r, 3, DEFAULT_CAP).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn dropping_an_exit_is_caught() {
        let m = counter_rbn(1).unwrap().model;
        let mut r = RbnToAsms::new(&m);
        r.target = r.target.without_transition(1);
        let rep = check_strong_simulation(&r, 2, DEFAULT_CAP).unwrap();
        assert!(!rep.counterexamples.is_empty());
    }

    #[test]
    fn cube_translation() {
        let g = counter_rbn(1).unwrap();
        let r = RbnToAsms::new(&g.model);
        let ec = r.embed_cube(&g.c0);
        for n in 0..5 {
            for c in MultiSet::all_of_size(5, n) {
                assert_eq!(g.c0.contains_unchecked(&c), ec.contains(&r.embed(&c)));
            }
        }
    }
}
