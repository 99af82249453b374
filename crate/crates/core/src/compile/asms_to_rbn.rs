//! Simulating a shared register with a broadcast network.
//!
//! The register becomes a token process living in one state per register
//! value. Writing `a` is a handshake: the token in `d` broadcasts `Ch_a` and
//! moves to the barred state `~a`; writers of `a` that hear it park in an
//! intermediate state `[q,W(a),q']`. A parked writer leaves by broadcasting
//! `Ack_a`; the first acknowledgement the token hears moves it to `a`.
//! Reading is a broadcast `Read_d` by the token in `d`, heard by readers of
//! `d`. The embedding of `(M, d)` is `M` plus one token in `d`, so no extra
//! padding is needed. A configuration is good when there is exactly one
//! token, it is not barred, and no writer is parked.
//!
//! Decoding a run maps each acknowledgement heard by the token to a write
//! and each `Read_d` step to its reads. A writer that leaves without being
//! heard is credited right after the acknowledgement that completed the
//! round it joined. While the token is barred only acknowledgements can be
//! broadcast, and every such credit is a write of the value the register
//! already holds, so the moved write never changes what anyone observes.

use std::collections::VecDeque;

use crate::compile::{
    check_good_run, fresh_name, source_trace, CompileError, Reduction, ReductionKind, TraceOf,
};
use crate::cube::Bound;
use crate::model::{LetterId, StateId, SymbolTable};
use crate::{
    AsmsConfig, AsmsCube, AsmsModel, AsmsOp, Cube, MultiSet, RbnAction, RbnModel,
    RbnTransition,
};

/// What a target transition does in terms of the source model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    /// Writer hears `Ch_a` and parks (source write index).
    Enter(usize),
    /// Parked writer broadcasts `Ack_a` and leaves.
    Exit(usize),
    /// Reader hears `Read_d` (source read index).
    Read(usize),
    /// Token announces a write.
    Announce,
    /// Token hears an acknowledgement.
    Acknowledged,
    /// Token publishes its value.
    Publish,
}

#[derive(Clone, Debug)]
pub struct AsmsToRbn {
    source: AsmsModel,
    target: RbnModel,
    roles: Vec<Role>,
    // register value d lives in target state register_base + d
    register_base: usize,
    // helper states start here (barred tokens, then parked writers)
    helpers_start: usize,
}

impl AsmsToRbn {
    pub fn new(source: &AsmsModel) -> Self {
        let nq = source.state_count();
        let sigma = source.letters().len();
        let mut written: Vec<LetterId> = source
            .transitions()
            .iter()
            .filter_map(|t| match t.op {
                AsmsOp::Write(a) => Some(a),
                AsmsOp::Read(_) => None,
            })
            .collect();
        written.sort();
        written.dedup();

        let mut states = SymbolTable::new();
        for s in source.states().names() {
            states.insert(s);
        }
        for d in source.letters().names() {
            fresh_name(&mut states, d);
        }
        let mut barred = vec![None; sigma];
        for &a in &written {
            let name = format!("~{}", source.letters().name(a.0));
            barred[a.index()] = Some(StateId(fresh_name(&mut states, &name)));
        }
        let mut parked = vec![None; source.transitions().len()];
        for (i, t) in source.transitions().iter().enumerate() {
            if matches!(t.op, AsmsOp::Write(_)) {
                parked[i] = Some(StateId(fresh_name(
                    &mut states,
                    &format!("[{}]", source.describe_transition(i).replace(' ', ",")),
                )));
            }
        }

        let mut letters = SymbolTable::new();
        let mut ch = vec![None; sigma];
        let mut ack = vec![None; sigma];
        for &a in &written {
            let name = source.letters().name(a.0);
            ch[a.index()] = Some(LetterId(fresh_name(&mut letters, &format!("Ch_{name}"))));
            ack[a.index()] = Some(LetterId(fresh_name(&mut letters, &format!("Ack_{name}"))));
        }
        let read: Vec<LetterId> = source
            .letters()
            .names()
            .iter()
            .map(|d| LetterId(fresh_name(&mut letters, &format!("Read_{d}"))))
            .collect();

        let reg = |d: usize| StateId((nq + d) as u32);
        let mut transitions = Vec::new();
        let mut roles = Vec::new();
        let mut push = |source: StateId, action: RbnAction, target: StateId, role: Role| {
            transitions.push(RbnTransition {
                source,
                action,
                target,
            });
            roles.push(role);
        };
        for (i, t) in source.transitions().iter().enumerate() {
            match t.op {
                AsmsOp::Write(a) => {
                    let mid = parked[i].unwrap();
                    push(t.source, RbnAction::Receive(ch[a.index()].unwrap()), mid, Role::Enter(i));
                    push(mid, RbnAction::Broadcast(ack[a.index()].unwrap()), t.target, Role::Exit(i));
                }
                AsmsOp::Read(d) => {
                    push(t.source, RbnAction::Receive(read[d.index()]), t.target, Role::Read(i));
                }
            }
        }
        for d in 0..sigma {
            for &a in &written {
                push(
                    reg(d),
                    RbnAction::Broadcast(ch[a.index()].unwrap()),
                    barred[a.index()].unwrap(),
                    Role::Announce,
                );
            }
        }
        for &a in &written {
            push(
                barred[a.index()].unwrap(),
                RbnAction::Receive(ack[a.index()].unwrap()),
                reg(a.index()),
                Role::Acknowledged,
            );
        }
        for (d, &l) in read.iter().enumerate() {
            push(reg(d), RbnAction::Broadcast(l), reg(d), Role::Publish);
        }
        let target = RbnModel::from_tables(states, letters, transitions)
            .expect("compiled model is well-formed");
        Self {
            source: source.clone(),
            target,
            roles,
            register_base: nq,
            helpers_start: nq + sigma,
        }
    }

    /// Target state holding the token when the register is `d`.
    pub fn register_state(&self, d: LetterId) -> StateId {
        StateId((self.register_base + d.index()) as u32)
    }
}

impl Reduction for AsmsToRbn {
    type Source = AsmsModel;
    type Target = RbnModel;

    fn kind(&self) -> ReductionKind {
        ReductionKind::AsmsToRbn
    }

    fn source(&self) -> &AsmsModel {
        &self.source
    }

    fn target(&self) -> &RbnModel {
        &self.target
    }

    fn embed(&self, c: &AsmsConfig) -> MultiSet {
        let mut m = c.processes.extend_to(self.target.state_count());
        m.increment(self.register_state(c.register).index(), 1);
        m
    }

    fn decode_config(&self, c: &MultiSet) -> Option<AsmsConfig> {
        let nq = self.register_base;
        if (self.helpers_start..c.dim()).any(|i| c.get(i) > 0) {
            return None;
        }
        let tokens: Vec<usize> = (nq..self.helpers_start).filter(|&i| c.get(i) > 0).collect();
        match tokens[..] {
            [d] if c.get(d) == 1 => Some(AsmsConfig::new(
                c.truncate(nq),
                LetterId((d - nq) as u32),
            )),
            _ => None,
        }
    }

    fn embed_cube(&self, cube: &AsmsCube) -> Cube {
        let n = self.target.state_count();
        let mut lower = cube.processes.lower().to_vec();
        let mut upper = cube.processes.upper().to_vec();
        lower.resize(n, 0);
        upper.resize(n, Bound::Finite(0));
        let processes = Cube::new(lower, upper).expect("source cube is non-empty");
        match cube.register {
            Some(d) => processes.with_exact(self.register_state(d).index(), 1),
            // one token somewhere: exact on every configuration the
            // embedding can produce, since those carry exactly one token
            None => (self.register_base..self.helpers_start).fold(processes, |c, i| {
                c.with_bounds(i, 0, Bound::Finite(1)).expect("non-empty")
            }),
        }
    }

    fn decode_run(&self, run: &TraceOf<RbnModel>) -> Result<TraceOf<AsmsModel>, CompileError> {
        check_good_run(self, run)?;
        let n = run.len();
        let mut emit: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut queues: Vec<VecDeque<usize>> = vec![VecDeque::new(); self.roles.len()];
        let mut completed: Vec<Option<usize>> = Vec::new();
        let mut waiting: Vec<Vec<usize>> = Vec::new();
        for (i, label) in run.labels().enumerate() {
            match self.roles[label.broadcast] {
                Role::Announce => {
                    let round = completed.len();
                    completed.push(None);
                    waiting.push(Vec::new());
                    for &r in &label.receivers {
                        match self.roles[r] {
                            Role::Enter(w) => queues[w].push_back(round),
                            other => unreachable!("{other:?} cannot hear an announcement"),
                        }
                    }
                }
                Role::Exit(w) => {
                    let joined = queues[w].pop_front().ok_or_else(|| {
                        CompileError::NotDecomposable("writer leaves without joining".into())
                    })?;
                    if label.receivers.is_empty() {
                        match completed[joined] {
                            Some(at) => emit[at].push(w),
                            None => waiting[joined].push(w),
                        }
                    } else {
                        let round = completed.len() - 1;
                        completed[round] = Some(i);
                        emit[i].push(w);
                        emit[i].append(&mut waiting[round]);
                    }
                }
                Role::Publish => {
                    for &r in &label.receivers {
                        match self.roles[r] {
                            Role::Read(src) => emit[i].push(src),
                            other => unreachable!("{other:?} cannot hear a read"),
                        }
                    }
                }
                other => unreachable!("{other:?} is not a broadcast"),
            }
        }
        if waiting.iter().any(|w| !w.is_empty()) {
            return Err(CompileError::NotDecomposable(
                "a write round never completes".into(),
            ));
        }
        let initial = self.decode_config(&run.initial).expect("checked good");
        let end = self.decode_config(run.last()).expect("checked good");
        source_trace(&self.source, initial, emit.concat(), &end)
    }

    fn padding(&self) -> String {
        "empty (the register token is part of the embedding)".into()
    }

    fn padding_size(&self) -> u64 {
        0
    }
}
