//! Leader protocols: one leader process and any number of contributors.
//!
//! Contributors may start in any of several initial states. The register
//! example needs this: its contributors start in `b1` or `c1`.

use crate::analyses::AnalysisError;
use crate::cube::Bound;
use crate::engine::{reaches, ReachOutcome, Verdict};
use crate::model::{CubeSystem, LetterId, ModelError, StateId};
use crate::trace::RunTrace;
use crate::{AsmsCube, AsmsModel, Cube, RbnModel};

/// Models that can be combined into a leader instance.
pub trait LeaderModel: CubeSystem + Clone {
    fn merged(&self, other: &Self) -> Result<Self, ModelError>;
    fn state_id(&self, name: &str) -> Option<StateId>;
    fn letter_id(&self, name: &str) -> Option<LetterId>;
    fn make_cube(
        &self,
        processes: Cube,
        register: Option<LetterId>,
    ) -> Result<Self::Cube, AnalysisError>;
}

impl LeaderModel for RbnModel {
    fn merged(&self, other: &Self) -> Result<Self, ModelError> {
        self.merge(other)
    }

    fn state_id(&self, name: &str) -> Option<StateId> {
        self.state(name)
    }

    fn letter_id(&self, name: &str) -> Option<LetterId> {
        self.letter(name)
    }

    fn make_cube(&self, processes: Cube, register: Option<LetterId>) -> Result<Cube, AnalysisError> {
        match register {
            None => Ok(processes),
            Some(_) => Err(AnalysisError::Invalid(
                "broadcast networks have no register".into(),
            )),
        }
    }
}

impl LeaderModel for AsmsModel {
    fn merged(&self, other: &Self) -> Result<Self, ModelError> {
        self.merge(other)
    }

    fn state_id(&self, name: &str) -> Option<StateId> {
        self.state(name)
    }

    fn letter_id(&self, name: &str) -> Option<LetterId> {
        self.letter(name)
    }

    fn make_cube(
        &self,
        processes: Cube,
        register: Option<LetterId>,
    ) -> Result<AsmsCube, AnalysisError> {
        Ok(AsmsCube {
            processes,
            register,
        })
    }
}

#[derive(Clone, Debug)]
pub struct LeaderProtocol<M> {
    pub contributor: M,
    pub leader: M,
    pub leader_init: String,
    pub leader_final: String,
    pub contributor_init: Vec<String>,
    /// Initial register value (register models only).
    pub register_init: Option<String>,
    /// Final register value; `None` accepts any.
    pub register_final: Option<String>,
}

/// The merged model and the leader cubes. Contributor states come first.
#[derive(Clone, Debug)]
pub struct LeaderCubes<M: CubeSystem> {
    pub model: M,
    pub src: M::Cube,
    pub dst: M::Cube,
    pub leader_states: Vec<StateId>,
    pub contributor_init: Vec<StateId>,
}

fn lookup<M: LeaderModel>(m: &M, name: &str) -> Result<StateId, AnalysisError> {
    m.state_id(name)
        .ok_or_else(|| ModelError::UnknownState(name.to_string()).into())
}

fn lookup_letter<M: LeaderModel>(
    m: &M,
    name: &Option<String>,
) -> Result<Option<LetterId>, AnalysisError> {
    name.as_ref()
        .map(|n| {
            m.letter_id(n)
                .ok_or_else(|| ModelError::UnknownLetter(n.clone()).into())
        })
        .transpose()
}

/// Merges leader and contributors and builds the source and target cubes:
/// the source has exactly one process in the leader's initial state, no
/// other leader process, and any number of contributors in their initial
/// states; the target has exactly one process in the leader's final state
/// and no other leader process.
pub fn leader_to_cube<M: LeaderModel>(lp: &LeaderProtocol<M>) -> Result<LeaderCubes<M>, AnalysisError> {
    let model = lp.contributor.merged(&lp.leader)?;
    let contributors = lp.contributor.states().len();
    let dim = model.states().len();
    let leader_states: Vec<StateId> = (contributors..dim).map(|i| StateId(i as u32)).collect();
    let leader_init = lookup(&model, &lp.leader_init)?;
    let leader_final = lookup(&model, &lp.leader_final)?;
    for s in [leader_init, leader_final] {
        if s.index() < contributors {
            return Err(AnalysisError::Invalid(format!(
                "`{}` is not a leader state",
                model.states().name(s.0)
            )));
        }
    }
    let mut contributor_init = Vec::new();
    for n in &lp.contributor_init {
        let s = lookup(&model, n)?;
        if s.index() >= contributors {
            return Err(AnalysisError::Invalid(format!("`{n}` is not a contributor state")));
        }
        contributor_init.push(s);
    }
    let register_init = lookup_letter(&model, &lp.register_init)?;
    let register_final = lookup_letter(&model, &lp.register_final)?;

    let mut lower = vec![0; dim];
    let mut upper = vec![Bound::Finite(0); dim];
    lower[leader_init.index()] = 1;
    upper[leader_init.index()] = Bound::Finite(1);
    for s in &contributor_init {
        upper[s.index()] = Bound::Infinite;
    }
    let src = model.make_cube(Cube::new(lower, upper)?, register_init)?;

    let mut lower = vec![0; dim];
    let mut upper = vec![Bound::Infinite; dim];
    for s in &leader_states {
        upper[s.index()] = Bound::Finite(0);
    }
    lower[leader_final.index()] = 1;
    upper[leader_final.index()] = Bound::Finite(1);
    let dst = model.make_cube(Cube::new(lower, upper)?, register_final)?;
    Ok(LeaderCubes {
        model,
        src,
        dst,
        leader_states,
        contributor_init,
    })
}

#[derive(Clone, Debug)]
pub struct LeaderReport<C, L> {
    pub verdict: Verdict,
    /// Smallest contributor count with a witness.
    pub contributors: Option<u64>,
    pub witness: Option<RunTrace<C, L>>,
    pub inconclusive: bool,
}

/// Tries `k = 1..=k_max` contributors, distributed over the contributor
/// initial states in every possible way.
pub fn leader_reach_bounded<M: LeaderModel>(
    lp: &LeaderProtocol<M>,
    k_max: u64,
    cap: usize,
) -> Result<LeaderReport<M::Config, M::Label>, AnalysisError> {
    let cubes = leader_to_cube(lp)?;
    let m = &cubes.model;
    let mut inconclusive = false;
    for k in 1..=k_max {
        for c in m.cube_members(&cubes.src, k + 1) {
            match reaches(m, &c, |x| m.cube_contains(&cubes.dst, x), cap)? {
                ReachOutcome::Found(w) => {
                    return Ok(LeaderReport {
                        verdict: Verdict::Yes,
                        contributors: Some(k),
                        witness: Some(w),
                        inconclusive,
                    })
                }
                ReachOutcome::Inconclusive { .. } => inconclusive = true,
                ReachOutcome::Unreachable { .. } => {}
            }
        }
    }
    Ok(LeaderReport {
        verdict: Verdict::BoundedNo,
        contributors: None,
        witness: None,
        inconclusive,
    })
}

/// The register example split into leader `a1..a4` and contributors
/// `b1..b3`, `c1..c3`. With `leader_loop`, the leader may also write `1`
/// and stay in `a1`, which lets it feed both contributor branches.
pub fn fig2_leader(leader_loop: bool) -> LeaderProtocol<AsmsModel> {
    let alphabet = ["#", "1", "2", "3", "4"];
    let mut leader = AsmsModel::builder(["a1", "a2", "a3", "a4"]);
    let mut contributor = AsmsModel::builder(["b1", "b2", "b3", "c1", "c2", "c3"]);
    for a in alphabet {
        leader = leader.letter(a);
        contributor = contributor.letter(a);
    }
    leader = leader
        .write("a1", "1", "a2")
        .write("a1", "2", "a2")
        .read("a2", "3", "a3")
        .read("a3", "4", "a4");
    if leader_loop {
        leader = leader.write("a1", "1", "a1");
    }
    let contributor = contributor
        .read("b1", "1", "b2")
        .write("b2", "3", "b3")
        .read("c1", "2", "c2")
        .write("c2", "4", "c3");
    LeaderProtocol {
        contributor: contributor.build().expect("well-formed"),
        leader: leader.build().expect("well-formed"),
        leader_init: "a1".into(),
        leader_final: "a4".into(),
        contributor_init: vec!["b1".into(), "c1".into()],
        register_init: Some("#".into()),
        register_final: None,
    }
}

/// Checks the leader bound pattern on process cubes.
pub fn has_leader_pattern(
    src: &Cube,
    dst: &Cube,
    leader_states: &[StateId],
    leader_init: StateId,
    leader_final: StateId,
    contributor_init: &[StateId],
) -> bool {
    (0..src.dim()).all(|i| {
        let s = StateId(i as u32);
        let is_leader = leader_states.contains(&s);
        let src_ok = if s == leader_init {
            src.bounds(i) == (1, Bound::Finite(1))
        } else if contributor_init.contains(&s) {
            src.bounds(i) == (0, Bound::Infinite)
        } else {
            src.bounds(i) == (0, Bound::Finite(0))
        };
        let dst_ok = if s == leader_final {
            dst.bounds(i) == (1, Bound::Finite(1))
        } else if is_leader {
            dst.bounds(i) == (0, Bound::Finite(0))
        } else {
            dst.bounds(i) == (0, Bound::Infinite)
        };
        src_ok && dst_ok
    })
}
