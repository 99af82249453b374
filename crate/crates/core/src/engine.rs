//! Explicit-state exploration of fixed-population configuration spaces.
//!
//! All three models conserve the number of processes, so the configurations
//! reachable from one configuration form a finite graph. The engine explores
//! that graph breadth first. Each BFS layer is expanded in parallel and then
//! sorted by configuration before insertion, so stored configurations,
//! parent pointers and witnesses do not depend on thread scheduling.

use std::collections::VecDeque;
use std::fmt;
use std::ops::RangeInclusive;

use indexmap::IndexMap;
use rayon::prelude::*;

use crate::model::{CubeSystem, LetterId, StateId, TransitionSystem};
use crate::trace::RunTrace;
use crate::{AsmsConfig, AsmsModel, IoNetModel, MultiSet, RbnAction, RbnModel, ResourceError};

/// Default cap on stored configurations.
pub const DEFAULT_CAP: usize = 5_000_000;
/// Default largest population tried when a cube is unbounded.
pub const DEFAULT_MAX_POPULATION: u64 = 8;

/// Three-valued reachability verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Yes,
    No,
    /// No witness within the explored bounds; not a proof of unreachability.
    BoundedNo,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::BoundedNo => "bounded-no",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Configurations reachable from one initial configuration.
#[derive(Clone, Debug)]
pub struct ReachResult<C, L> {
    /// Reached configurations in discovery order; the first is the initial one.
    pub reached: Vec<C>,
    pub witness: Option<RunTrace<C, L>>,
    /// True when the whole reachable set fit under the cap.
    pub exhausted: bool,
}

/// Outcome of a targeted search.
#[derive(Clone, Debug, PartialEq)]
pub enum ReachOutcome<C, L> {
    Found(RunTrace<C, L>),
    /// The full reachable set was explored without meeting the target.
    Unreachable { explored: usize },
    /// The cap was hit before the target was met.
    Inconclusive { explored: usize },
}

impl<C, L> ReachOutcome<C, L> {
    pub fn witness(&self) -> Option<&RunTrace<C, L>> {
        match self {
            ReachOutcome::Found(t) => Some(t),
            _ => None,
        }
    }
}

struct Exploration<C, L> {
    store: IndexMap<C, Option<(usize, L)>>,
    edges: Vec<Vec<usize>>,
    exhausted: bool,
    hit: Option<usize>,
}

impl<C: Clone + Eq + std::hash::Hash, L: Clone> Exploration<C, L> {
    fn witness(&self, mut node: usize) -> RunTrace<C, L> {
        let mut rev = Vec::new();
        while let Some((parent, label)) = &self.store[node] {
            rev.push((label.clone(), self.store.get_index(node).unwrap().0.clone()));
            node = *parent;
        }
        let mut trace = RunTrace::empty(self.store.get_index(node).unwrap().0.clone());
        for (l, c) in rev.into_iter().rev() {
            trace.push(l, c);
        }
        trace
    }
}

fn explore<S, F>(
    system: &S,
    initial: &S::Config,
    cap: usize,
    record_edges: bool,
    mut stop: F,
) -> Result<Exploration<S::Config, S::Label>, ResourceError>
where
    S: TransitionSystem,
    F: FnMut(&S::Config) -> bool,
{
    let population = system.population(initial);
    let mut ex = Exploration {
        store: IndexMap::new(),
        edges: Vec::new(),
        exhausted: true,
        hit: None,
    };
    ex.store.insert(initial.clone(), None);
    if record_edges {
        ex.edges.push(Vec::new());
    }
    if stop(initial) {
        ex.hit = Some(0);
        ex.exhausted = false;
        return Ok(ex);
    }
    let mut layer = vec![0usize];
    while !layer.is_empty() {
        let store = &ex.store;
        let expanded: Vec<Result<Vec<(S::Label, S::Config)>, ResourceError>> = layer
            .par_iter()
            .map(|&i| system.successors(store.get_index(i).unwrap().0))
            .collect();
        let mut next = Vec::new();
        for (&i, succ) in layer.iter().zip(expanded) {
            for (label, c) in succ? {
                if let Some(j) = ex.store.get_index_of(&c) {
                    if record_edges {
                        ex.edges[i].push(j);
                    }
                    continue;
                }
                if ex.store.len() >= cap {
                    ex.exhausted = false;
                    return Ok(ex);
                }
                assert_eq!(
                    system.population(&c),
                    population,
                    "a step changed the population"
                );
                let hit = stop(&c);
                ex.store.insert(c, Some((i, label)));
                let j = ex.store.len() - 1;
                if record_edges {
                    ex.edges.push(Vec::new());
                    ex.edges[i].push(j);
                }
                if hit {
                    ex.hit = Some(j);
                    ex.exhausted = false;
                    return Ok(ex);
                }
                next.push(j);
            }
        }
        next.sort_by(|&a, &b| {
            ex.store
                .get_index(a)
                .unwrap()
                .0
                .cmp(ex.store.get_index(b).unwrap().0)
        });
        layer = next;
    }
    Ok(ex)
}

/// Breadth-first closure of `initial` under single steps, stopping once
/// `cap` configurations are stored.
pub fn post_star<S: TransitionSystem>(
    system: &S,
    initial: &S::Config,
    cap: usize,
) -> Result<ReachResult<S::Config, S::Label>, ResourceError> {
    let ex = explore(system, initial, cap, false, |_| false)?;
    Ok(ReachResult {
        reached: ex.store.into_keys().collect(),
        witness: None,
        exhausted: ex.exhausted,
    })
}

/// Searches for a reachable configuration satisfying `target`; the witness
/// is a shortest run.
pub fn reaches<S, F>(
    system: &S,
    initial: &S::Config,
    target: F,
    cap: usize,
) -> Result<ReachOutcome<S::Config, S::Label>, ResourceError>
where
    S: TransitionSystem,
    F: FnMut(&S::Config) -> bool,
{
    let ex = explore(system, initial, cap, false, target)?;
    Ok(match ex.hit {
        Some(node) => ReachOutcome::Found(ex.witness(node)),
        None if ex.exhausted => ReachOutcome::Unreachable {
            explored: ex.store.len(),
        },
        None => ReachOutcome::Inconclusive {
            explored: ex.store.len(),
        },
    })
}

/// Report of a bounded cube-to-cube search.
#[derive(Clone, Debug)]
pub struct CubeReachReport<C, L> {
    pub verdict: Verdict,
    pub witness: Option<RunTrace<C, L>>,
    pub sources_tried: usize,
    pub note: String,
}

/// Looks for a member of `src` with population in `populations` that
/// reaches a member of `dst`.
///
/// Sources are tried in increasing population, lexicographically within one
/// population. The verdict is `No` only when `src` has finite upper bounds,
/// every population it admits was tried, and every search was exhaustive.
pub fn cube_reach_bounded<S: CubeSystem>(
    system: &S,
    src: &S::Cube,
    dst: &S::Cube,
    populations: RangeInclusive<u64>,
    cap: usize,
) -> Result<CubeReachReport<S::Config, S::Label>, ResourceError> {
    let (min_pop, max_pop) = system.cube_population_range(src);
    let mut tried = 0usize;
    let mut all_exhausted = true;
    for n in populations.clone() {
        for c in system.cube_members(src, n) {
            tried += 1;
            match reaches(system, &c, |x| system.cube_contains(dst, x), cap)? {
                ReachOutcome::Found(w) => {
                    return Ok(CubeReachReport {
                        verdict: Verdict::Yes,
                        witness: Some(w),
                        sources_tried: tried,
                        note: format!("witness from a source of population {n}"),
                    })
                }
                ReachOutcome::Unreachable { .. } => {}
                ReachOutcome::Inconclusive { .. } => all_exhausted = false,
            }
        }
    }
    let covers_src = match max_pop {
        Some(hi) => *populations.start() <= min_pop && hi <= *populations.end(),
        None => false,
    };
    let note = if tried == 0 {
        format!(
            "source cube has no member with population in {}..{}",
            populations.start(),
            populations.end()
        )
    } else if covers_src && all_exhausted {
        format!("all {tried} source configurations explored exhaustively")
    } else if !all_exhausted {
        "configuration cap reached for some source".to_string()
    } else {
        format!(
            "no witness from {tried} sources with population in {}..{}",
            populations.start(),
            populations.end()
        )
    };
    Ok(CubeReachReport {
        verdict: if covers_src && all_exhausted && tried > 0 {
            Verdict::No
        } else {
            Verdict::BoundedNo
        },
        witness: None,
        sources_tried: tried,
        note,
    })
}

/// Constructs `k` processes in one state (plus a register value for ASMS).
pub trait UniformConfig: TransitionSystem {
    fn uniform(&self, state: StateId, count: u64, register: Option<LetterId>) -> Self::Config;
}

impl UniformConfig for RbnModel {
    fn uniform(&self, state: StateId, count: u64, _register: Option<LetterId>) -> MultiSet {
        MultiSet::from_pairs(self.state_count(), [(state.index(), count)])
    }
}

impl UniformConfig for IoNetModel {
    fn uniform(&self, state: StateId, count: u64, _register: Option<LetterId>) -> MultiSet {
        MultiSet::from_pairs(self.state_count(), [(state.index(), count)])
    }
}

impl UniformConfig for AsmsModel {
    fn uniform(&self, state: StateId, count: u64, register: Option<LetterId>) -> AsmsConfig {
        AsmsConfig::new(
            MultiSet::from_pairs(self.state_count(), [(state.index(), count)]),
            register.unwrap_or(LetterId(0)),
        )
    }
}

/// Result of the fixed-population almost-sure coverability check.
#[derive(Clone, Debug)]
pub struct AlmostSureReport<C> {
    pub holds: bool,
    pub reachable: usize,
    /// A reachable configuration from which the target cannot be covered.
    pub counterexample: Option<C>,
}

/// Decides `post*(initial) ⊆ pre*(↑target)` on the materialized graph.
///
/// `pre*` is taken by reverse reachability inside the graph of `post*`,
/// which is exact because every path from a reachable configuration stays
/// reachable. Hitting the cap is an error since a partial graph would make
/// the answer unsound.
pub fn almost_sure_cover<S: TransitionSystem>(
    system: &S,
    initial: &S::Config,
    target: StateId,
    cap: usize,
) -> Result<AlmostSureReport<S::Config>, ResourceError> {
    let ex = explore(system, initial, cap, true, |_| false)?;
    if !ex.exhausted {
        return Err(ResourceError {
            what: "configuration graph",
            cap,
        });
    }
    let n = ex.store.len();
    let mut reverse = vec![Vec::new(); n];
    for (i, succ) in ex.edges.iter().enumerate() {
        for &j in succ {
            reverse[j].push(i);
        }
    }
    let mut can_cover = vec![false; n];
    let mut queue = VecDeque::new();
    for (i, (c, _)) in ex.store.iter().enumerate() {
        if system.covers(c, target) {
            can_cover[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(j) = queue.pop_front() {
        for &i in &reverse[j] {
            if !can_cover[i] {
                can_cover[i] = true;
                queue.push_back(i);
            }
        }
    }
    let bad = can_cover.iter().position(|&b| !b);
    Ok(AlmostSureReport {
        holds: bad.is_none(),
        reachable: n,
        counterexample: bad.map(|i| ex.store.get_index(i).unwrap().0.clone()),
    })
}

/// `almost_sure_cover` from `k` processes in `initial_state`.
pub fn almost_sure_cover_fixed_k<S: UniformConfig>(
    system: &S,
    initial_state: StateId,
    target: StateId,
    k: u64,
    register: Option<LetterId>,
    cap: usize,
) -> Result<bool, ResourceError> {
    let c0 = system.uniform(initial_state, k, register);
    Ok(almost_sure_cover(system, &c0, target, cap)?.holds)
}

/// States coverable in an RBN from arbitrarily many processes in `initial`.
///
/// Least fixpoint: a broadcast `p -!a-> q` with `p` in the set adds `q`, and
/// makes every receive `r -?a-> r'` with `r` in the set add `r'`. Enough
/// copies of each coverable state exist for any finite demand, since
/// processes not needed for a run can abstain from every reception.
pub fn saturation(model: &RbnModel, initial: &[StateId]) -> Vec<bool> {
    let mut inside = vec![false; model.state_count()];
    for s in initial {
        inside[s.index()] = true;
    }
    let mut letters = vec![false; model.letters().len()];
    loop {
        let mut changed = false;
        for t in model.transitions() {
            if !inside[t.source.index()] {
                continue;
            }
            let a = t.action.letter().index();
            match t.action {
                RbnAction::Broadcast(_) => {
                    if !letters[a] {
                        letters[a] = true;
                        changed = true;
                    }
                    if !inside[t.target.index()] {
                        inside[t.target.index()] = true;
                        changed = true;
                    }
                }
                RbnAction::Receive(_) => {
                    if letters[a] && !inside[t.target.index()] {
                        inside[t.target.index()] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return inside;
        }
    }
}

/// Whether `target` is coverable from some configuration supported on `initial`.
pub fn saturate_coverable_rbn(model: &RbnModel, initial: &[StateId], target: StateId) -> bool {
    saturation(model, initial)[target.index()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyses::generators::{counter_rbn, fig2_asms};

    fn fig1_conf(m: &RbnModel, pairs: &[(&str, u64)]) -> MultiSet {
        MultiSet::from_pairs(
            m.state_count(),
            pairs.iter().map(|(s, n)| (m.state(s).unwrap().index(), *n)),
        )
    }

    #[test]
    fn post_star_of_single_token() {
        let m = counter_rbn(3).unwrap().model;
        let r = post_star(&m, &fig1_conf(&m, &[("tok", 1)]), DEFAULT_CAP).unwrap();
        assert!(r.exhausted);
        assert_eq!(
            r.reached,
            vec![fig1_conf(&m, &[("tok", 1)]), fig1_conf(&m, &[("sent", 1)])]
        );
    }

    #[test]
    fn post_star_of_dead_configuration() {
        let m = counter_rbn(1).unwrap().model;
        let c = fig1_conf(&m, &[("a1", 2)]);
        let r = post_star(&m, &c, 10).unwrap();
        assert_eq!(r.reached, vec![c]);
        assert!(r.exhausted);
    }

    #[test]
    fn post_star_cap_gives_partial_result() {
        let m = counter_rbn(2).unwrap().model;
        let c = fig1_conf(&m, &[("tok", 4), ("a1", 1), ("a2", 1)]);
        let r = post_star(&m, &c, 3).unwrap();
        assert!(!r.exhausted);
        assert_eq!(r.reached.len(), 3);
    }

    #[test]
    fn fig2_writer_writes_one_value() {
        let g = fig2_asms();
        let m = &g.model;
        let st = |n: &str| m.state(n).unwrap().index();
        let c0 = AsmsConfig::new(
            MultiSet::from_pairs(m.state_count(), [(st("a1"), 1)]),
            m.letter("#").unwrap(),
        );
        let r = post_star(m, &c0, DEFAULT_CAP).unwrap();
        let a2 = MultiSet::from_pairs(m.state_count(), [(st("a2"), 1)]);
        assert!(r.reached.contains(&AsmsConfig::new(a2.clone(), m.letter("1").unwrap())));
        assert!(r.reached.contains(&AsmsConfig::new(a2, m.letter("2").unwrap())));
        assert!(r.reached.iter().all(|c| c.processes.get(st("a3")) == 0));
    }

    #[test]
    fn counter_reaches_c1_with_two_tokens() {
        let m = counter_rbn(3).unwrap().model;
        let c1 = m.state("c1").unwrap();
        let out = reaches(
            &m,
            &fig1_conf(&m, &[("tok", 2), ("a1", 1)]),
            |c| c.get(c1.index()) > 0,
            DEFAULT_CAP,
        )
        .unwrap();
        let w = out.witness().expect("reachable");
        // two broadcast steps, each heard by the single a1 process
        assert_eq!(w.len(), 2);
        let firings: usize = w.labels().map(|l| 1 + l.receivers.len()).sum();
        assert_eq!(firings, 4);
        assert!(crate::replay(&m, w).ok);

        let out = reaches(
            &m,
            &fig1_conf(&m, &[("tok", 1), ("a1", 1)]),
            |c| c.get(c1.index()) > 0,
            DEFAULT_CAP,
        )
        .unwrap();
        assert!(matches!(out, ReachOutcome::Unreachable { .. }));
    }

    #[test]
    fn target_already_satisfied_gives_empty_witness() {
        let m = counter_rbn(1).unwrap().model;
        let c = fig1_conf(&m, &[("c1", 1)]);
        let out = reaches(&m, &c, |x| x.get(4) > 0, 10).unwrap();
        assert_eq!(out.witness().unwrap().len(), 0);
    }

    #[test]
    fn reaches_inconclusive_under_small_cap() {
        let m = counter_rbn(3).unwrap().model;
        let c3 = m.state("c3").unwrap().index();
        let out = reaches(
            &m,
            &fig1_conf(&m, &[("tok", 8), ("a1", 1), ("a2", 1), ("a3", 1)]),
            |c| c.get(c3) > 0,
            5,
        )
        .unwrap();
        assert!(matches!(out, ReachOutcome::Inconclusive { .. }));
    }

    #[test]
    fn singleton_cube_reaches_itself() {
        let m = counter_rbn(1).unwrap().model;
        let c = fig1_conf(&m, &[("tok", 1), ("a1", 1)]);
        let cube = crate::Cube::singleton(&c);
        let r = cube_reach_bounded(&m, &cube, &cube, 0..=4, DEFAULT_CAP).unwrap();
        assert_eq!(r.verdict, Verdict::Yes);
        assert_eq!(r.witness.unwrap().len(), 0);
    }

    #[test]
    fn empty_source_within_bounds_is_bounded_no() {
        let m = counter_rbn(1).unwrap().model;
        let c = fig1_conf(&m, &[("tok", 3), ("a1", 1)]);
        let cube = crate::Cube::singleton(&c);
        let r = cube_reach_bounded(&m, &cube, &cube, 0..=2, DEFAULT_CAP).unwrap();
        assert_eq!(r.verdict, Verdict::BoundedNo);
        assert_eq!(r.sources_tried, 0);
        assert!(r.note.contains("no member"));
    }

    fn broadcast_model(with_dead: bool) -> RbnModel {
        let mut b = RbnModel::builder(["qi", "qf", "dead"]).broadcast("qi", "a", "qf");
        if with_dead {
            b = b.broadcast("qi", "a", "dead");
        }
        b.build().unwrap()
    }

    #[test]
    fn almost_sure_examples() {
        let m = broadcast_model(false);
        let (qi, qf) = (m.state("qi").unwrap(), m.state("qf").unwrap());
        for k in 1..=4 {
            assert!(almost_sure_cover_fixed_k(&m, qi, qf, k, None, DEFAULT_CAP).unwrap());
        }
        let m = broadcast_model(true);
        assert!(!almost_sure_cover_fixed_k(&m, qi, qf, 1, None, DEFAULT_CAP).unwrap());
        let rep = almost_sure_cover(&m, &m.uniform(qi, 1, None), qf, DEFAULT_CAP).unwrap();
        assert_eq!(
            rep.counterexample,
            Some(MultiSet::from_counts(vec![0, 0, 1]))
        );
    }

    #[test]
    fn almost_sure_cap_is_an_error() {
        let m = broadcast_model(true);
        let qi = m.state("qi").unwrap();
        assert!(almost_sure_cover_fixed_k(&m, qi, StateId(1), 5, None, 2).is_err());
    }

    #[test]
    fn saturation_examples() {
        let m = counter_rbn(3).unwrap().model;
        let ids = |ns: &[&str]| ns.iter().map(|n| m.state(n).unwrap()).collect::<Vec<_>>();
        assert!(saturate_coverable_rbn(
            &m,
            &ids(&["tok", "a1", "a2", "a3"]),
            m.state("c3").unwrap()
        ));
        assert!(saturate_coverable_rbn(&m, &ids(&["c2"]), m.state("c2").unwrap()));
        assert!(!saturate_coverable_rbn(
            &m,
            &ids(&["a1", "a2", "a3"]),
            m.state("b1").unwrap()
        ));
    }
}
