//! Built-in example models and random model generators.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::analyses::AnalysisError;
use crate::cube::Bound;
use crate::model::{LetterId, StateId};
use crate::{
    AsmsCube, AsmsModel, AsmsOp, AsmsTransition, Cube, IoNetModel, IoTransition, RbnAction,
    RbnModel, RbnTransition,
};

/// The counter network `R_n` with its initial and final cubes.
#[derive(Clone, Debug)]
pub struct CounterFamily {
    pub model: RbnModel,
    /// Exactly one process in each `a_i`, any number in `tok`, nothing else.
    pub c0: Cube,
    /// At least one process in `c_n`.
    pub cf: Cube,
}

impl CounterFamily {
    /// `c0` with exactly `tok` processes in `tok`.
    pub fn c0_with_tokens(&self, tok: u64) -> Cube {
        self.c0.clone().with_exact(0, tok)
    }
}

/// `R_n`: a token process broadcasts `1`; the process in `a_i` must hear `i`
/// twice before it broadcasts `i+1`. Covering `c_n` needs `2^n` tokens.
pub fn counter_rbn(n: usize) -> Result<CounterFamily, AnalysisError> {
    if n == 0 {
        return Err(AnalysisError::Invalid("counter size must be at least 1".into()));
    }
    let mut states = vec!["tok".to_string(), "sent".to_string()];
    for i in 1..=n {
        states.extend([format!("a{i}"), format!("b{i}"), format!("c{i}")]);
    }
    let mut b = RbnModel::builder(&states).broadcast("tok", "1", "sent");
    for i in 1..=n {
        let (a, bb, c) = (format!("a{i}"), format!("b{i}"), format!("c{i}"));
        let l = i.to_string();
        b = b
            .receive(&a, &l, &bb)
            .receive(&bb, &l, &c)
            .broadcast(&c, &(i + 1).to_string(), &a);
    }
    let model = b.build()?;
    let dim = model.state_count();
    let mut lower = vec![0; dim];
    let mut upper = vec![Bound::Finite(0); dim];
    upper[0] = Bound::Infinite;
    for i in 0..n {
        lower[2 + 3 * i] = 1;
        upper[2 + 3 * i] = Bound::Finite(1);
    }
    let c0 = Cube::new(lower, upper)?;
    let cf = Cube::universal(dim).with_bounds(dim - 1, 1, Bound::Infinite)?;
    Ok(CounterFamily { model, c0, cf })
}

#[derive(Clone, Debug)]
pub struct Fig2 {
    pub model: AsmsModel,
    /// One process in `a1`, any number in `b1` and `c1`, register `#`.
    pub src: AsmsCube,
    /// At least one process in `a4`, any register value.
    pub dst: AsmsCube,
}

impl Fig2 {
    /// `src` with at most `k` processes in each of `b1` and `c1`.
    pub fn src_bounded(&self, k: u64) -> AsmsCube {
        let b1 = self.model.state("b1").unwrap().index();
        let c1 = self.model.state("c1").unwrap().index();
        let processes = self
            .src
            .processes
            .clone()
            .with_bounds(b1, 0, Bound::Finite(k))
            .and_then(|c| c.with_bounds(c1, 0, Bound::Finite(k)))
            .expect("non-empty");
        AsmsCube {
            processes,
            register: self.src.register,
        }
    }
}

/// The ten-state register protocol where the `a` process must read `3` and
/// then `4`, which are only written after `1` and `2` respectively. One
/// process in `a1` can write only one of `1` and `2`.
pub fn fig2_asms() -> Fig2 {
    let model = AsmsModel::builder([
        "a1", "a2", "a3", "a4", "b1", "b2", "b3", "c1", "c2", "c3",
    ])
    .letter("#")
    .letter("1")
    .letter("2")
    .letter("3")
    .letter("4")
    .write("a1", "1", "a2")
    .write("a1", "2", "a2")
    .read("a2", "3", "a3")
    .read("a3", "4", "a4")
    .read("b1", "1", "b2")
    .write("b2", "3", "b3")
    .read("c1", "2", "c2")
    .write("c2", "4", "c3")
    .build()
    .expect("well-formed");
    let dim = model.state_count();
    let st = |n: &str| model.state(n).unwrap().index();
    let mut lower = vec![0; dim];
    let mut upper = vec![Bound::Finite(0); dim];
    lower[st("a1")] = 1;
    upper[st("a1")] = Bound::Finite(1);
    upper[st("b1")] = Bound::Infinite;
    upper[st("c1")] = Bound::Infinite;
    let src = AsmsCube::new(
        Cube::new(lower, upper).expect("non-empty"),
        model.letter("#").unwrap(),
    );
    let dst = AsmsCube::any_register(
        Cube::universal(dim)
            .with_bounds(st("a4"), 1, Bound::Infinite)
            .expect("non-empty"),
    );
    Fig2 { model, src, dst }
}

/// Almost-sure coverage of `c` from `k` processes in `qI` fails for `k = 1`
/// and holds for every `k >= 2`: the first broadcaster becomes a token that
/// can broadcast `1` forever, and `c` needs a second process to hear it
/// twice.
pub fn threshold_rbn() -> RbnModel {
    RbnModel::builder(["qI", "tok", "a", "b", "c"])
        .broadcast("qI", "x", "tok")
        .receive("qI", "x", "a")
        .broadcast("tok", "1", "tok")
        .broadcast("tok", "y", "tok")
        .receive("tok", "y", "a")
        .receive("qI", "y", "a")
        .receive("a", "1", "b")
        .receive("b", "1", "c")
        .build()
        .expect("well-formed")
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A random RBN with `states` states, up to `max_transitions` distinct
/// transitions and `letters` letters.
pub fn random_rbn<R: Rng>(
    rng: &mut R,
    states: usize,
    max_transitions: usize,
    letters: usize,
) -> RbnModel {
    let count = rng.gen_range(0..=max_transitions);
    let mut ts: Vec<RbnTransition> = Vec::new();
    for _ in 0..count {
        let a = LetterId(rng.gen_range(0..letters) as u32);
        let t = RbnTransition {
            source: StateId(rng.gen_range(0..states) as u32),
            action: if rng.gen_bool(0.5) {
                RbnAction::Broadcast(a)
            } else {
                RbnAction::Receive(a)
            },
            target: StateId(rng.gen_range(0..states) as u32),
        };
        if !ts.contains(&t) {
            ts.push(t);
        }
    }
    RbnModel::new(names("s", states), names("m", letters), ts).expect("well-formed")
}

/// A random ASMS; letter `0` is named `#`.
pub fn random_asms<R: Rng>(
    rng: &mut R,
    states: usize,
    max_transitions: usize,
    letters: usize,
) -> AsmsModel {
    let count = rng.gen_range(0..=max_transitions);
    let mut ts: Vec<AsmsTransition> = Vec::new();
    for _ in 0..count {
        let a = LetterId(rng.gen_range(0..letters) as u32);
        let t = AsmsTransition {
            source: StateId(rng.gen_range(0..states) as u32),
            op: if rng.gen_bool(0.5) {
                AsmsOp::Write(a)
            } else {
                AsmsOp::Read(a)
            },
            target: StateId(rng.gen_range(0..states) as u32),
        };
        if !ts.contains(&t) {
            ts.push(t);
        }
    }
    let mut letter_names = names("v", letters);
    letter_names[0] = "#".into();
    AsmsModel::new(names("s", states), letter_names, ts).expect("well-formed")
}

/// A random IO net.
pub fn random_io<R: Rng>(rng: &mut R, states: usize, max_transitions: usize) -> IoNetModel {
    let count = rng.gen_range(0..=max_transitions);
    let mut ts: Vec<IoTransition> = Vec::new();
    let all: Vec<u32> = (0..states as u32).collect();
    for _ in 0..count {
        let pick = |rng: &mut R| StateId(*all.choose(rng).unwrap());
        let t = IoTransition {
            source: pick(rng),
            observed: pick(rng),
            target: pick(rng),
        };
        if !ts.contains(&t) {
            ts.push(t);
        }
    }
    IoNetModel::new(names("s", states), ts).expect("well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{cube_reach_bounded, Verdict, DEFAULT_CAP};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn counter_shapes() {
        let g = counter_rbn(3).unwrap();
        assert_eq!(g.model.state_count(), 11);
        assert_eq!(g.model.transitions().len(), 10);
        let g1 = counter_rbn(1).unwrap();
        assert_eq!(g1.model.state_count(), 5);
        assert_eq!(g1.model.transitions().len(), 4);
        assert!(counter_rbn(0).is_err());
    }

    #[test]
    fn counter_two_needs_four_tokens() {
        let g = counter_rbn(2).unwrap();
        let minimal = (1..=4).find(|&tok| {
            let r = cube_reach_bounded(&g.model, &g.c0_with_tokens(tok), &g.cf, 0..=10, DEFAULT_CAP)
                .unwrap();
            r.verdict == Verdict::Yes
        });
        assert_eq!(minimal, Some(4));
    }

    #[test]
    fn fig2_shape() {
        let g = fig2_asms();
        let m = &g.model;
        let write = |a: &str| AsmsTransition {
            source: m.state("a1").unwrap(),
            op: AsmsOp::Write(m.letter(a).unwrap()),
            target: m.state("a2").unwrap(),
        };
        assert!(m.find_transition(&write("1")).is_some());
        assert!(m.find_transition(&write("2")).is_some());
        let a1 = m.state("a1").unwrap().index();
        assert_eq!(g.src.processes.bounds(a1), (1, Bound::Finite(1)));
    }

    #[test]
    fn fig2_a4_unreachable_small() {
        let g = fig2_asms();
        let r = cube_reach_bounded(&g.model, &g.src, &g.dst, 0..=5, DEFAULT_CAP).unwrap();
        assert_eq!(r.verdict, Verdict::BoundedNo);
    }

    #[test]
    fn random_models_are_deterministic() {
        let a = random_rbn(&mut ChaCha8Rng::seed_from_u64(7), 4, 6, 2);
        let b = random_rbn(&mut ChaCha8Rng::seed_from_u64(7), 4, 6, 2);
        assert_eq!(a, b);
        assert!(a.transitions().len() <= 6);
    }
}
