use std::collections::BTreeSet;

use pvkit::analyses::generators::{random_asms, random_io, random_rbn};
use pvkit::dsl::{self, AnyModel};
use pvkit::engine::{post_star, DEFAULT_CAP};
use pvkit::{Bound, CountingConstraint, Cube, MultiSet, RbnAction, RbnLabel, RbnModel, TransitionSystem};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DIM: usize = 3;

fn cube() -> impl Strategy<Value = Cube> {
    proptest::collection::vec((0u64..4, proptest::option::of(0u64..4)), DIM).prop_map(|v| {
        let lower = v.iter().map(|&(lo, _)| lo).collect();
        let upper = v
            .iter()
            .map(|&(lo, w)| w.map_or(Bound::Infinite, |w| Bound::Finite(lo + w)))
            .collect();
        Cube::new(lower, upper).unwrap()
    })
}

fn constraint() -> impl Strategy<Value = CountingConstraint> {
    proptest::collection::vec(cube(), 0..4)
        .prop_map(|cs| CountingConstraint::from_cubes(DIM, cs).unwrap())
}

fn multiset() -> impl Strategy<Value = MultiSet> {
    proptest::collection::vec(0u64..8, DIM).prop_map(MultiSet::from_counts)
}

fn rbn(seed: u64) -> RbnModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_rbn(&mut rng, 3, 6, 2)
}

/// Successor configurations by trying every broadcast with every multiset
/// of matching receivers that fits.
fn successors_by_labels(m: &RbnModel, c: &MultiSet) -> BTreeSet<MultiSet> {
    let mut out = BTreeSet::new();
    for (b, t) in m.transitions().iter().enumerate() {
        let RbnAction::Broadcast(a) = t.action else { continue };
        let receivers: Vec<usize> = (0..m.transitions().len())
            .filter(|&r| m.transitions()[r].action == RbnAction::Receive(a))
            .collect();
        let mut stack = vec![(0usize, Vec::new())];
        while let Some((from, chosen)) = stack.pop() {
            if let Ok(next) = m.step(c, &RbnLabel::new(b, chosen.clone())) {
                out.insert(next);
                for (k, &r) in receivers.iter().enumerate().skip(from) {
                    let mut more = chosen.clone();
                    more.push(r);
                    stack.push((k, more));
                }
            }
        }
    }
    out
}

proptest! {
    #[test]
    fn union_and_intersection_are_pointwise(a in constraint(), b in constraint(), m in multiset()) {
        let (ia, ib) = (a.contains(&m).unwrap(), b.contains(&m).unwrap());
        prop_assert_eq!(a.union(&b).unwrap().contains(&m).unwrap(), ia || ib);
        prop_assert_eq!(a.intersect(&b).unwrap().contains(&m).unwrap(), ia && ib);
    }

    #[test]
    fn complement_is_an_involution(a in constraint()) {
        prop_assert!(a.complement().complement().equiv_bounded(&a, 6).unwrap());
    }

    #[test]
    fn de_morgan(a in constraint(), b in constraint()) {
        let left = a.union(&b).unwrap().complement();
        let right = a.complement().intersect(&b.complement()).unwrap();
        prop_assert!(left.equiv_bounded(&right, 6).unwrap());
    }

    #[test]
    fn cube_members_are_members(c in cube(), n in 0u64..8) {
        for m in c.members_of_size(n) {
            prop_assert_eq!(m.size(), n);
            prop_assert!(c.contains(&m).unwrap());
        }
    }

    #[test]
    fn successors_match_label_enumeration(seed in 0u64..500, c in multiset()) {
        let m = rbn(seed);
        let fast: BTreeSet<MultiSet> = m.successors(&c).unwrap().into_iter().map(|(_, x)| x).collect();
        prop_assert_eq!(fast, successors_by_labels(&m, &c));
        for (label, next) in m.successors(&c).unwrap() {
            prop_assert_eq!(m.apply(&c, &label).unwrap(), next);
        }
    }

    #[test]
    fn extra_processes_never_hurt(seed in 0u64..500, c in multiset(), extra in multiset()) {
        // every run stays possible when idle processes are added
        let m = rbn(seed);
        let small = post_star(&m, &c, DEFAULT_CAP).unwrap();
        let big = post_star(&m, &c.add(&extra).unwrap(), DEFAULT_CAP).unwrap();
        prop_assume!(small.exhausted && big.exhausted);
        let big: BTreeSet<MultiSet> = big.reached.into_iter().collect();
        for x in small.reached {
            prop_assert!(big.contains(&x.add(&extra).unwrap()));
        }
    }

    #[test]
    fn populations_are_conserved(seed in 0u64..500, c in multiset()) {
        let m = rbn(seed);
        for (_, next) in m.successors(&c).unwrap() {
            prop_assert_eq!(next.size(), c.size());
        }
    }

    #[test]
    fn random_models_roundtrip_through_text(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let models = [
            AnyModel::Rbn(random_rbn(&mut rng, 4, 6, 3)),
            AnyModel::Asms(random_asms(&mut rng, 4, 6, 3)),
            AnyModel::Io(random_io(&mut rng, 4, 6)),
        ];
        for model in models {
            let text = dsl::emit_model("M", &model, None);
            let doc = dsl::parse(&text).unwrap();
            prop_assert_eq!(doc.model("M"), Some(&model), "{}", text);
        }
    }
}
