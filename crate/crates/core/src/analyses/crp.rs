//! Cardinality reachability from unbounded initial cubes.
//!
//! The source is given by its support: any number of processes in each
//! listed state, none elsewhere. The target cube's shape depends on the
//! variant: `AtLeastOne` requires lower bounds in `{0, 1}` and no upper
//! bounds, `AtLeastOneOrZero` also allows upper bounds of `0`.
//!
//! `AtLeastOne` on broadcast networks is decided exactly by saturation.
//! Two coverable states are always coverable together: run one witness
//! while the processes of the other abstain from every reception, then run
//! the other. IO nets are compiled to broadcast networks first.

use std::ops::RangeInclusive;

use crate::analyses::AnalysisError;
use crate::compile::{IoToRbn, Reduction};
use crate::cube::Bound;
use crate::engine::{reaches, saturation, ReachOutcome, Verdict};
use crate::model::{CubeSystem, StateId};
use crate::trace::RunTrace;
use crate::{Cube, IoNetModel, MultiSet, RbnModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrpVariant {
    AtLeastOne,
    AtLeastOneOrZero,
    General,
}

impl CrpVariant {
    fn check(self, dst: &Cube) -> Result<(), AnalysisError> {
        let ok = |i: usize| {
            let (lo, hi) = dst.bounds(i);
            match self {
                CrpVariant::General => true,
                CrpVariant::AtLeastOne => lo <= 1 && hi == Bound::Infinite,
                CrpVariant::AtLeastOneOrZero => {
                    (lo <= 1 && hi == Bound::Infinite) || (lo == 0 && hi == Bound::Finite(0))
                }
            }
        };
        match (0..dst.dim()).find(|&i| !ok(i)) {
            None => Ok(()),
            Some(i) => Err(AnalysisError::Invalid(format!(
                "target bounds of state {i} do not fit the {self:?} variant"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CrpReport<C, L> {
    pub verdict: Verdict,
    pub witness: Option<RunTrace<C, L>>,
    pub method: String,
}

fn source_cube(dim: usize, support: &[StateId]) -> Cube {
    let mut upper = vec![Bound::Finite(0); dim];
    for s in support {
        upper[s.index()] = Bound::Infinite;
    }
    Cube::new(vec![0; dim], upper).expect("non-empty")
}

fn search(
    system: &RbnModel,
    src: &Cube,
    dst: &Cube,
    populations: RangeInclusive<u64>,
    cap: usize,
) -> Result<Option<RunTrace<MultiSet, crate::RbnLabel>>, AnalysisError> {
    for n in populations {
        for c in system.cube_members(src, n) {
            if let ReachOutcome::Found(w) = reaches(system, &c, |x| dst.contains_unchecked(x), cap)? {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

/// Cardinality reachability on a broadcast network.
///
/// A witness is searched among source configurations of up to `k_max`
/// processes. Saturation filters out targets that need an uncoverable
/// state, which is a definite NO for every variant.
pub fn crp_check_rbn(
    model: &RbnModel,
    src_support: &[StateId],
    dst: &Cube,
    variant: CrpVariant,
    k_max: u64,
    cap: usize,
) -> Result<CrpReport<MultiSet, crate::RbnLabel>, AnalysisError> {
    let dim = model.state_count();
    if dst.dim() != dim {
        return Err(AnalysisError::Invalid("target cube has the wrong dimension".into()));
    }
    variant.check(dst)?;
    let coverable = saturation(model, src_support);
    let needed: Vec<usize> = (0..dim).filter(|&i| dst.lower()[i] > 0).collect();
    if let Some(&q) = needed.iter().find(|&&q| !coverable[q]) {
        return Ok(CrpReport {
            verdict: Verdict::No,
            witness: None,
            method: format!("saturation: `{}` is never coverable", model.states().name(q as u32)),
        });
    }
    let src = source_cube(dim, src_support);
    let witness = search(model, &src, dst, 0..=k_max, cap)?;
    if variant == CrpVariant::AtLeastOne {
        let method = if witness.is_some() {
            "saturation, with a witness".to_string()
        } else {
            format!("saturation; no witness with at most {k_max} processes")
        };
        return Ok(CrpReport {
            verdict: Verdict::Yes,
            witness,
            method,
        });
    }
    let verdict = if witness.is_some() {
        Verdict::Yes
    } else {
        Verdict::BoundedNo
    };
    Ok(CrpReport {
        verdict,
        witness,
        method: format!("bounded search up to {k_max} processes"),
    })
}

/// Cardinality reachability on an IO net, through its broadcast encoding.
/// The witness is decoded back into observation steps.
pub fn crp_check_io(
    model: &IoNetModel,
    src_support: &[StateId],
    dst: &Cube,
    variant: CrpVariant,
    k_max: u64,
    cap: usize,
) -> Result<CrpReport<MultiSet, usize>, AnalysisError> {
    let red = IoToRbn::new(model);
    let r = crp_check_rbn(red.target(), src_support, dst, variant, k_max, cap)?;
    let witness = r
        .witness
        .map(|w| red.decode_run(&w))
        .transpose()
        .map_err(|e| AnalysisError::Invalid(e.to_string()))?;
    Ok(CrpReport {
        verdict: r.verdict,
        witness,
        method: format!("{} on the broadcast encoding", r.method),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyses::generators::counter_rbn;
    use crate::engine::DEFAULT_CAP;
    use crate::replay;

    #[test]
    fn counter_cover() {
        let g = counter_rbn(3).unwrap();
        let m = &g.model;
        let support: Vec<StateId> = ["tok", "a1", "a2", "a3"]
            .iter()
            .map(|n| m.state(n).unwrap())
            .collect();
        let r = crp_check_rbn(m, &support, &g.cf, CrpVariant::AtLeastOne, 4, DEFAULT_CAP).unwrap();
        assert_eq!(r.verdict, Verdict::Yes);
    }

    #[test]
    fn counter_cover_with_witness() {
        let g = counter_rbn(1).unwrap();
        let m = &g.model;
        let support = [m.state("tok").unwrap(), m.state("a1").unwrap()];
        let r = crp_check_rbn(m, &support, &g.cf, CrpVariant::AtLeastOne, 4, DEFAULT_CAP).unwrap();
        assert_eq!(r.verdict, Verdict::Yes);
        assert!(replay(m, r.witness.as_ref().unwrap()).ok);
    }

    #[test]
    fn vacuous_target() {
        let g = counter_rbn(1).unwrap();
        let r = crp_check_rbn(
            &g.model,
            &[],
            &Cube::universal(5),
            CrpVariant::AtLeastOne,
            2,
            DEFAULT_CAP,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Yes);
        assert_eq!(r.witness.unwrap().len(), 0);
    }

    #[test]
    fn io_without_observed_state() {
        let n = IoNetModel::from_named(["p", "q", "p'"], &[("p", "q", "p'")]).unwrap();
        let dst = Cube::universal(3).with_bounds(2, 1, Bound::Infinite).unwrap();
        let r = crp_check_io(&n, &[StateId(0)], &dst, CrpVariant::AtLeastOne, 4, DEFAULT_CAP)
            .unwrap();
        assert_eq!(r.verdict, Verdict::No);
        let r = crp_check_io(
            &n,
            &[StateId(0), StateId(1)],
            &dst,
            CrpVariant::AtLeastOne,
            4,
            DEFAULT_CAP,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Yes);
        assert!(replay(&n, r.witness.as_ref().unwrap()).ok);
    }

    #[test]
    fn malformed_target_rejected() {
        let g = counter_rbn(1).unwrap();
        let dst = Cube::universal(5).with_bounds(4, 2, Bound::Infinite).unwrap();
        assert!(crp_check_rbn(&g.model, &[], &dst, CrpVariant::AtLeastOne, 2, DEFAULT_CAP).is_err());
        let dst = Cube::universal(5).with_bounds(4, 0, Bound::Finite(0)).unwrap();
        assert!(crp_check_rbn(&g.model, &[], &dst, CrpVariant::AtLeastOne, 2, DEFAULT_CAP).is_err());
        assert!(
            crp_check_rbn(&g.model, &[], &dst, CrpVariant::AtLeastOneOrZero, 2, DEFAULT_CAP)
                .is_ok()
        );
    }

    #[test]
    fn zero_constraint_uses_bounded_search() {
        // covering sent forces tok to be emptied only if there was one token
        let g = counter_rbn(1).unwrap();
        let m = &g.model;
        let dst = Cube::universal(5)
            .with_bounds(1, 1, Bound::Infinite)
            .unwrap()
            .with_bounds(0, 0, Bound::Finite(0))
            .unwrap();
        let r = crp_check_rbn(m, &[StateId(0)], &dst, CrpVariant::AtLeastOneOrZero, 3, DEFAULT_CAP)
            .unwrap();
        assert_eq!(r.verdict, Verdict::Yes);
        let dst = dst.with_bounds(2, 1, Bound::Infinite).unwrap();
        let r = crp_check_rbn(m, &[StateId(0)], &dst, CrpVariant::AtLeastOneOrZero, 3, DEFAULT_CAP)
            .unwrap();
        assert_eq!(r.verdict, Verdict::No);
    }
}
