//! Empirical cut-off detection for almost-sure coverability.
//!
//! The scan evaluates the fixed-population check for each population in a
//! range and looks for a suffix on which the verdict no longer changes.
//! Finding such a suffix is evidence, not a proof, that a cut-off exists at
//! its start.

use std::fmt;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::engine::{almost_sure_cover_fixed_k, UniformConfig};
use crate::model::{LetterId, StateId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    /// Coverage holds from the stabilization point on.
    Positive,
    /// Coverage fails from the stabilization point on.
    Negative,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutoffReport {
    /// One entry per population; errors are kept as messages.
    pub verdicts: Vec<(u64, Result<bool, String>)>,
    /// Start of the longest agreeing suffix, when it spans the window.
    pub stabilization: Option<u64>,
    pub polarity: Option<Polarity>,
    /// Always true: stabilization within a finite scan proves nothing.
    pub empirical: bool,
}

/// Runs the fixed-population check for every `k` in `ks`.
pub fn cutoff_scan<S: UniformConfig>(
    system: &S,
    initial: StateId,
    target: StateId,
    ks: RangeInclusive<u64>,
    window: usize,
    register: Option<LetterId>,
    cap: usize,
) -> CutoffReport {
    let ks: Vec<u64> = ks.collect();
    let verdicts: Vec<(u64, Result<bool, String>)> = ks
        .par_iter()
        .map(|&k| {
            let v = almost_sure_cover_fixed_k(system, initial, target, k, register, cap)
                .map_err(|e| e.to_string());
            (k, v)
        })
        .collect();
    let (stabilization, polarity) = stabilize(&verdicts, window);
    CutoffReport {
        verdicts,
        stabilization,
        polarity,
        empirical: true,
    }
}

fn stabilize(verdicts: &[(u64, Result<bool, String>)], window: usize) -> (Option<u64>, Option<Polarity>) {
    let last = match verdicts.last() {
        Some((_, Ok(v))) => *v,
        _ => return (None, None),
    };
    let run = verdicts
        .iter()
        .rev()
        .take_while(|(_, v)| v.as_ref() == Ok(&last))
        .count();
    if window == 0 || run < window {
        return (None, None);
    }
    let start = verdicts[verdicts.len() - run].0;
    let polarity = if last {
        Polarity::Positive
    } else {
        Polarity::Negative
    };
    (Some(start), Some(polarity))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyses::generators::threshold_rbn;
    use crate::engine::DEFAULT_CAP;
    use crate::RbnModel;

    fn model(dead: bool) -> RbnModel {
        let mut b = RbnModel::builder(["qI", "qf", "dead"]).broadcast("qI", "a", "qf");
        if dead {
            b = b.broadcast("qI", "a", "dead");
        }
        b.build().unwrap()
    }

    #[test]
    fn always_covers() {
        let r = cutoff_scan(&model(false), StateId(0), StateId(1), 1..=4, 2, None, DEFAULT_CAP);
        assert!(r.verdicts.iter().all(|(_, v)| v == &Ok(true)));
        assert_eq!(r.stabilization, Some(1));
        assert_eq!(r.polarity, Some(Polarity::Positive));
        assert!(r.empirical);
    }

    #[test]
    fn dead_end_never_covers() {
        let r = cutoff_scan(&model(true), StateId(0), StateId(1), 1..=4, 2, None, DEFAULT_CAP);
        assert!(r.verdicts.iter().all(|(_, v)| v == &Ok(false)));
        assert_eq!(r.polarity, Some(Polarity::Negative));
    }

    #[test]
    fn threshold_gadget() {
        let m = threshold_rbn();
        let (qi, c) = (m.state("qI").unwrap(), m.state("c").unwrap());
        let r = cutoff_scan(&m, qi, c, 1..=5, 3, None, DEFAULT_CAP);
        let v: Vec<bool> = r.verdicts.iter().map(|(_, v)| *v.as_ref().unwrap()).collect();
        assert_eq!(v, [false, true, true, true, true]);
        assert_eq!(r.stabilization, Some(2));
        assert_eq!(r.polarity, Some(Polarity::Positive));
    }

    #[test]
    fn errors_are_recorded() {
        let r = cutoff_scan(&model(true), StateId(0), StateId(1), 1..=3, 2, None, 3);
        assert!(r.verdicts[0].1.is_ok());
        assert!(r.verdicts[2].1.is_err());
        assert_eq!(r.stabilization, None);
    }

    #[test]
    fn short_agreement_is_not_stabilization() {
        let v = vec![(1, Ok(false)), (2, Ok(true))];
        assert_eq!(stabilize(&v, 2), (None, None));
    }
}
