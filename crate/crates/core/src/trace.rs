//! Runs as sequences of labelled steps, and replay checking.

use crate::model::TransitionSystem;

/// One step of a run: the label fired and the configuration it produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep<C, L> {
    pub label: L,
    pub config: C,
}

/// An initial configuration followed by labelled steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunTrace<C, L> {
    pub initial: C,
    pub steps: Vec<TraceStep<C, L>>,
}

impl<C: Clone, L> RunTrace<C, L> {
    pub fn empty(initial: C) -> Self {
        Self {
            initial,
            steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The last configuration of the run.
    pub fn last(&self) -> &C {
        self.steps.last().map_or(&self.initial, |s| &s.config)
    }

    pub fn push(&mut self, label: L, config: C) {
        self.steps.push(TraceStep { label, config });
    }

    pub fn labels(&self) -> impl Iterator<Item = &L> {
        self.steps.iter().map(|s| &s.label)
    }

    /// Configurations visited, starting with the initial one.
    pub fn configs(&self) -> impl Iterator<Item = &C> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|s| &s.config))
    }
}

impl<C: Clone, L: Clone> RunTrace<C, L> {
    /// Builds a trace by firing `labels` from `initial`.
    pub fn from_labels<S>(
        system: &S,
        initial: C,
        labels: impl IntoIterator<Item = L>,
    ) -> Result<Self, (usize, crate::StepError)>
    where
        S: TransitionSystem<Config = C, Label = L>,
    {
        let mut trace = Self::empty(initial);
        for (i, l) in labels.into_iter().enumerate() {
            let next = system.apply(trace.last(), &l).map_err(|e| (i, e))?;
            trace.push(l, next);
        }
        Ok(trace)
    }
}

/// Result of replaying a stored run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayOutcome<C> {
    pub ok: bool,
    /// Last configuration successfully reproduced.
    pub final_config: C,
    /// Zero-based index of the first step that was not enabled or produced a
    /// configuration different from the stored one.
    pub first_bad: Option<usize>,
}

/// Replays every step of `trace` and compares with the stored configurations.
pub fn replay<S: TransitionSystem>(
    system: &S,
    trace: &RunTrace<S::Config, S::Label>,
) -> ReplayOutcome<S::Config> {
    let mut current = trace.initial.clone();
    for (i, step) in trace.steps.iter().enumerate() {
        match system.apply(&current, &step.label) {
            Ok(next) if next == step.config => current = next,
            _ => {
                return ReplayOutcome {
                    ok: false,
                    final_config: current,
                    first_bad: Some(i),
                }
            }
        }
    }
    ReplayOutcome {
        ok: true,
        final_config: current,
        first_bad: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyses::generators::counter_rbn;
    use crate::{MultiSet, RbnLabel};

    #[test]
    fn replay_examples() {
        let m = counter_rbn(3).unwrap().model;
        let s = |n: &str| m.state(n).unwrap().index();
        let c0 = MultiSet::from_pairs(11, [(s("tok"), 1), (s("a1"), 1)]);
        let empty: RunTrace<MultiSet, RbnLabel> = RunTrace::empty(c0.clone());
        let out = replay(&m, &empty);
        assert!(out.ok);
        assert_eq!(out.final_config, c0);

        let t = m.describe_transition(0);
        assert_eq!(t, "tok !1 sent");
        let label = RbnLabel::new(0, vec![1]);
        assert_eq!(m.describe_transition(1), "a1 ?1 b1");
        let good = MultiSet::from_pairs(11, [(s("sent"), 1), (s("b1"), 1)]);
        let mut trace = RunTrace::empty(c0.clone());
        trace.push(label.clone(), good.clone());
        let out = replay(&m, &trace);
        assert!(out.ok);
        assert_eq!(out.final_config, good);

        let mut bad = RunTrace::empty(c0.clone());
        bad.push(label, MultiSet::from_pairs(11, [(s("sent"), 1), (s("a1"), 1)]));
        let out = replay(&m, &bad);
        assert!(!out.ok);
        assert_eq!(out.first_bad, Some(0));
        assert_eq!(out.final_config, c0);
    }
}
