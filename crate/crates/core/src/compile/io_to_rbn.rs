//! Immediate observation as broadcast.
//!
//! Every process permanently announces its state: each state `q` gets a
//! broadcast loop `q -!q-> q`, and an observation `p -(q)-> p'` becomes the
//! receive `p -?q-> p'`. One broadcast heard by `k` processes is the same as
//! `k` observations of the broadcaster, performed one after the other.

use crate::compile::{check_good_run, source_trace, CompileError, Reduction, ReductionKind, TraceOf};
use crate::model::{LetterId, StateId};
use crate::{Cube, IoNetModel, MultiSet, RbnAction, RbnModel, RbnTransition};

#[derive(Clone, Debug)]
pub struct IoToRbn {
    source: IoNetModel,
    target: RbnModel,
}

impl IoToRbn {
    pub fn new(source: &IoNetModel) -> Self {
        let n = source.state_count();
        let mut transitions: Vec<RbnTransition> = (0..n as u32)
            .map(|q| RbnTransition {
                source: StateId(q),
                action: RbnAction::Broadcast(LetterId(q)),
                target: StateId(q),
            })
            .collect();
        for t in source.transitions() {
            transitions.push(RbnTransition {
                source: t.source,
                action: RbnAction::Receive(LetterId(t.observed.0)),
                target: t.target,
            });
        }
        let target = RbnModel::from_tables(
            source.states().clone(),
            source.states().clone(),
            transitions,
        )
        .expect("compiled model is well-formed");
        Self {
            source: source.clone(),
            target,
        }
    }
}

impl Reduction for IoToRbn {
    type Source = IoNetModel;
    type Target = RbnModel;

    fn kind(&self) -> ReductionKind {
        ReductionKind::IoToRbn
    }

    fn source(&self) -> &IoNetModel {
        &self.source
    }

    fn target(&self) -> &RbnModel {
        &self.target
    }

    fn embed(&self, c: &MultiSet) -> MultiSet {
        c.clone()
    }

    fn decode_config(&self, c: &MultiSet) -> Option<MultiSet> {
        Some(c.clone())
    }

    fn embed_cube(&self, cube: &Cube) -> Cube {
        cube.clone()
    }

    fn decode_run(&self, run: &TraceOf<RbnModel>) -> Result<TraceOf<IoNetModel>, CompileError> {
        check_good_run(self, run)?;
        let n = self.source.state_count();
        let labels = run
            .labels()
            .flat_map(|l| l.receivers.iter().map(move |&r| r - n))
            .collect();
        source_trace(&self.source, run.initial.clone(), labels, run.last())
    }

    fn padding(&self) -> String {
        "empty".into()
    }

    fn padding_size(&self) -> u64 {
        0
    }
}
