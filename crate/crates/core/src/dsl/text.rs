//! Text forms of configurations, step labels and runs.
//!
//! Configurations print as `{tok:3, a1:1}` (zero counts omitted); ASMS
//! configurations add the register: `({a1:1}, #)`. Labels reuse the
//! transition syntax; a broadcast step lists the broadcast first and then
//! every receiver, joined by `+`.
//!
//! A run is one line per item:
//!
//! ```text
//! model R1
//! init {tok:2, a1:1}
//! step tok !1 sent + a1 ?1 b1 => {tok:1, sent:1, b1:1}
//! step tok !1 sent + b1 ?1 c1
//! ```
//!
//! The `=> config` part is optional; when present it is checked.

use std::fmt::Write;

use super::lexer::Cursor;
use super::{Diagnostic, Span};
use crate::model::{LetterId, StateId, SymbolTable};
use crate::trace::RunTrace;
use crate::{
    AsmsConfig, AsmsModel, AsmsOp, AsmsTransition, IoNetModel, IoTransition, MultiSet,
    RbnAction, RbnLabel, RbnModel, RbnTransition, TransitionSystem,
};

/// Text input and output for a model's configurations and labels.
pub trait TextModel: TransitionSystem {
    fn format_config(&self, c: &Self::Config) -> String;
    fn format_label(&self, l: &Self::Label) -> String;
    fn read_config(&self, cur: &mut Cursor) -> Result<Self::Config, Diagnostic>;
    fn read_label(&self, cur: &mut Cursor) -> Result<Self::Label, Diagnostic>;
    /// Reads `state=count,...`; ASMS models also take `reg=letter`.
    fn read_literal(&self, cur: &mut Cursor) -> Result<Self::Config, Diagnostic>;

    fn parse_config(&self, text: &str) -> Result<Self::Config, Diagnostic> {
        whole(text, |c| self.read_config(c))
    }

    fn parse_label(&self, text: &str) -> Result<Self::Label, Diagnostic> {
        whole(text, |c| self.read_label(c))
    }

    fn parse_literal(&self, text: &str) -> Result<Self::Config, Diagnostic> {
        whole(text, |c| self.read_literal(c))
    }
}

fn whole<T>(text: &str, f: impl FnOnce(&mut Cursor) -> Result<T, Diagnostic>) -> Result<T, Diagnostic> {
    let mut cur = Cursor::new(text)?;
    let v = f(&mut cur)?;
    cur.expect_end()?;
    Ok(v)
}

fn format_multiset(states: &SymbolTable, m: &MultiSet) -> String {
    let parts: Vec<String> = m
        .support()
        .into_iter()
        .map(|i| format!("{}:{}", states.name(i as u32), m.get(i)))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn lookup(states: &SymbolTable, cur: &mut Cursor, what: &str) -> Result<u32, Diagnostic> {
    let (n, s) = cur.word(&format!("a {what} name"))?;
    states
        .get(&n)
        .ok_or_else(|| Diagnostic::error(format!("unknown {what} `{n}`"), s))
}

fn read_multiset(states: &SymbolTable, cur: &mut Cursor) -> Result<MultiSet, Diagnostic> {
    cur.expect_punct("{")?;
    let mut m = MultiSet::zero(states.len());
    while !cur.eat_punct("}") {
        let i = lookup(states, cur, "state")?;
        cur.expect_punct(":")?;
        let (n, _) = cur.nat()?;
        m.increment(i as usize, n);
        if !cur.eat_punct(",") && !cur.peek_punct("}") {
            return Err(cur.unexpected("`,` or `}`"));
        }
    }
    Ok(m)
}

/// `s=n,...` pairs; `reg` is handed to `on_reg` when given.
fn read_pairs(
    states: &SymbolTable,
    cur: &mut Cursor,
    mut on_reg: Option<&mut dyn FnMut(&mut Cursor) -> Result<(), Diagnostic>>,
) -> Result<MultiSet, Diagnostic> {
    let mut m = MultiSet::zero(states.len());
    loop {
        if cur.at_end() {
            break;
        }
        if let (true, Some(read_reg)) = (cur.peek_word("reg"), on_reg.as_mut()) {
            cur.word("reg")?;
            cur.expect_punct("=")?;
            read_reg(cur)?;
        } else {
            let i = lookup(states, cur, "state")?;
            cur.expect_punct("=")?;
            let (n, _) = cur.nat()?;
            m.increment(i as usize, n);
        }
        if !cur.eat_punct(",") {
            break;
        }
    }
    Ok(m)
}

fn read_letter(letters: &SymbolTable, cur: &mut Cursor) -> Result<LetterId, Diagnostic> {
    lookup(letters, cur, "letter").map(LetterId)
}

fn read_rbn_transition(m: &RbnModel, cur: &mut Cursor) -> Result<(usize, Span), Diagnostic> {
    let start = cur.here();
    let source = StateId(lookup(m.states(), cur, "state")?);
    let bang = if cur.eat_punct("!") {
        true
    } else if cur.eat_punct("?") {
        false
    } else {
        return Err(cur.unexpected("`!` or `?`"));
    };
    let a = read_letter(m.letters(), cur)?;
    let end = cur.here();
    let target = StateId(lookup(m.states(), cur, "state")?);
    let action = if bang {
        RbnAction::Broadcast(a)
    } else {
        RbnAction::Receive(a)
    };
    let span = Span::new(start.start, end.end);
    m.find_transition(&RbnTransition { source, action, target })
        .map(|i| (i, span))
        .ok_or_else(|| Diagnostic::error("no such transition", span))
}

impl TextModel for RbnModel {
    fn format_config(&self, c: &MultiSet) -> String {
        format_multiset(self.states(), c)
    }

    fn format_label(&self, l: &RbnLabel) -> String {
        std::iter::once(l.broadcast)
            .chain(l.receivers.iter().copied())
            .map(|t| self.describe_transition(t))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    fn read_config(&self, cur: &mut Cursor) -> Result<MultiSet, Diagnostic> {
        read_multiset(self.states(), cur)
    }

    fn read_label(&self, cur: &mut Cursor) -> Result<RbnLabel, Diagnostic> {
        let (b, span) = read_rbn_transition(self, cur)?;
        if !self.transitions()[b].action.is_broadcast() {
            return Err(Diagnostic::error("a step starts with a broadcast", span));
        }
        let mut receivers = Vec::new();
        while cur.eat_punct("+") {
            let (r, span) = read_rbn_transition(self, cur)?;
            if self.transitions()[r].action.is_broadcast() {
                return Err(Diagnostic::error("only one broadcast per step", span));
            }
            receivers.push(r);
        }
        Ok(RbnLabel::new(b, receivers))
    }

    fn read_literal(&self, cur: &mut Cursor) -> Result<MultiSet, Diagnostic> {
        read_pairs(self.states(), cur, None)
    }
}

impl TextModel for AsmsModel {
    fn format_config(&self, c: &AsmsConfig) -> String {
        format!(
            "({}, {})",
            format_multiset(self.states(), &c.processes),
            self.letters().name(c.register.0)
        )
    }

    fn format_label(&self, l: &usize) -> String {
        self.describe_transition(*l)
    }

    fn read_config(&self, cur: &mut Cursor) -> Result<AsmsConfig, Diagnostic> {
        cur.expect_punct("(")?;
        let m = read_multiset(self.states(), cur)?;
        cur.expect_punct(",")?;
        let d = read_letter(self.letters(), cur)?;
        cur.expect_punct(")")?;
        Ok(AsmsConfig::new(m, d))
    }

    fn read_label(&self, cur: &mut Cursor) -> Result<usize, Diagnostic> {
        let start = cur.here();
        let source = StateId(lookup(self.states(), cur, "state")?);
        let (op, s) = cur.word("`W` or `R`")?;
        if op != "W" && op != "R" {
            return Err(Diagnostic::error(format!("expected `W` or `R`, found `{op}`"), s));
        }
        cur.expect_punct("(")?;
        let a = read_letter(self.letters(), cur)?;
        cur.expect_punct(")")?;
        let end = cur.here();
        let target = StateId(lookup(self.states(), cur, "state")?);
        let op = if op == "W" { AsmsOp::Write(a) } else { AsmsOp::Read(a) };
        self.find_transition(&AsmsTransition { source, op, target })
            .ok_or_else(|| Diagnostic::error("no such transition", Span::new(start.start, end.end)))
    }

    fn read_literal(&self, cur: &mut Cursor) -> Result<AsmsConfig, Diagnostic> {
        let start = cur.here();
        let mut reg = None;
        let letters = self.letters();
        let mut on_reg = |c: &mut Cursor| {
            reg = Some(read_letter(letters, c)?);
            Ok(())
        };
        let m = read_pairs(self.states(), cur, Some(&mut on_reg))?;
        match reg {
            Some(d) => Ok(AsmsConfig::new(m, d)),
            None => Err(Diagnostic::error(
                "ASMS configuration needs `reg=<letter>`",
                Span::new(start.start, cur.here().end),
            )),
        }
    }
}

impl TextModel for IoNetModel {
    fn format_config(&self, c: &MultiSet) -> String {
        format_multiset(self.states(), c)
    }

    fn format_label(&self, l: &usize) -> String {
        self.describe_transition(*l)
    }

    fn read_config(&self, cur: &mut Cursor) -> Result<MultiSet, Diagnostic> {
        read_multiset(self.states(), cur)
    }

    fn read_label(&self, cur: &mut Cursor) -> Result<usize, Diagnostic> {
        let start = cur.here();
        let source = StateId(lookup(self.states(), cur, "state")?);
        cur.expect_punct("@")?;
        let observed = StateId(lookup(self.states(), cur, "state")?);
        cur.expect_punct("->")?;
        let end = cur.here();
        let target = StateId(lookup(self.states(), cur, "state")?);
        let t = IoTransition { source, observed, target };
        self.transitions()
            .iter()
            .position(|u| *u == t)
            .ok_or_else(|| Diagnostic::error("no such transition", Span::new(start.start, end.end)))
    }

    fn read_literal(&self, cur: &mut Cursor) -> Result<MultiSet, Diagnostic> {
        read_pairs(self.states(), cur, None)
    }
}

/// Renders a run, one line per step, with every configuration spelled out.
pub fn emit_trace<S: TextModel>(model_name: &str, system: &S, trace: &RunTrace<S::Config, S::Label>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "model {model_name}");
    let _ = writeln!(s, "init {}", system.format_config(&trace.initial));
    for step in &trace.steps {
        let _ = writeln!(
            s,
            "step {} => {}",
            system.format_label(&step.label),
            system.format_config(&step.config)
        );
    }
    s
}

/// Reads a run and replays it. Returns the model name from the `model`
/// line, if any.
pub fn parse_trace<S: TextModel>(
    system: &S,
    text: &str,
) -> Result<(Option<String>, RunTrace<S::Config, S::Label>), Diagnostic> {
    let mut name = None;
    let mut trace: Option<RunTrace<S::Config, S::Label>> = None;
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let base = offset;
        offset += line.len();
        let mut cur = Cursor::at_offset(line, base)?;
        if cur.at_end() {
            continue;
        }
        let (kw, kspan) = cur.word("`model`, `init` or `step`")?;
        match kw.as_str() {
            "model" if trace.is_none() && name.is_none() => {
                name = Some(cur.word("a model name")?.0);
            }
            "init" if trace.is_none() => {
                trace = Some(RunTrace::empty(system.read_config(&mut cur)?));
            }
            "step" => {
                let t = trace
                    .as_mut()
                    .ok_or_else(|| Diagnostic::error("`step` before `init`", kspan))?;
                let lspan = cur.here();
                let label = system.read_label(&mut cur)?;
                let next = system.apply(t.last(), &label).map_err(|e| {
                    Diagnostic::error(format!("step {} not enabled: {e}", t.len() + 1), lspan)
                })?;
                if cur.eat_punct("=>") {
                    let cspan = cur.here();
                    let stored = system.read_config(&mut cur)?;
                    if stored != next {
                        return Err(Diagnostic::error(
                            format!(
                                "step {} produces {}, not the stored configuration",
                                t.len() + 1,
                                system.format_config(&next)
                            ),
                            cspan,
                        ));
                    }
                }
                t.push(label, next);
            }
            _ => {
                return Err(Diagnostic::error(
                    format!("unexpected `{kw}` line"),
                    kspan,
                ))
            }
        }
        cur.expect_end()?;
    }
    let end = Span::new(text.len(), text.len());
    trace
        .map(|t| (name, t))
        .ok_or_else(|| Diagnostic::error("missing `init` line", end))
}
