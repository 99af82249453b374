//! Document parser. Syntax errors stop the parse; name-resolution errors
//! are collected so one run reports all of them.

use std::collections::{HashMap, HashSet};

use super::lexer::Cursor;
use super::{AnyModel, CubeDecl, CubeRegister, Diagnostic, DslDocument, Item, ModelDecl, ReachDirective, Span};
use crate::cube::{Bound, Cube};
use crate::model::{LetterId, StateId, SymbolTable};
use crate::{
    AsmsModel, AsmsOp, AsmsTransition, IoNetModel, IoTransition, RbnAction, RbnModel,
    RbnTransition,
};

/// Parses a whole document.
pub fn parse(src: &str) -> Result<DslDocument, Vec<Diagnostic>> {
    let cur = Cursor::new(src).map_err(|d| vec![d])?;
    let mut p = Parser {
        cur,
        diags: Vec::new(),
        doc: DslDocument::default(),
        names: HashMap::new(),
    };
    if let Err(d) = p.document() {
        p.diags.push(d);
    }
    if p.diags.is_empty() {
        Ok(p.doc)
    } else {
        Err(p.diags)
    }
}

struct Parser {
    cur: Cursor,
    diags: Vec<Diagnostic>,
    doc: DslDocument,
    names: HashMap<String, Span>,
}

type PResult<T> = Result<T, Diagnostic>;

enum RawOp {
    Rbn(bool, (String, Span)),
    Asms(bool, (String, Span)),
    Io((String, Span)),
}

struct RawTrans {
    source: (String, Span),
    op: RawOp,
    target: (String, Span),
    span: Span,
}

impl Parser {
    fn document(&mut self) -> PResult<()> {
        while !self.cur.at_end() {
            let start = self.cur.here().start;
            let item = if self.cur.peek_word("rbn") || self.cur.peek_word("asms") || self.cur.peek_word("ionet") {
                self.model()?
            } else if self.cur.peek_word("cube") {
                self.cube()?
            } else if self.cur.peek_word("reach") {
                self.reach()?
            } else {
                return Err(self.cur.unexpected("`rbn`, `asms`, `ionet`, `cube` or `reach`"));
            };
            let end = self.cur.here().start.max(start);
            if let Some(item) = item {
                self.doc.items.push(item);
                self.doc.spans.push(Span::new(start, end));
            }
        }
        Ok(())
    }

    fn error(&mut self, msg: impl Into<String>, span: Span) {
        self.diags.push(Diagnostic::error(msg, span));
    }

    fn declare(&mut self, name: &str, span: Span) -> bool {
        if self.names.contains_key(name) {
            self.error(format!("`{name}` is already declared"), span);
            return false;
        }
        self.names.insert(name.to_string(), span);
        true
    }

    fn names_until_semi(&mut self, what: &str) -> PResult<Vec<(String, Span)>> {
        let mut out = Vec::new();
        while !self.cur.eat_punct(";") {
            out.push(self.cur.word(what)?);
            self.cur.eat_punct(",");
        }
        Ok(out)
    }

    fn table(&mut self, names: &[(String, Span)], what: &str) -> SymbolTable {
        let mut t = SymbolTable::new();
        for (n, s) in names {
            if !t.insert(n) {
                self.error(format!("duplicate {what} `{n}`"), *s);
            }
        }
        t
    }

    fn model(&mut self) -> PResult<Option<Item>> {
        let (kw, _) = self.cur.word("a model kind")?;
        let (name, name_span) = self.cur.word("a model name")?;
        self.cur.expect_punct("{")?;
        self.cur.keyword("states")?;
        self.cur.expect_punct(":")?;
        let state_names = self.names_until_semi("a state name or `;`")?;
        let alphabet = if self.cur.peek_word("alphabet") {
            self.cur.keyword("alphabet")?;
            self.cur.expect_punct(":")?;
            Some(self.names_until_semi("a letter or `;`")?)
        } else {
            None
        };
        self.cur.keyword("transitions")?;
        self.cur.expect_punct(":")?;
        let mut raw = Vec::new();
        while !self.cur.eat_punct("}") {
            raw.push(self.transition(&kw)?);
            if !self.cur.eat_punct(";") && !self.cur.peek_punct("}") {
                return Err(self.cur.unexpected("`;` or `}`"));
            }
        }
        let before = self.diags.len();
        let fresh = self.declare(&name, name_span);
        if kw == "ionet" {
            if let Some(a) = alphabet.as_ref().and_then(|a| a.first()) {
                self.error("IO nets have no alphabet", a.1);
            }
        }
        let states = self.table(&state_names, "state");
        let fixed = alphabet.is_some();
        let mut letters = self.table(alphabet.as_deref().unwrap_or(&[]), "letter");
        let model = self.resolve(&kw, &name, &states, &mut letters, fixed, raw);
        if !fresh || self.diags.len() > before {
            return Ok(None);
        }
        Ok(model.map(|model| Item::Model(ModelDecl { name, model })))
    }

    fn transition(&mut self, kind: &str) -> PResult<RawTrans> {
        let source = self.cur.word("a state name")?;
        let op = match kind {
            "rbn" => {
                let bang = if self.cur.eat_punct("!") {
                    true
                } else if self.cur.eat_punct("?") {
                    false
                } else {
                    return Err(self.cur.unexpected("`!` or `?`"));
                };
                RawOp::Rbn(bang, self.cur.word("a letter")?)
            }
            "asms" => {
                let (op, span) = self.cur.word("`W` or `R`")?;
                let write = match op.as_str() {
                    "W" => true,
                    "R" => false,
                    _ => {
                        return Err(Diagnostic::error(
                            format!("expected `W` or `R`, found `{op}`"),
                            span,
                        ))
                    }
                };
                self.cur.expect_punct("(")?;
                let a = self.cur.word("a letter")?;
                self.cur.expect_punct(")")?;
                RawOp::Asms(write, a)
            }
            _ => {
                self.cur.expect_punct("@")?;
                let q = self.cur.word("a state name")?;
                self.cur.expect_punct("->")?;
                RawOp::Io(q)
            }
        };
        let target = self.cur.word("a state name")?;
        let span = Span::new(source.1.start, target.1.end);
        Ok(RawTrans {
            source,
            op,
            target,
            span,
        })
    }

    fn state(&mut self, states: &SymbolTable, (n, s): &(String, Span)) -> StateId {
        match states.get(n) {
            Some(i) => StateId(i),
            None => {
                self.error(format!("unknown state `{n}`"), *s);
                StateId(0)
            }
        }
    }

    fn letter(&mut self, letters: &mut SymbolTable, fixed: bool, (n, s): &(String, Span)) -> LetterId {
        if !fixed {
            return LetterId(letters.intern(n));
        }
        match letters.get(n) {
            Some(i) => LetterId(i),
            None => {
                self.error(format!("unknown letter `{n}`"), *s);
                LetterId(0)
            }
        }
    }

    fn resolve(
        &mut self,
        kind: &str,
        name: &str,
        states: &SymbolTable,
        letters: &mut SymbolTable,
        fixed: bool,
        raw: Vec<RawTrans>,
    ) -> Option<AnyModel> {
        let mut seen = HashSet::new();
        let mut spans = Vec::new();
        let mut rbn = Vec::new();
        let mut asms = Vec::new();
        let mut io = Vec::new();
        let start = self.diags.len();
        for r in &raw {
            let clean = self.diags.len();
            let source = self.state(states, &r.source);
            let target = self.state(states, &r.target);
            let key = match &r.op {
                RawOp::Rbn(bang, a) => {
                    let a = self.letter(letters, fixed, a);
                    let action = if *bang {
                        RbnAction::Broadcast(a)
                    } else {
                        RbnAction::Receive(a)
                    };
                    rbn.push(RbnTransition { source, action, target });
                    format!("{:?}", rbn.last())
                }
                RawOp::Asms(write, a) => {
                    let a = self.letter(letters, fixed, a);
                    let op = if *write { AsmsOp::Write(a) } else { AsmsOp::Read(a) };
                    asms.push(AsmsTransition { source, op, target });
                    format!("{:?}", asms.last())
                }
                RawOp::Io(q) => {
                    let observed = self.state(states, q);
                    io.push(IoTransition { source, observed, target });
                    format!("{:?}", io.last())
                }
            };
            if self.diags.len() == clean && !seen.insert(key) {
                self.error(format!("duplicate transition in `{name}`"), r.span);
            }
            spans.push(r.span);
        }
        let built = match kind {
            "rbn" => RbnModel::new(states.names(), letters.names(), rbn).map(AnyModel::Rbn),
            "asms" => AsmsModel::new(states.names(), letters.names(), asms).map(AnyModel::Asms),
            _ => IoNetModel::new(states.names(), io).map(AnyModel::Io),
        };
        match built {
            Ok(m) => Some(m),
            Err(e) => {
                // Normally already reported with a better location.
                let span = spans.first().copied().unwrap_or_default();
                if self.diags.len() == start {
                    self.error(e.to_string(), span);
                }
                None
            }
        }
    }

    fn range(&mut self) -> PResult<(u64, Bound, Span)> {
        let (lo, s) = self.cur.nat()?;
        if !self.cur.eat_punct("..") {
            return Ok((lo, Bound::Finite(lo), s));
        }
        if self.cur.peek_word("inf") {
            let e = self.cur.keyword("inf")?;
            return Ok((lo, Bound::Infinite, Span::new(s.start, e.end)));
        }
        let (hi, e) = self.cur.nat()?;
        Ok((lo, Bound::Finite(hi), Span::new(s.start, e.end)))
    }

    fn cube(&mut self) -> PResult<Option<Item>> {
        self.cur.keyword("cube")?;
        let (name, name_span) = self.cur.word("a cube name")?;
        self.cur.keyword("of")?;
        let (model_name, model_span) = self.cur.word("a model name")?;
        self.cur.expect_punct("{")?;
        let mut entries: Vec<((String, Span), (u64, Bound, Span))> = Vec::new();
        let mut default = None;
        let mut register: Option<(Option<String>, Span)> = None;
        while !self.cur.eat_punct("}") {
            if self.cur.peek_word("default") && self.cur.second_is_punct(":") {
                self.cur.keyword("default")?;
                self.cur.expect_punct(":")?;
                default = Some(self.range()?);
            } else if self.cur.peek_word("register") && self.cur.second_is_punct(":") {
                self.cur.keyword("register")?;
                self.cur.expect_punct(":")?;
                let span = self.cur.here();
                register = Some(if self.cur.eat_punct("*") {
                    (None, span)
                } else {
                    let (d, s) = self.cur.word("a letter or `*`")?;
                    (Some(d), s)
                });
            } else {
                let st = self.cur.word("a state name or `}`")?;
                self.cur.expect_punct(":")?;
                entries.push((st, self.range()?));
            }
            if !self.cur.eat_punct(";") && !self.cur.eat_punct(",") && !self.cur.peek_punct("}") {
                return Err(self.cur.unexpected("`;` or `}`"));
            }
        }
        let before = self.diags.len();
        let fresh = self.declare(&name, name_span);
        let model = match self.doc.model(&model_name) {
            Some(m) => m.clone(),
            None => {
                self.error(format!("unknown model `{model_name}`"), model_span);
                return Ok(None);
            }
        };
        let dim = model.states().len();
        let (dlo, dhi) = default.map_or((0, Bound::Infinite), |(l, h, _)| (l, h));
        let mut lower = vec![dlo; dim];
        let mut upper = vec![dhi; dim];
        let mut set = HashSet::new();
        for ((st, ss), (lo, hi, _)) in &entries {
            match model.states().get(st) {
                None => self.error(format!("unknown state `{st}` in cube `{name}`"), *ss),
                Some(i) => {
                    if !set.insert(i) {
                        self.error(format!("state `{st}` constrained twice"), *ss);
                    }
                    lower[i as usize] = *lo;
                    upper[i as usize] = *hi;
                }
            }
        }
        for (_, (lo, hi, rs)) in &entries {
            if !hi.admits(*lo) {
                self.error("empty range: lower bound exceeds upper bound", *rs);
            }
        }
        if let Some((lo, hi, rs)) = default {
            if !hi.admits(lo) {
                self.error("empty range: lower bound exceeds upper bound", rs);
            }
        }
        let register = match (&model, register) {
            (AnyModel::Asms(m), Some((Some(d), s))) => match m.letter(&d) {
                Some(a) => CubeRegister::Value(a),
                None => {
                    self.error(format!("unknown letter `{d}`"), s);
                    CubeRegister::Any
                }
            },
            (AnyModel::Asms(_), Some((None, _))) => CubeRegister::Any,
            (AnyModel::Asms(_), None) => {
                self.error(
                    format!("ASMS cube `{name}` has no register; write `register: <letter>` or `register: *`"),
                    name_span,
                );
                CubeRegister::Any
            }
            (_, Some((_, s))) => {
                self.error("only ASMS cubes have a register", s);
                CubeRegister::Absent
            }
            (_, None) => CubeRegister::Absent,
        };
        if !fresh || self.diags.len() > before {
            return Ok(None);
        }
        let processes = Cube::new(lower, upper).expect("ranges were checked");
        Ok(Some(Item::Cube(CubeDecl {
            name,
            model: model_name,
            processes,
            register,
        })))
    }

    fn reach(&mut self) -> PResult<Option<Item>> {
        self.cur.keyword("reach")?;
        let (src, ss) = self.cur.word("a cube name")?;
        self.cur.expect_punct("->")?;
        let (dst, ds) = self.cur.word("a cube name")?;
        self.cur.keyword("within")?;
        let (lo, hi, rs) = self.range()?;
        let expect = if self.cur.peek_word("expect") {
            self.cur.keyword("expect")?;
            let (v, vs) = self.cur.word("`yes`, `no` or `bounded`")?;
            Some(match v.as_str() {
                "yes" | "no" => v,
                "bounded" => "bounded-no".to_string(),
                _ => {
                    return Err(Diagnostic::error(
                        format!("expected `yes`, `no` or `bounded`, found `{v}`"),
                        vs,
                    ))
                }
            })
        } else {
            None
        };
        self.cur.expect_punct(";")?;
        let max = match hi {
            Bound::Finite(h) if h >= lo => h,
            _ => {
                self.error("population range must be finite and non-empty", rs);
                return Ok(None);
            }
        };
        let mut ok = true;
        let mut models = Vec::new();
        for (c, s) in [(&src, ss), (&dst, ds)] {
            match self.doc.cube(c) {
                Some(d) => models.push(d.model.clone()),
                None => {
                    self.error(format!("unknown cube `{c}`"), s);
                    ok = false;
                }
            }
        }
        if ok && models[0] != models[1] {
            self.error("both cubes must belong to the same model", ds);
            ok = false;
        }
        Ok(ok.then_some({
            Item::Reach(ReachDirective {
                src,
                dst,
                min_population: lo,
                max_population: max,
                expect,
            })
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::Severity;

    const COUNTER: &str = "
        rbn R3 {
          states: tok sent a1 b1 c1 a2 b2 c2 a3 b3 c3;
          transitions:
            tok !1 sent;
            a1 ?1 b1; b1 ?1 c1; c1 !2 a1;
            a2 ?2 b2; b2 ?2 c2; c2 !3 a2;
            a3 ?3 b3; b3 ?3 c3; c3 !4 a3;
        }
        cube C0 of R3 { tok: 0..inf; a1: 1; a2: 1; a3: 1; default: 0..0 }
        cube Cf of R3 { c3: 1..inf }
        reach C0 -> Cf within 0..11 expect yes;
    ";

    #[test]
    fn counter_model_parses() {
        let doc = parse(COUNTER).unwrap();
        let m = match doc.model("R3").unwrap() {
            AnyModel::Rbn(m) => m,
            _ => panic!(),
        };
        assert_eq!(m.state_count(), 11);
        assert_eq!(m.transitions().len(), 10);
        let c0 = doc.cube("C0").unwrap();
        assert_eq!(c0.processes.bounds(0), (0, Bound::Infinite));
        assert_eq!(c0.processes.bounds(2), (1, Bound::Finite(1)));
        assert_eq!(c0.processes.bounds(1), (0, Bound::Finite(0)));
        assert_eq!(doc.directives().count(), 1);
        assert_eq!(doc.items.len(), doc.spans.len());
    }

    #[test]
    fn empty_transitions() {
        let doc = parse("ionet N { states: p q; transitions: }").unwrap();
        assert_eq!(doc.model("N").unwrap().transition_count(), 0);
        let doc = parse("asms A { states: p; alphabet: #; transitions: }").unwrap();
        assert_eq!(doc.model("A").unwrap().letters().unwrap().len(), 1);
    }

    #[test]
    fn asms_and_io_syntax() {
        let doc = parse(
            "asms A { states: p q; transitions: p W(a) q; q R(#) p; }
             ionet N { states: p q r; transitions: p @ q -> r; p @ p -> q }
             cube S of A { p: 1..2; register: # }
             cube T of A { q: 1..inf; register: * }",
        )
        .unwrap();
        let a = match doc.model("A").unwrap() {
            AnyModel::Asms(m) => m,
            _ => panic!(),
        };
        assert_eq!(a.letters().names(), ["a", "#"]);
        assert_eq!(doc.cube("S").unwrap().register, CubeRegister::Value(LetterId(1)));
        assert_eq!(doc.cube("T").unwrap().register, CubeRegister::Any);
        assert_eq!(doc.model("N").unwrap().transition_count(), 2);
    }

    #[test]
    fn unknown_state_in_cube_is_located() {
        let src = "rbn R { states: a; transitions: }\ncube C of R { b: 1..1 }";
        let d = parse(src).unwrap_err();
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("`b`"));
        assert_eq!(&src[d[0].span.start..d[0].span.end], "b");
        assert_eq!(d[0].span.line_col(src), (2, 15));
        assert_eq!(d[0].severity, Severity::Error);
    }

    #[test]
    fn resolution_errors_are_collected() {
        let src = "rbn R { states: a b; alphabet: x; transitions: a !y b; c ?x a; a !x b; a !x b }";
        let d = parse(src).unwrap_err();
        let msgs: Vec<&str> = d.iter().map(|d| d.message.as_str()).collect();
        assert_eq!(msgs.len(), 3, "{msgs:?}");
        assert!(msgs[0].contains("unknown letter `y`"));
        assert!(msgs[1].contains("unknown state `c`"));
        assert!(msgs[2].contains("duplicate transition"));
    }

    #[test]
    fn asms_cube_needs_register() {
        let d = parse("asms A { states: p; transitions: }\ncube C of A { p: 1 }").unwrap_err();
        assert!(d[0].message.contains("no register"));
        let d = parse("rbn R { states: p; transitions: }\ncube C of R { register: x }").unwrap_err();
        assert!(d[0].message.contains("only ASMS"));
    }

    #[test]
    fn syntax_errors_carry_spans() {
        let src = "rbn R { states: a; transitions: a !x }";
        let d = parse(src).unwrap_err();
        assert!(d[0].message.contains("expected a state name"), "{}", d[0].message);
        assert_eq!(&src[d[0].span.start..d[0].span.end], "}");
        let d = parse("rbn R { states: a b; transitions: a -> b }").unwrap_err();
        assert!(d[0].message.contains("`!` or `?`"));
        let d = parse("model X").unwrap_err();
        assert_eq!(d[0].span, Span::new(0, 5));
    }

    #[test]
    fn names_are_unique() {
        let d = parse("rbn R { states: a; transitions: }\ncube R of R { }").unwrap_err();
        assert!(d[0].message.contains("already declared"));
        let d = parse("rbn R { states: a a; transitions: }").unwrap_err();
        assert!(d[0].message.contains("duplicate state"));
    }

    #[test]
    fn cube_range_checks() {
        let d = parse("rbn R { states: a; transitions: }\ncube C of R { a: 3..1 }").unwrap_err();
        assert!(d[0].message.contains("empty range"));
        let d = parse("rbn R { states: a; transitions: }\ncube C of R { a: 1; a: 2 }").unwrap_err();
        assert!(d[0].message.contains("twice"));
    }

    #[test]
    fn reach_directive_checks() {
        let base = "rbn R { states: a; transitions: }\nrbn S { states: a; transitions: }\ncube C of R { }\ncube D of S { }\n";
        let d = parse(&format!("{base}reach C -> E within 0..2;")).unwrap_err();
        assert!(d[0].message.contains("unknown cube `E`"));
        let d = parse(&format!("{base}reach C -> D within 0..2;")).unwrap_err();
        assert!(d[0].message.contains("same model"));
        let d = parse(&format!("{base}reach C -> C within 0..inf;")).unwrap_err();
        assert!(d[0].message.contains("finite"));
        let doc = parse(&format!("{base}reach C -> C within 1..2 expect bounded;")).unwrap();
        let r = doc.directives().next().unwrap();
        assert_eq!(r.expect.as_deref(), Some("bounded-no"));
        assert_eq!((r.min_population, r.max_population), (1, 2));
    }

    #[test]
    fn compiled_names_parse() {
        let doc = parse(
            "asms A { states: q [q,!a,q'] q'; alphabet: a #; transitions: q W(#) [q,!a,q']; }",
        )
        .unwrap();
        assert_eq!(doc.model("A").unwrap().states().name(1), "[q,!a,q']");
    }
}
