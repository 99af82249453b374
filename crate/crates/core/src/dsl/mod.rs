//! The `.pv` text format for models, cubes and reachability directives,
//! plus text forms of configurations and runs.
//!
//! ```text
//! // the single-counter network
//! rbn R1 {
//!   states: tok sent a1 b1 c1;
//!   alphabet: 1 2;
//!   transitions:
//!     tok !1 sent;
//!     a1 ?1 b1;
//!     b1 ?1 c1;
//!     c1 !2 a1;
//! }
//! cube C0 of R1 { tok: 0..inf; a1: 1..1; default: 0..0; }
//! cube Cf of R1 { c1: 1..inf; }
//! reach C0 -> Cf within 0..4 expect yes;
//! ```
//!
//! ASMS transitions are written `p W(a) q` and `p R(a) q`, IO transitions
//! `p @ q -> r`. An ASMS cube must fix its register (`register: #`) or say
//! that any value is allowed (`register: *`).

use std::fmt;

use crate::cube::Cube;
use crate::model::{LetterId, SymbolTable};
use crate::{AsmsCube, AsmsModel, IoNetModel, RbnModel};

mod emit;
mod lexer;
mod parser;
mod text;

pub use emit::{emit, emit_cube, emit_model};
pub use lexer::{is_plain_name, Cursor};
pub use parser::parse;
pub use text::{emit_trace, parse_trace, TextModel};

/// Byte range in the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    /// One-based line and column of the start.
    pub fn line_col(&self, src: &str) -> (usize, usize) {
        let before = &src[..self.start.min(src.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
        (line, col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, span: Span) -> Self {
        Self {
            severity: Severity::Error,
            message: message.into(),
            span,
        }
    }

    /// `line:col: error: message`, for humans.
    pub fn render(&self, src: &str) -> String {
        let (l, c) = self.span.line_col(src);
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        format!("{l}:{c}: {sev}: {}", self.message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (at {}..{})", self.message, self.span.start, self.span.end)
    }
}

impl std::error::Error for Diagnostic {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyModel {
    Rbn(RbnModel),
    Asms(AsmsModel),
    Io(IoNetModel),
}

impl AnyModel {
    pub fn keyword(&self) -> &'static str {
        match self {
            AnyModel::Rbn(_) => "rbn",
            AnyModel::Asms(_) => "asms",
            AnyModel::Io(_) => "ionet",
        }
    }

    pub fn states(&self) -> &SymbolTable {
        match self {
            AnyModel::Rbn(m) => m.states(),
            AnyModel::Asms(m) => m.states(),
            AnyModel::Io(m) => m.states(),
        }
    }

    pub fn letters(&self) -> Option<&SymbolTable> {
        match self {
            AnyModel::Rbn(m) => Some(m.letters()),
            AnyModel::Asms(m) => Some(m.letters()),
            AnyModel::Io(_) => None,
        }
    }

    pub fn transition_count(&self) -> usize {
        match self {
            AnyModel::Rbn(m) => m.transitions().len(),
            AnyModel::Asms(m) => m.transitions().len(),
            AnyModel::Io(m) => m.transitions().len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelDecl {
    pub name: String,
    pub model: AnyModel,
}

/// Register part of a cube; only ASMS cubes have one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CubeRegister {
    Absent,
    Any,
    Value(LetterId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeDecl {
    pub name: String,
    pub model: String,
    pub processes: Cube,
    pub register: CubeRegister,
}

impl CubeDecl {
    /// The ASMS view of the cube. `None` when it has no register part.
    pub fn asms(&self) -> Option<AsmsCube> {
        match self.register {
            CubeRegister::Absent => None,
            CubeRegister::Any => Some(AsmsCube::any_register(self.processes.clone())),
            CubeRegister::Value(d) => Some(AsmsCube::new(self.processes.clone(), d)),
        }
    }
}

/// `reach SRC -> DST within LO..HI [expect VERDICT];`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachDirective {
    pub src: String,
    pub dst: String,
    pub min_population: u64,
    pub max_population: u64,
    /// One of `yes`, `no`, `bounded-no`.
    pub expect: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Model(ModelDecl),
    Cube(CubeDecl),
    Reach(ReachDirective),
}

/// A parsed document. `spans[i]` locates `items[i]`; spans are ignored by
/// equality so that documents compare equal across formatting changes.
#[derive(Clone, Debug, Default)]
pub struct DslDocument {
    pub items: Vec<Item>,
    pub spans: Vec<Span>,
}

impl PartialEq for DslDocument {
    fn eq(&self, other: &Self) -> bool {
        self.items == other.items
    }
}

impl Eq for DslDocument {}

impl DslDocument {
    pub fn push(&mut self, item: Item) {
        self.items.push(item);
        self.spans.push(Span::default());
    }

    pub fn model(&self, name: &str) -> Option<&AnyModel> {
        self.items.iter().find_map(|i| match i {
            Item::Model(d) if d.name == name => Some(&d.model),
            _ => None,
        })
    }

    pub fn cube(&self, name: &str) -> Option<&CubeDecl> {
        self.items.iter().find_map(|i| match i {
            Item::Cube(d) if d.name == name => Some(d),
            _ => None,
        })
    }

    pub fn models(&self) -> impl Iterator<Item = &ModelDecl> {
        self.items.iter().filter_map(|i| match i {
            Item::Model(d) => Some(d),
            _ => None,
        })
    }

    pub fn directives(&self) -> impl Iterator<Item = &ReachDirective> {
        self.items.iter().filter_map(|i| match i {
            Item::Reach(d) => Some(d),
            _ => None,
        })
    }

    /// The only model of the document, if there is exactly one.
    pub fn sole_model(&self) -> Option<&ModelDecl> {
        let mut it = self.models();
        match (it.next(), it.next()) {
            (Some(m), None) => Some(m),
            _ => None,
        }
    }
}
