//! Reading documents and resolving command-line cube and range arguments.

use std::io::Read;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use pvkit::dsl::{self, CubeDecl, Cursor, DslDocument, ModelDecl, TextModel};
use pvkit::engine::UniformConfig;
use pvkit::model::{CubeSystem, LetterId};
use pvkit::{AsmsCube, AsmsModel, Cube, IoNetModel, RbnModel};

/// Rendered parse diagnostics, one `file:line:col: error: message` per line.
#[derive(Debug)]
pub struct Diagnostics(pub String);

impl std::fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Diagnostics {}

/// Reads and parses a document; `None` or `-` means standard input.
pub fn load(path: Option<&Path>) -> Result<DslDocument> {
    let (label, text) = match path {
        None => ("<stdin>".to_string(), read_stdin()?),
        Some(p) if p.as_os_str() == "-" => ("<stdin>".to_string(), read_stdin()?),
        Some(p) => (
            p.display().to_string(),
            std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        ),
    };
    dsl::parse(&text).map_err(|diags| {
        let lines: Vec<String> = diags
            .iter()
            .map(|d| format!("{label}:{}", d.render(&text)))
            .collect();
        Diagnostics(lines.join("\n")).into()
    })
}

fn read_stdin() -> Result<String> {
    let mut s = String::new();
    std::io::stdin()
        .read_to_string(&mut s)
        .context("reading standard input")?;
    Ok(s)
}

/// The model named explicitly, or the model of the first hinted cube, or
/// the only model of the document.
pub fn pick_model<'a>(doc: &'a DslDocument, name: Option<&str>, hints: &[&str]) -> Result<&'a ModelDecl> {
    let wanted = name.map(str::to_string).or_else(|| {
        hints.iter().find_map(|h| {
            let head = h.split(['+', ',']).next().unwrap_or("");
            doc.cube(head).map(|c| c.model.clone())
        })
    });
    match wanted {
        Some(n) => doc
            .models()
            .find(|m| m.name == n)
            .ok_or_else(|| anyhow!("no model named `{n}`")),
        None => doc
            .sole_model()
            .ok_or_else(|| anyhow!("the document has several models; pick one with --model")),
    }
}

/// Parses `a..b` (or a single number).
pub fn parse_range(text: &str) -> Result<(u64, u64)> {
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (a, b),
        None => (text, text),
    };
    let a: u64 = a.trim().parse().with_context(|| format!("bad range `{text}`"))?;
    let b: u64 = b.trim().parse().with_context(|| format!("bad range `{text}`"))?;
    if a > b {
        bail!("empty range `{text}`");
    }
    Ok((a, b))
}

/// Command-line cube handling for each model kind.
pub trait CliModel: CubeSystem + TextModel + UniformConfig {
    fn cube_of(&self, decl: &CubeDecl) -> Result<Self::Cube>;
    fn point(&self, c: &Self::Config) -> Self::Cube;
    fn pin(&self, cube: Self::Cube, state: usize, count: u64) -> Self::Cube;
    fn pin_register(&self, cube: Self::Cube, d: LetterId) -> Result<Self::Cube>;
    fn letter_id(&self, name: &str) -> Option<LetterId>;
}

macro_rules! plain_cube_model {
    ($t:ty, |$m:ident, $n:ident| $letters:expr) => {
        impl CliModel for $t {
            fn cube_of(&self, decl: &CubeDecl) -> Result<Cube> {
                Ok(decl.processes.clone())
            }

            fn point(&self, c: &pvkit::MultiSet) -> Cube {
                Cube::singleton(c)
            }

            fn pin(&self, cube: Cube, state: usize, count: u64) -> Cube {
                cube.with_exact(state, count)
            }

            fn pin_register(&self, _: Cube, _: LetterId) -> Result<Cube> {
                bail!("only ASMS cubes have a register")
            }

            fn letter_id(&self, $n: &str) -> Option<LetterId> {
                let $m = self;
                $letters
            }
        }
    };
}

plain_cube_model!(RbnModel, |m, n| m.letter(n));
plain_cube_model!(IoNetModel, |_m, _n| None);

impl CliModel for AsmsModel {
    fn cube_of(&self, decl: &CubeDecl) -> Result<AsmsCube> {
        decl.asms()
            .ok_or_else(|| anyhow!("cube `{}` has no register part", decl.name))
    }

    fn point(&self, c: &pvkit::AsmsConfig) -> AsmsCube {
        AsmsCube::new(Cube::singleton(&c.processes), c.register)
    }

    fn pin(&self, cube: AsmsCube, state: usize, count: u64) -> AsmsCube {
        AsmsCube {
            processes: cube.processes.with_exact(state, count),
            register: cube.register,
        }
    }

    fn pin_register(&self, cube: AsmsCube, d: LetterId) -> Result<AsmsCube> {
        Ok(AsmsCube {
            register: Some(d),
            ..cube
        })
    }

    fn letter_id(&self, name: &str) -> Option<LetterId> {
        self.letter(name)
    }
}

/// Resolves `NAME[+state=n...]` against the document, or reads a
/// configuration literal.
pub fn resolve_cube<S: CliModel>(doc: &DslDocument, model_name: &str, system: &S, arg: &str) -> Result<S::Cube> {
    let mut cur = Cursor::new(arg).map_err(|d| anyhow!("in `{arg}`: {}", d.message))?;
    let named = cur.word("a cube").ok().and_then(|(w, _)| doc.cube(&w).cloned());
    let decl = match named {
        Some(d) if cur.at_end() || cur.peek_punct("+") => d,
        _ => {
            let c = system
                .parse_literal(arg)
                .map_err(|d| anyhow!("in `{arg}`: {}", d.message))?;
            return Ok(system.point(&c));
        }
    };
    if decl.model != model_name {
        bail!("cube `{}` belongs to model `{}`, not `{model_name}`", decl.name, decl.model);
    }
    let mut cube = system.cube_of(&decl)?;
    while cur.eat_punct("+") || cur.eat_punct(",") {
        let (key, _) = cur.word("`state=count`").map_err(|d| anyhow!("in `{arg}`: {}", d.message))?;
        cur.expect_punct("=").map_err(|d| anyhow!("in `{arg}`: {}", d.message))?;
        let (val, _) = cur.word("a value").map_err(|d| anyhow!("in `{arg}`: {}", d.message))?;
        if let Some(i) = system.states().get(&key) {
            let n: u64 = val.parse().with_context(|| format!("bad count `{val}`"))?;
            cube = system.pin(cube, i as usize, n);
        } else if key == "reg" {
            let d = system
                .letter_id(&val)
                .ok_or_else(|| anyhow!("unknown letter `{val}`"))?;
            cube = system.pin_register(cube, d)?;
        } else {
            bail!("unknown state `{key}`");
        }
    }
    if !cur.at_end() {
        bail!("in `{arg}`: expected `+state=count`");
    }
    Ok(cube)
}

/// Populations to search when none are given: the whole source range if
/// it is finite, otherwise a window above its smallest member.
pub fn default_populations(span: (u64, Option<u64>)) -> (u64, u64) {
    match span {
        (lo, Some(hi)) => (lo, hi),
        (lo, None) => (lo, lo + pvkit::engine::DEFAULT_MAX_POPULATION),
    }
}
