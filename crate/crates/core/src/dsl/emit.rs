//! Printing documents back to text. `parse(emit(doc)) == doc` for every
//! document whose names are plain words.

use std::fmt::Write;

use super::{AnyModel, CubeDecl, CubeRegister, DslDocument, Item, ReachDirective};
use crate::cube::Bound;
use crate::model::SymbolTable;

pub fn emit(doc: &DslDocument) -> String {
    let mut out = String::new();
    for item in &doc.items {
        match item {
            Item::Model(d) => out.push_str(&emit_model(&d.name, &d.model, None)),
            Item::Cube(c) => {
                let model = doc.model(&c.model).expect("cube of a declared model");
                out.push_str(&emit_cube(c, model));
            }
            Item::Reach(r) => out.push_str(&emit_reach(r)),
        }
    }
    out
}

fn join(t: &SymbolTable) -> String {
    t.names().join(" ")
}

/// One model declaration. `provenance` becomes a leading comment.
pub fn emit_model(name: &str, model: &AnyModel, provenance: Option<&str>) -> String {
    let mut s = String::new();
    if let Some(p) = provenance {
        for line in p.lines() {
            let _ = writeln!(s, "// {line}");
        }
    }
    let _ = writeln!(s, "{} {name} {{", model.keyword());
    let _ = writeln!(s, "  states: {};", join(model.states()));
    if let Some(l) = model.letters() {
        if !l.is_empty() {
            let _ = writeln!(s, "  alphabet: {};", join(l));
        }
    }
    s.push_str("  transitions:\n");
    for i in 0..model.transition_count() {
        let t = match model {
            AnyModel::Rbn(m) => m.describe_transition(i),
            AnyModel::Asms(m) => m.describe_transition(i),
            AnyModel::Io(m) => m.describe_transition(i),
        };
        let _ = writeln!(s, "    {t};");
    }
    s.push_str("}\n");
    s
}

fn range(lo: u64, hi: Bound) -> String {
    format!("{lo}..{hi}")
}

pub fn emit_cube(cube: &CubeDecl, model: &AnyModel) -> String {
    let c = &cube.processes;
    let pairs: Vec<(u64, Bound)> = (0..c.dim()).map(|i| c.bounds(i)).collect();
    // the most common range becomes the default
    let mut default = (0, Bound::Infinite);
    let mut best = 0;
    for p in &pairs {
        let n = pairs.iter().filter(|q| *q == p).count();
        if n > best {
            best = n;
            default = *p;
        }
    }
    let mut parts = Vec::new();
    for (i, p) in pairs.iter().enumerate() {
        if *p != default {
            parts.push(format!("{}: {}", model.states().name(i as u32), range(p.0, p.1)));
        }
    }
    if default != (0, Bound::Infinite) {
        parts.push(format!("default: {}", range(default.0, default.1)));
    }
    match cube.register {
        CubeRegister::Absent => {}
        CubeRegister::Any => parts.push("register: *".into()),
        CubeRegister::Value(d) => parts.push(format!(
            "register: {}",
            model.letters().expect("ASMS cube").name(d.0)
        )),
    }
    if parts.is_empty() {
        format!("cube {} of {} {{ }}\n", cube.name, cube.model)
    } else {
        format!("cube {} of {} {{ {}; }}\n", cube.name, cube.model, parts.join("; "))
    }
}

fn emit_reach(r: &ReachDirective) -> String {
    let expect = match r.expect.as_deref() {
        None => String::new(),
        Some("bounded-no") => " expect bounded".into(),
        Some(v) => format!(" expect {v}"),
    };
    format!(
        "reach {} -> {} within {}..{}{expect};\n",
        r.src, r.dst, r.min_population, r.max_population
    )
}
