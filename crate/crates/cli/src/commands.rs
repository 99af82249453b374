//! Subcommand implementations. Each returns the process exit code.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use pvkit::analyses::generators::{counter_rbn, fig2_asms};
use pvkit::analyses::{crp_check_io, crp_check_rbn, cutoff_scan, CrpVariant};
use pvkit::compile::{AsmsToRbn, IoToRbn, RbnToAsms, Reduction};
use pvkit::dsl::{
    self, emit_trace, AnyModel, CubeDecl, CubeRegister, DslDocument, Item, ModelDecl,
    ReachDirective, TextModel,
};
use pvkit::engine::{cube_reach_bounded, CubeReachReport, Verdict};
use pvkit::model::{CubeSystem, StateId, TransitionSystem};
use pvkit::{AsmsCube, Bound, Cube};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::input::{default_populations, load, Diagnostics, parse_range, pick_model, resolve_cube, CliModel};
use crate::{ReduceKind, ReachArgs, Variant};

fn exit_code(v: Verdict) -> u8 {
    match v {
        Verdict::Yes => 0,
        Verdict::No => 1,
        Verdict::BoundedNo => 2,
    }
}

/// Calls `$body` with `$m` bound to the concrete model.
macro_rules! with_model {
    ($any:expr, $m:ident => $body:expr) => {
        match $any {
            AnyModel::Rbn($m) => $body,
            AnyModel::Asms($m) => $body,
            AnyModel::Io($m) => $body,
        }
    };
}

fn reach_report<S: CliModel>(
    system: &S,
    src: &S::Cube,
    dst: &S::Cube,
    pop: Option<(u64, u64)>,
    cap: usize,
) -> Result<CubeReachReport<S::Config, S::Label>> {
    let (lo, hi) = pop.unwrap_or_else(|| default_populations(system.cube_population_range(src)));
    Ok(cube_reach_bounded(system, src, dst, lo..=hi, cap)?)
}

fn print_report<S: CliModel>(name: &str, system: &S, r: &CubeReachReport<S::Config, S::Label>, witness: bool) {
    outln!("VERDICT {}", r.verdict);
    outln!("NOTE {}", r.note);
    outln!("SOURCES {}", r.sources_tried);
    if let (Some(w), true) = (&r.witness, witness) {
        outln!("WITNESS {}", w.len());
        out!("{}", emit_trace(name, system, w));
    }
}

pub fn check_reach(a: &ReachArgs, cap: usize) -> Result<u8> {
    let doc = load(a.file.as_deref())?;
    let decl = pick_model(&doc, a.model.as_deref(), &[&a.src, &a.dst])?;
    let pop = a.pop.as_deref().map(parse_range).transpose()?;
    with_model!(&decl.model, m => {
        let src = resolve_cube(&doc, &decl.name, m, &a.src)?;
        let dst = resolve_cube(&doc, &decl.name, m, &a.dst)?;
        let r = reach_report(m, &src, &dst, pop, cap)?;
        print_report(&decl.name, m, &r, !a.no_witness);
        Ok(exit_code(r.verdict))
    })
}

pub fn check_all(file: Option<&Path>, cap: usize) -> Result<u8> {
    let doc = load(file)?;
    let mut failed = 0;
    let mut worst = Verdict::Yes;
    for d in doc.directives() {
        let src = doc.cube(&d.src).expect("checked by the parser");
        let dst = doc.cube(&d.dst).expect("checked by the parser");
        let model = doc.model(&src.model).expect("checked by the parser");
        let pop = Some((d.min_population, d.max_population));
        let verdict = with_model!(model, m => {
            reach_report(m, &m.cube_of(src)?, &m.cube_of(dst)?, pop, cap)?.verdict
        });
        let status = match &d.expect {
            None => String::new(),
            Some(e) if e == verdict.as_str() => format!(" (expected {e})"),
            Some(e) => {
                failed += 1;
                format!(" (expected {e}: MISMATCH)")
            }
        };
        outln!("REACH {} -> {} within {}..{}: {verdict}{status}", d.src, d.dst, d.min_population, d.max_population);
        if exit_code(verdict) > exit_code(worst) {
            worst = verdict;
        }
    }
    if failed > 0 {
        bail!("{failed} expectation(s) not met");
    }
    Ok(if doc.directives().any(|d| d.expect.is_none()) {
        exit_code(worst)
    } else {
        0
    })
}

/// Translates a document's cubes and directives along a reduction.
fn translate<R: Reduction>(
    red: &R,
    doc: &DslDocument,
    source: &ModelDecl,
    target_name: &str,
    target: AnyModel,
    cube_in: impl Fn(&CubeDecl) -> Result<pvkit::compile::CubeOf<R::Source>>,
    cube_out: impl Fn(pvkit::compile::CubeOf<R::Target>) -> (Cube, CubeRegister),
) -> Result<String> {
    let zero = red
        .source()
        .configurations(0)
        .into_iter()
        .next()
        .ok_or_else(|| anyhow!("the source model has no empty configuration"))?;
    let shift = red.target().population(&red.embed(&zero));
    let mut out = DslDocument::default();
    out.push(Item::Model(ModelDecl {
        name: target_name.to_string(),
        model: target,
    }));
    for item in &doc.items {
        match item {
            Item::Cube(c) if c.model == source.name => {
                let (processes, register) = cube_out(red.embed_cube(&cube_in(c)?));
                out.push(Item::Cube(CubeDecl {
                    name: c.name.clone(),
                    model: target_name.to_string(),
                    processes,
                    register,
                }));
            }
            Item::Reach(r) if doc.cube(&r.src).is_some_and(|c| c.model == source.name) => {
                out.push(Item::Reach(ReachDirective {
                    min_population: r.min_population + shift,
                    max_population: r.max_population + shift,
                    ..r.clone()
                }));
            }
            _ => {}
        }
    }
    let provenance = format!(
        "compiled from `{}` by {}; padding: {}",
        source.name,
        red.kind(),
        red.padding()
    );
    Ok(format!("// {provenance}\n{}", dsl::emit(&out)))
}

fn asms_cube_out(c: AsmsCube) -> (Cube, CubeRegister) {
    let reg = c.register.map_or(CubeRegister::Any, CubeRegister::Value);
    (c.processes, reg)
}

fn plain_cube_out(c: Cube) -> (Cube, CubeRegister) {
    (c, CubeRegister::Absent)
}

pub fn reduce(kind: ReduceKind, file: &Path, model: Option<&str>) -> Result<u8> {
    let doc = load(Some(file))?;
    let decl = pick_model(&doc, model, &[])?;
    let text = match (kind, &decl.model) {
        (ReduceKind::RbnToAsms, AnyModel::Rbn(m)) => {
            let red = RbnToAsms::new(m);
            let t = AnyModel::Asms(red.target().clone());
            translate(&red, &doc, decl, &format!("{}_asms", decl.name), t, |c| m.cube_of(c), asms_cube_out)?
        }
        (ReduceKind::AsmsToRbn, AnyModel::Asms(m)) => {
            let red = AsmsToRbn::new(m);
            let t = AnyModel::Rbn(red.target().clone());
            translate(&red, &doc, decl, &format!("{}_rbn", decl.name), t, |c| m.cube_of(c), plain_cube_out)?
        }
        (ReduceKind::IoToRbn, AnyModel::Io(m)) => {
            let red = IoToRbn::new(m);
            let t = AnyModel::Rbn(red.target().clone());
            translate(&red, &doc, decl, &format!("{}_rbn", decl.name), t, |c| m.cube_of(c), plain_cube_out)?
        }
        (k, other) => bail!(
            "`{:?}` does not apply to the {} model `{}`",
            k,
            other.keyword(),
            decl.name
        ),
    };
    // the output must read back
    dsl::parse(&text).map_err(|d| anyhow!("internal: reduced document does not parse: {:?}", d))?;
    out!("{text}");
    Ok(0)
}

fn walk<S: CliModel>(name: &str, m: &S, from: &str, steps: usize, seed: u64) -> Result<u8> {
    let start = m.parse_literal(from).map_err(|d| anyhow!("in `{from}`: {}", d.message))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = pvkit::RunTrace::empty(start);
    let mut deadlock = false;
    for _ in 0..steps {
        let succ = m.successors(trace.last())?;
        if succ.is_empty() {
            deadlock = true;
            break;
        }
        let (l, c) = succ[rng.gen_range(0..succ.len())].clone();
        trace.push(l, c);
    }
    outln!("STEPS {}{}", trace.len(), if deadlock { " (deadlock)" } else { "" });
    out!("{}", emit_trace(name, m, &trace));
    Ok(0)
}

pub fn simulate(file: &Path, model: Option<&str>, from: &str, steps: usize, seed: u64) -> Result<u8> {
    let doc = load(Some(file))?;
    let decl = pick_model(&doc, model, &[])?;
    with_model!(&decl.model, m => walk(&decl.name, m, from, steps, seed))
}

fn state_of(states: &pvkit::model::SymbolTable, name: &str) -> Result<StateId> {
    states
        .get(name)
        .map(StateId)
        .ok_or_else(|| anyhow!("unknown state `{name}`"))
}

#[allow(clippy::too_many_arguments)]
pub fn cutoff(
    file: &Path,
    model: Option<&str>,
    init: &str,
    target: &str,
    range: &str,
    window: usize,
    register: Option<&str>,
    cap: usize,
) -> Result<u8> {
    let doc = load(Some(file))?;
    let decl = pick_model(&doc, model, &[])?;
    let (lo, hi) = parse_range(range)?;
    let states = decl.model.states();
    let (qi, qf) = (state_of(states, init)?, state_of(states, target)?);
    let register = match (&decl.model, register) {
        (AnyModel::Asms(m), Some(r)) => Some(m.letter(r).ok_or_else(|| anyhow!("unknown letter `{r}`"))?),
        (AnyModel::Asms(_), None) => bail!("--register is required for ASMS models"),
        (_, Some(_)) => bail!("--register only applies to ASMS models"),
        (_, None) => None,
    };
    let report = with_model!(&decl.model, m => cutoff_scan(m, qi, qf, lo..=hi, window, register, cap));
    for (k, v) in &report.verdicts {
        match v {
            Ok(true) => outln!("k={k} yes"),
            Ok(false) => outln!("k={k} no"),
            Err(e) => outln!("k={k} error: {e}"),
        }
    }
    match (report.stabilization, report.polarity) {
        (Some(s), Some(p)) => {
            outln!("STABILIZATION {s} {p} (empirical)");
            Ok(0)
        }
        _ => {
            outln!("STABILIZATION none");
            Ok(2)
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn crp(
    file: &Path,
    model: Option<&str>,
    support: &str,
    dst: &str,
    variant: Variant,
    k_max: u64,
    cap: usize,
) -> Result<u8> {
    let doc = load(Some(file))?;
    let decl = pick_model(&doc, model, &[dst])?;
    let states = decl.model.states();
    let support: Vec<StateId> = support
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| state_of(states, s))
        .collect::<Result<_>>()?;
    let variant = match variant {
        Variant::AtLeastOne => CrpVariant::AtLeastOne,
        Variant::AtLeastOneOrZero => CrpVariant::AtLeastOneOrZero,
        Variant::General => CrpVariant::General,
    };
    match &decl.model {
        AnyModel::Rbn(m) => {
            let dst = resolve_cube(&doc, &decl.name, m, dst)?;
            let r = crp_check_rbn(m, &support, &dst, variant, k_max, cap)?;
            outln!("VERDICT {}\nMETHOD {}", r.verdict, r.method);
            if let Some(w) = &r.witness {
                outln!("WITNESS {}", w.len());
                out!("{}", emit_trace(&decl.name, m, w));
            }
            Ok(exit_code(r.verdict))
        }
        AnyModel::Io(m) => {
            let dst = resolve_cube(&doc, &decl.name, m, dst)?;
            let r = crp_check_io(m, &support, &dst, variant, k_max, cap)?;
            outln!("VERDICT {}\nMETHOD {}", r.verdict, r.method);
            if let Some(w) = &r.witness {
                outln!("WITNESS {}", w.len());
                out!("{}", emit_trace(&decl.name, m, w));
            }
            Ok(exit_code(r.verdict))
        }
        AnyModel::Asms(_) => bail!("cardinality reachability applies to RBN and IO models"),
    }
}

pub fn normalize_run(file: &Path, model: Option<&str>, trace: &Path) -> Result<u8> {
    let doc = load(Some(file))?;
    let decl = pick_model(&doc, model, &[])?;
    let AnyModel::Rbn(m) = &decl.model else {
        bail!("normalize-run needs the source RBN; `{}` is not one", decl.name);
    };
    let red = RbnToAsms::new(m);
    let text = std::fs::read_to_string(trace).with_context(|| format!("reading {}", trace.display()))?;
    let (_, run) = dsl::parse_trace(red.target(), &text)
        .map_err(|d| Diagnostics(format!("{}:{}", trace.display(), d.render(&text))))?;
    let (normal, steps) = red.normalize(&run)?;
    let decoded = red.decode_run(&run)?;
    outln!("PSEUDO-STEPS {}", steps.len());
    for (i, s) in steps.iter().enumerate() {
        let word: Vec<String> = s.word.iter().map(|&t| red.target().describe_transition(t)).collect();
        outln!("{}: {} | {}", i + 1, m.format_label(&s.label()), word.join(", "));
    }
    outln!("NORMALIZED {}", normal.len());
    out!("{}", emit_trace(&format!("{}_asms", decl.name), red.target(), &normal));
    outln!("DECODED {}", decoded.len());
    out!("{}", emit_trace(&decl.name, m, &decoded));
    Ok(0)
}

pub fn generate_counter(n: usize) -> Result<u8> {
    let g = counter_rbn(n)?;
    let name = format!("R{n}");
    let mut doc = DslDocument::default();
    doc.push(Item::Model(ModelDecl {
        name: name.clone(),
        model: AnyModel::Rbn(g.model.clone()),
    }));
    for (c, cube) in [("C0", &g.c0), ("Cf", &g.cf)] {
        doc.push(Item::Cube(CubeDecl {
            name: c.into(),
            model: name.clone(),
            processes: cube.clone(),
            register: CubeRegister::Absent,
        }));
    }
    let tokens = 1u64 << n;
    doc.push(Item::Reach(ReachDirective {
        src: "C0".into(),
        dst: "Cf".into(),
        min_population: 0,
        max_population: tokens + n as u64,
        expect: Some("yes".into()),
    }));
    outln!("// counter network: covering c{n} needs {tokens} processes in tok");
    out!("{}", dsl::emit(&doc));
    Ok(0)
}

pub fn generate_fig2() -> Result<u8> {
    let g = fig2_asms();
    let idx = |s: &str| g.model.state(s).unwrap().index();
    let small = g.src_bounded(3);
    let two = AsmsCube {
        processes: g
            .src_bounded(1)
            .processes
            .with_bounds(idx("a1"), 2, Bound::Finite(2))
            .expect("non-empty"),
        register: g.src.register,
    };
    let mut doc = DslDocument::default();
    doc.push(Item::Model(ModelDecl {
        name: "Fig2".into(),
        model: AnyModel::Asms(g.model.clone()),
    }));
    for (name, c) in [("C", &g.src), ("C3", &small), ("Ctwo", &two), ("A4", &g.dst)] {
        let (processes, register) = asms_cube_out(c.clone());
        doc.push(Item::Cube(CubeDecl {
            name: name.into(),
            model: "Fig2".into(),
            processes,
            register,
        }));
    }
    doc.push(Item::Reach(ReachDirective {
        src: "C3".into(),
        dst: "A4".into(),
        min_population: 0,
        max_population: 7,
        expect: Some("no".into()),
    }));
    doc.push(Item::Reach(ReachDirective {
        src: "Ctwo".into(),
        dst: "A4".into(),
        min_population: 0,
        max_population: 4,
        expect: Some("yes".into()),
    }));
    outln!("// a4 is not coverable with one process in a1, whatever the number in b1 and c1");
    out!("{}", dsl::emit(&doc));
    Ok(0)
}
