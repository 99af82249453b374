//! Every document in `corpus/` parses, round-trips through the emitter and
//! meets its own `reach` expectations, before and after compilation.

use std::path::PathBuf;

use pvkit::compile::{AsmsToRbn, IoToRbn, RbnToAsms, Reduction};
use pvkit::dsl::{self, AnyModel, DslDocument, ReachDirective};
use pvkit::engine::{cube_reach_bounded, DEFAULT_CAP};
use pvkit::{replay, CubeSystem, TransitionSystem};

fn corpus() -> Vec<(String, DslDocument)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "pv"))
        .collect();
    paths.sort();
    assert!(paths.len() >= 9, "corpus went missing");
    paths
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let doc = dsl::parse(&text).unwrap_or_else(|d| panic!("{name}: {d:?}"));
            (name, doc)
        })
        .collect()
}

fn check<S: CubeSystem>(
    system: &S,
    src: &S::Cube,
    dst: &S::Cube,
    d: &ReachDirective,
    shift: u64,
    what: &str,
) {
    let pops = d.min_population + shift..=d.max_population + shift;
    let r = cube_reach_bounded(system, src, dst, pops, DEFAULT_CAP).unwrap();
    if let Some(w) = &r.witness {
        assert!(replay(system, w).first_bad.is_none(), "{what}: witness does not replay");
        assert!(system.cube_contains(src, &w.initial));
        assert!(system.cube_contains(dst, w.last()));
    }
    let expected = d.expect.as_deref().expect("corpus directives carry expectations");
    assert_eq!(r.verdict.as_str(), expected, "{what}: {} -> {}", d.src, d.dst);
}

fn check_reduced<R: Reduction>(
    red: &R,
    src: &<R::Source as CubeSystem>::Cube,
    dst: &<R::Source as CubeSystem>::Cube,
    d: &ReachDirective,
    what: &str,
) {
    let zero = red.source().configurations(0).pop().unwrap();
    let shift = red.target().population(&red.embed(&zero));
    check(red.target(), &red.embed_cube(src), &red.embed_cube(dst), d, shift, what);
}

#[test]
fn documents_roundtrip_through_the_emitter() {
    for (name, doc) in corpus() {
        let text = dsl::emit(&doc);
        let again = dsl::parse(&text).unwrap_or_else(|d| panic!("{name}: {d:?}\n{text}"));
        assert_eq!(doc, again, "{name}");
    }
}

#[test]
fn counter_three_has_the_expected_shape() {
    let (_, doc) = corpus().into_iter().find(|(n, _)| n == "counter3").unwrap();
    let m = doc.model("R3").unwrap();
    assert_eq!(m.states().len(), 11);
    assert_eq!(m.transition_count(), 10);
}

#[test]
fn expectations_hold_directly_and_after_compilation() {
    for (name, doc) in corpus() {
        for d in doc.directives() {
            let (sd, dd) = (doc.cube(&d.src).unwrap(), doc.cube(&d.dst).unwrap());
            match doc.model(&sd.model).unwrap() {
                AnyModel::Rbn(m) => {
                    check(m, &sd.processes, &dd.processes, d, 0, &name);
                    // the counter needs too many processes once compiled
                    if m.state_count() <= 5 {
                        let red = RbnToAsms::new(m);
                        check_reduced(&red, &sd.processes, &dd.processes, d, &format!("{name} as asms"));
                    }
                }
                AnyModel::Asms(m) => {
                    let (s, t) = (sd.asms().unwrap(), dd.asms().unwrap());
                    check(m, &s, &t, d, 0, &name);
                    check_reduced(&AsmsToRbn::new(m), &s, &t, d, &format!("{name} as rbn"));
                }
                AnyModel::Io(m) => {
                    check(m, &sd.processes, &dd.processes, d, 0, &name);
                    let red = IoToRbn::new(m);
                    check_reduced(&red, &sd.processes, &dd.processes, d, &format!("{name} as rbn"));
                }
            }
        }
    }
}

#[test]
fn compiled_models_emit_and_parse_back() {
    for (name, doc) in corpus() {
        for decl in doc.models() {
            let compiled = match &decl.model {
                AnyModel::Rbn(m) => AnyModel::Asms(RbnToAsms::new(m).target().clone()),
                AnyModel::Asms(m) => AnyModel::Rbn(AsmsToRbn::new(m).target().clone()),
                AnyModel::Io(m) => AnyModel::Rbn(IoToRbn::new(m).target().clone()),
            };
            let text = dsl::emit_model("Compiled", &compiled, Some("compiled"));
            let back = dsl::parse(&text).unwrap_or_else(|d| panic!("{name}: {d:?}\n{text}"));
            assert_eq!(back.model("Compiled"), Some(&compiled), "{name}");
        }
    }
}
