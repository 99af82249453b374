use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn pvkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pvkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn pvkit_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pvkit"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn corpus(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    p.to_string_lossy().into_owned()
}

fn scratch(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("pvkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p.to_string_lossy().into_owned()
}

const CORPUS: [&str; 9] = [
    "counter1.pv",
    "counter2.pv",
    "counter3.pv",
    "fig2.pv",
    "gossip.pv",
    "infection.pv",
    "mutex.pv",
    "selfobs.pv",
    "threshold.pv",
];

#[test]
fn generated_counter_reaches_with_enough_tokens() {
    let doc = stdout(&pvkit(&["generate", "counter", "-n", "3"]));
    let yes = pvkit_stdin(&["check", "reach", "--src", "C0+tok=8", "--dst", "Cf"], &doc);
    assert_eq!(code(&yes), 0, "{}", stderr(&yes));
    assert!(stdout(&yes).starts_with("VERDICT yes"));
    assert!(stdout(&yes).contains("WITNESS"));
    let no = pvkit_stdin(&["check", "reach", "-", "--src", "C0+tok=7", "--dst", "Cf"], &doc);
    assert_eq!(code(&no), 1, "{}", stdout(&no));
}

#[test]
fn singleton_source_inside_target_needs_no_steps() {
    let o = pvkit(&[
        "check", "reach", &corpus("gossip.pv"), "--src", "i=2", "--dst", "SomeInformed",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("WITNESS 0"));
}

#[test]
fn bounded_search_reports_bounded_no() {
    let o = pvkit(&[
        "check", "reach", &corpus("gossip.pv"), "--src", "Silent", "--dst", "SomeInformed", "--pop", "1..2",
    ]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).starts_with("VERDICT bounded-no"));
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(code(&pvkit(&["frobnicate"])), 3);
    assert_eq!(code(&pvkit(&["check", "reach", "--bogus"])), 3);
    assert_eq!(code(&pvkit(&["--help"])), 0);
    let o = pvkit(&["check", "all", "/nonexistent/file.pv"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn diagnostics_carry_file_line_and_column() {
    let p = scratch("bad.pv", "rbn X {\n  states: a;\n  transitions: a !m b;\n}\n");
    let o = pvkit(&["check", "all", &p]);
    assert_eq!(code(&o), 3);
    assert_eq!(stderr(&o).trim(), format!("{p}:3:21: error: unknown state `b`"));
}

#[test]
fn corpus_expectations_hold() {
    for f in CORPUS {
        let o = pvkit(&["check", "all", &corpus(f)]);
        assert_eq!(code(&o), 0, "{f}: {}{}", stdout(&o), stderr(&o));
        assert!(stdout(&o).lines().all(|l| l.starts_with("REACH")), "{f}");
    }
}

#[test]
fn failed_expectation_is_an_error() {
    let text = std::fs::read_to_string(corpus("gossip.pv"))
        .unwrap()
        .replace("within 1..4 expect no", "within 1..4 expect yes");
    let o = pvkit_stdin(&["check", "all"], &text);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("no (expected yes: MISMATCH)"));
}

#[test]
fn reduced_documents_keep_their_verdicts() {
    let cases = [
        ("rbn-to-asms", "counter1.pv"),
        ("rbn-to-asms", "threshold.pv"),
        ("rbn-to-asms", "gossip.pv"),
        ("asms-to-rbn", "fig2.pv"),
        ("asms-to-rbn", "mutex.pv"),
        ("io-to-rbn", "infection.pv"),
        ("io-to-rbn", "selfobs.pv"),
    ];
    for (kind, f) in cases {
        let r = pvkit(&["reduce", kind, &corpus(f)]);
        assert_eq!(code(&r), 0, "{kind} {f}: {}", stderr(&r));
        let text = stdout(&r);
        assert!(text.starts_with("// compiled from"), "{text}");
        let o = pvkit_stdin(&["check", "all"], &text);
        assert_eq!(code(&o), 0, "{kind} {f}: {}{}", stdout(&o), stderr(&o));
    }
}

#[test]
fn reducing_the_wrong_kind_fails() {
    let o = pvkit(&["reduce", "asms-to-rbn", &corpus("gossip.pv")]);
    assert_eq!(code(&o), 3);
}

#[test]
fn simulation_is_determined_by_the_seed() {
    let run = |seed: &str| {
        stdout(&pvkit(&[
            "simulate", &corpus("gossip.pv"), "--from", "i=1,u=3", "--steps", "6", "--seed", seed,
        ]))
    };
    let a = run("7");
    assert_eq!(a, run("7"));
    assert!(a.starts_with("STEPS"));
    let seeds: Vec<String> = (0..8).map(|s| run(&s.to_string())).collect();
    assert!(seeds.iter().any(|s| *s != seeds[0]), "every seed gave the same walk");
}

#[test]
fn cutoff_finds_the_threshold() {
    let o = pvkit(&[
        "cutoff", &corpus("threshold.pv"), "--init", "qI", "--target", "c", "--range", "1..5",
    ]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("k=1 no\nk=2 yes\n"), "{out}");
    assert!(out.contains("STABILIZATION 2 positive"), "{out}");
}

#[test]
fn cutoff_on_a_register_model_needs_the_register() {
    let args = ["cutoff", &corpus("mutex.pv"), "--init", "idle", "--target", "crit"];
    assert_eq!(code(&pvkit(&args)), 3);
    let mut with = args.to_vec();
    with.extend(["--register", "#"]);
    let o = pvkit(&with);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn crp_answers_from_a_support() {
    let o = pvkit(&["crp", &corpus("threshold.pv"), "--support", "qI", "--dst", "Cover"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("VERDICT yes"));
    let o = pvkit(&["crp", &corpus("threshold.pv"), "--support", "a", "--dst", "Cover"]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
}

#[test]
fn normalize_run_rearranges_into_pseudo_steps() {
    let trace = scratch(
        "gossip.trace",
        "model Gossip_asms\n\
         init ({u:2, i:1}, #)\n\
         step i W(m) [i,!m,i]\n\
         step u R(m) [u,?m,i]\n\
         step u R(m) [u,?m,i]\n\
         step [u,?m,i] W(#) i\n\
         step [i,!m,i] W(#) i\n\
         step [u,?m,i] W(#) i\n",
    );
    let o = pvkit(&["normalize-run", &corpus("gossip.pv"), "--trace", &trace]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("PSEUDO-STEPS 1\n"), "{out}");
    assert!(out.contains("DECODED 1\n"), "{out}");
    assert!(out.contains("step i !m i + u ?m i + u ?m i => {i:3}"), "{out}");
}

#[test]
fn normalize_run_rejects_a_bad_trace() {
    let trace = scratch(
        "stuck.trace",
        "init ({u:2, i:1}, #)\nstep u R(m) [u,?m,i]\n",
    );
    let o = pvkit(&["normalize-run", &corpus("gossip.pv"), "--trace", &trace]);
    assert_eq!(code(&o), 3);
    let err = stderr(&o);
    assert!(err.starts_with(&format!("{trace}:2:6: error: step 1 not enabled")), "{err}");
}

#[test]
fn generated_documents_parse_back() {
    for args in [&["generate", "counter", "-n", "2"][..], &["generate", "fig2"][..]] {
        let doc = stdout(&pvkit(args));
        let o = pvkit_stdin(&["check", "all"], &doc);
        assert_eq!(code(&o), 0, "{args:?}: {}{}", stdout(&o), stderr(&o));
    }
}
