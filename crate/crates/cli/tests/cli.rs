use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unistrat")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fx(rel: &str) -> String {
    fixtures().join(rel).to_string_lossy().into_owned()
}

fn encode(dir: &Path, framework: &str, input: &str, name: &str) -> String {
    let prefix = dir.join(name).to_string_lossy().into_owned();
    let o = run(&["encode", framework, &fx(input), "--out-prefix", &prefix]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    prefix
}

fn solve_encoded(prefix: &str) -> Output {
    run(&[
        "solve",
        &format!("{prefix}.arena"),
        &format!("{prefix}.fst"),
        "--formula-file",
        &format!("{prefix}.ltl"),
    ])
}

#[test]
fn diagnosability_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = encode(dir.path(), "diag", "des/signature.des", "sig");
    assert_eq!(solve_encoded(&p).status.code(), Some(0));
    let p = encode(dir.path(), "diag", "des/confusable.des", "conf");
    for ext in ["arena", "fst", "ltl", "strategy"] {
        assert!(Path::new(&format!("{p}.{ext}")).exists());
    }
    assert_eq!(solve_encoded(&p).status.code(), Some(1));
}

#[test]
fn strict_synthesis_is_refused() {
    let o = run(&[
        "solve",
        "--strict",
        &fx("games/g0.arena"),
        &fx("games/g0_id.fst"),
        "--formula",
        "G [R] p",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("open problem"));
}

#[test]
fn solve_writes_a_strategy_that_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.strategy").to_string_lossy().into_owned();
    let (a, t) = (fx("games/g0.arena"), fx("games/g0_id.fst"));
    let o = run(&["solve", &a, &t, "--formula", "G [R] (p | X p)", "--out", &out, "--format", "kv"]);
    assert_eq!(o.status.code(), Some(0));
    let kv = stdout(&o);
    assert!(kv.starts_with("verdict=exists\n"));
    assert!(kv.contains("level0.arena=2\n"));
    let o = run(&["check", &a, &t, &out, "--formula", "G [R] (p | X p)", "--mode", "full"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "pass\n");
}

#[test]
fn observation_based_checks() {
    let dir = tempfile::tempdir().unwrap();
    let p = encode(dir.path(), "impinfo", "impinfo/toy.imp", "toy");
    assert_eq!(
        std::fs::read_to_string(format!("{p}.ltl")).unwrap(),
        "G(p1 -> ([R] X pa | [R] X pb))\n"
    );
    let strategy = |name: &str, l: &str, r: &str| {
        let path = dir.path().join(name);
        let text = format!(
            "strategy player=1 memory=m init=m\nchoose m v0 -> v0.a\nchoose m l -> l.{l}\n\
             choose m r -> r.{r}\nchoose m w -> w.a\n"
        );
        std::fs::write(&path, text).unwrap();
        path.to_string_lossy().into_owned()
    };
    let (a, t, f) = (format!("{p}.arena"), format!("{p}.fst"), format!("{p}.ltl"));
    let good = strategy("good", "b", "b");
    let o = run(&["check", &a, &t, &good, "--formula-file", &f, "--mode", "strict"]);
    assert_eq!(o.status.code(), Some(0));
    let bad = strategy("bad", "a", "b");
    let o = run(&["check", &a, &t, &bad, "--formula-file", &f, "--mode", "strict"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("counterexample: "));
    assert!(text.contains("violated: "));
    assert!(text.contains("witness: "));
}

#[test]
fn dependence_game_encoding() {
    let dir = tempfile::tempdir().unwrap();
    let p = encode(dir.path(), "dlgame", "dl/fig1_m3.dl", "fig1");
    let ltl = std::fs::read_to_string(format!("{p}.ltl")).unwrap();
    assert!(ltl.contains("F win1"));
    assert!(ltl.contains("[R]"));
}

#[test]
fn opacity_emits_two_instances() {
    let dir = tempfile::tempdir().unwrap();
    let p = encode(dir.path(), "opacity", "impinfo/opacity.imp", "op");
    assert!(Path::new(&format!("{p}.a.arena")).exists());
    assert!(Path::new(&format!("{p}.b.strategy")).exists());
    assert!(!Path::new(&format!("{p}.a.strategy")).exists());
}

#[test]
fn dumps_are_deterministic() {
    let (a, t) = (fx("games/g0.arena"), fx("games/g0_id.fst"));
    let o = run(&["dump", "powerset", &a, &t]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0));
    assert!(text.starts_with("powerset positions=2\n"));
    assert!(text.contains("I={v0}\n") && text.contains("I={v1}\n"));
    let m1 = stdout(&run(&["dump", "marking", &a, &t, "--formula", "G [R] X !p"]));
    let m2 = stdout(&run(&["dump", "marking", &a, &t, "--formula", "G [R] X !p"]));
    assert_eq!(m1, m2);
    assert!(m1.contains("atom @R0#") && m1.contains(":= [R] X !p"));
    let n1 = run(&["dump", "automaton", "--formula", "p U q"]);
    assert_eq!(n1.status.code(), Some(0));
    assert_eq!(stdout(&n1), stdout(&run(&["dump", "automaton", "--formula", "p U q"])));
}

#[test]
fn formula_flag_precedence_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("f.ltl");
    std::fs::write(&file, "G [R] !p\n").unwrap();
    let (a, t) = (fx("games/g0.arena"), fx("games/g0_id.fst"));
    let o = run(&["solve", &a, &t, "--formula", "G [R] (p | X p)", "--formula-file", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));

    let broken = dir.path().join("broken.arena");
    std::fs::write(&broken, "arena x\npos v0 owner=1 labels=\nedge v0 nowhere\n").unwrap();
    let o = run(&["solve", broken.to_str().unwrap(), &t, "--formula", "p"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr).into_owned();
    assert!(err.contains("broken.arena") && err.contains("line"), "{err}");

    let o = run(&["solve", &a, &t, "--formula", "G [R] p", "--max-power-positions", "1"]);
    assert_eq!(o.status.code(), Some(2));
}
