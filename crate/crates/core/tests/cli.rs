//! The `somc` binary: exit codes and file plumbing.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn somc(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_somc"))
        .args(args)
        .env_remove("SOMC_BUDGET")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("somc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.display().to_string()
}

#[test]
fn regular_sentence_on_a_four_cycle() {
    let formula = scratch("regular.sexp", &stdout(&somc(&["build", "--name", "regular"], "")));
    let c4 = scratch("c4.struct", &stdout(&somc(&["gen", "cycle", "4"], "")));
    let path = scratch("p3.struct", "domain 3\nrel E 2\n0 1\n1 0\n1 2\n2 1\nend\n");
    let run = |engine: &str, s: &str| somc(&["eval", "--engine", engine, "--formula", &formula, "--structure", s], "");
    assert_eq!(run("ground", &c4).status.code(), Some(0));
    assert_eq!(run("ground", &path).status.code(), Some(1));
    assert_eq!(run("naive", &path).status.code(), Some(1));
    let starved = somc(&["eval", "--engine", "naive", "--budget", "1", "--formula", &formula, "--structure", &c4], "");
    assert_eq!(starved.status.code(), Some(3));
}

#[test]
fn environment_budget_applies() {
    let formula = scratch("regular-env.sexp", &stdout(&somc(&["build", "--name", "regular"], "")));
    let c4 = scratch("c4-env.struct", &stdout(&somc(&["gen", "cycle", "4"], "")));
    let out = Command::new(env!("CARGO_BIN_EXE_somc"))
        .args(["eval", "--engine", "naive", "--formula", &formula, "--structure", &c4])
        .env("SOMC_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn oracle_and_solve_verdicts() {
    let q3 = scratch("q3.struct", &stdout(&somc(&["gen", "hypercube", "3"], "")));
    assert_eq!(somc(&["oracle", "hypercube", &q3], "").status.code(), Some(0));
    let k4 = scratch("k4.struct", &stdout(&somc(&["gen", "complete", "4"], "")));
    assert_eq!(somc(&["oracle", "hypercube", &k4], "").status.code(), Some(1));
    assert_eq!(somc(&["oracle", "regular", &k4], "").status.code(), Some(0));
    let yes = scratch("yes.qbf", "E x1 A x2 ((!x1)|x2)\n");
    let no = scratch("no.qbf", "E x1 A x2 (x1&x2)\n");
    for method in ["recursive", "alttree"] {
        assert_eq!(somc(&["solve", &yes, "--method", method], "").status.code(), Some(0));
        assert_eq!(somc(&["solve", &no, "--method", method], "").status.code(), Some(1));
    }
}

#[test]
fn ground_writes_qdimacs() {
    let formula = scratch("ground.sexp", "(ex2 A 1 (all1 x (var2 A x)))");
    let s = scratch("two.struct", "domain 2\nrel E 2\nend\n");
    let out = std::env::temp_dir().join(format!("somc-cli-{}", std::process::id())).join("out.qdimacs");
    let o = somc(&["ground", "--formula", &formula, "--structure", &s, "--qdimacs", out.to_str().unwrap()], "");
    assert_eq!(o.status.code(), Some(0));
    let doc = somc::qbf::QdimacsDoc::parse(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(doc.evaluate_by_expansion(1 << 20).unwrap());
}

#[test]
fn bad_invocations_exit_two() {
    assert_eq!(somc(&["nonsense"], "").status.code(), Some(2));
    assert_eq!(somc(&["solve", "/nonexistent/file"], "").status.code(), Some(2));
    assert_eq!(somc(&["encode"], "E x1 (x1 & x2)").status.code(), Some(2));
    let o = somc(&["eval", "--engine", "fast", "--formula", "a", "--structure", "b"], "");
    assert_eq!(o.status.code(), Some(2));
    for args in [&["nonsense"][..], &["gen", "cycle", "3", "--frobnicate"]] {
        let o = somc(args, "");
        assert_eq!(o.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"), "{args:?}");
    }
}

#[test]
fn encode_prints_the_word_model() {
    let o = somc(&["encode", "--paper-style"], "E x1 A x2 ((!x1)|x2)");
    let text = stdout(&o);
    for line in ["P_not = {10}", "P_open = {8,9}", "P_bar = {3,6,7,12,16,17}", "domain {1..18}"] {
        assert!(text.contains(line), "{line} missing from\n{text}");
    }
}
