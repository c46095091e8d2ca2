use std::io::Write;
use std::process::{Command, Output};

use standpoint::frontend::parse_structure;

fn standpoint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_standpoint"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sat_prints_a_model_and_exits_10() {
    let o = standpoint(&["sat", "<s> p & <s> ~p"]);
    assert_eq!(o.status.code(), Some(10));
    let out = stdout(&o);
    let json = out.strip_prefix("SAT\n").unwrap();
    let m = parse_structure(json).unwrap();
    assert!(m.standpoint("s").len() >= 2);
}

#[test]
fn unsat_exits_20() {
    let o = standpoint(&["sat", "p & [*] ~p"]);
    assert_eq!(o.status.code(), Some(20));
    assert_eq!(stdout(&o), "UNSAT\n");
}

#[test]
fn local_mode_changes_the_verdict() {
    assert_eq!(standpoint(&["sat", "p & <*> ~p"]).status.code(), Some(20));
    let o = standpoint(&["--mode", "local", "sat", "p & <*> ~p"]);
    assert_eq!(o.status.code(), Some(10));
}

#[test]
fn validity_and_seriality() {
    let o = standpoint(&["valid", "[*] p -> p"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "VALID\n".to_string()));
    let o = standpoint(&["valid", "[s] p -> <s> p"]);
    assert_eq!(o.status.code(), Some(20));
    assert!(stdout(&o).starts_with("INVALID\n"));
    let o = standpoint(&["--nonempty-standpoints", "valid", "[s] p -> <s> p"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn dimacs_translation_names_variables() {
    let o = standpoint(&["--format", "dimacs", "translate", "p"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("c var") && out.contains("p@pi1"));
    assert!(out.lines().any(|l| l.starts_with("p cnf ")));
}

#[test]
fn formula_from_file() {
    let mut file = tempfile();
    writeln!(file.1, "[s] p & <s> ~q").unwrap();
    let o = standpoint(&["--file", file.0.to_str().unwrap(), "sat"]);
    assert_eq!(o.status.code(), Some(10));
    std::fs::remove_file(&file.0).unwrap();
}

#[test]
fn check_against_a_structure() {
    let mut file = tempfile();
    write!(
        file.1,
        r#"{{"precisifications":["a","b"],"sigma":{{"s":["a"]}},"delta":{{"p":["a"]}}}}"#
    )
    .unwrap();
    let path = file.0.to_str().unwrap().to_string();
    let o = standpoint(&["check", "--structure", &path, "[s] p"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("HOLDS\n"));
    let o = standpoint(&["check", "--structure", &path, "p"]);
    assert_eq!(o.status.code(), Some(20));
    std::fs::remove_file(&file.0).unwrap();
}

#[test]
fn errors_exit_1() {
    let o = standpoint(&["sat", "p &"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
}

#[test]
fn first_order_commands() {
    let o = standpoint(&["fo-sentential", "! x . [*] P(x)"]);
    assert_eq!(o.status.code(), Some(20));
    assert!(stdout(&o).contains("free variables: x"));
    // an identifier no quantifier binds is a constant
    let o = standpoint(&["fo-sentential", "[*] P(x)"]);
    assert_eq!(o.status.code(), Some(0));
    let o = standpoint(&["--format", "tptp", "fo-translate", "[s] ! x . P(x)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("fof("));
}

fn tempfile() -> (std::path::PathBuf, std::fs::File) {
    use std::sync::atomic::{AtomicUsize, Ordering};
    static NEXT: AtomicUsize = AtomicUsize::new(0);
    let path = std::env::temp_dir().join(format!(
        "standpoint-cli-{}-{}",
        std::process::id(),
        NEXT.fetch_add(1, Ordering::Relaxed)
    ));
    let file = std::fs::File::create(&path).unwrap();
    (path, file)
}
