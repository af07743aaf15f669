use std::path::PathBuf;
use std::process::{Command, Output};

use nijenhuis_cli::{parse_json_report, VerdictKind};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.scn"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nijenhuis")).args(args).output().expect("binary runs")
}

fn check(name: &str, extra: &[&str]) -> Output {
    let path = fixture(name);
    let mut args = vec!["check", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn standard_pair_exits_zero() {
    let o = check("symplectic_self_morita", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.starts_with("GENERIC-PASS")).count() == 4, "{text}");
}

#[test]
fn torsion_failure_exits_one_with_witness() {
    let o = check("torsion_fail", &["--sample", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL  nijenhuis_torsion(Ndiag) = 0"), "{text}");
    assert!(text.contains("witness: T(d/dx, d/dy) = (-x + y)d/dx + (-x + y)d/dy"), "{text}");
}

#[test]
fn empty_check_list_exits_zero() {
    let o = check("empty", &["--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = parse_json_report(&stdout(&o)).unwrap();
    assert!(r.checks.is_empty());
}

#[test]
fn generic_pass_prints_its_locus() {
    let o = check("dirac_hierarchy", &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("degeneracy locus: det = x"));
}

#[test]
fn json_round_trips() {
    let o = check("symplectic_self_morita", &["--format", "json"]);
    let text = stdout(&o);
    let r = parse_json_report(&text).unwrap();
    assert_eq!(r.scenario, "symplectic_self_morita");
    assert_eq!(r.checks.len(), 4);
    let again = nijenhuis_cli::emit_report(&r, nijenhuis_cli::Format::Json);
    assert_eq!(again, text);
}

#[test]
fn reruns_are_byte_identical() {
    let a = check("plane", &["--format", "json", "--no-timing", "--seed", "7"]);
    let b = check("plane", &["--format", "json", "--no-timing", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(1));
}

#[test]
fn undefined_reference_exits_two_with_position() {
    let p = scratch("n7.scn", "[chart M]\ncoords = x, y\n\n[check]\nnijenhuis_torsion(N7) = 0\n");
    let o = run(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 5, column 19"), "{err}");
    assert!(err.contains("N7"), "{err}");
}

#[test]
fn non_square_tensor_exits_two() {
    let p = scratch("wide.scn", "[chart M]\ncoords = x, y\n\n[tensor N @ M]\nmatrix = 1, 2, 3; 4, 5, 6\n");
    let o = run(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("dimension"));
}

#[test]
fn degree_cap_becomes_an_error_verdict() {
    let p = scratch(
        "cap.scn",
        "[chart M]\ncoords = x, y\n\n[tensor N @ M]\ndiag = y^4, x^4\n\n[tensor Id @ M]\nidentity\n\n[check]\n\
         nijenhuis_torsion(N) = 0\nnijenhuis_torsion(Id) = 0\n",
    );
    let o = run(&["check", p.to_str().unwrap(), "--max-degree", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
    let r = parse_json_report(&stdout(&o)).unwrap();
    assert_eq!(r.checks[0].verdict, VerdictKind::Error);
    assert!(r.checks[0].note.as_deref().unwrap().starts_with("degree cap exceeded"), "{:?}", r.checks[0].note);
    assert_eq!(r.checks[1].verdict, VerdictKind::Pass);
}

#[test]
fn missing_file_and_bad_flags_exit_two() {
    assert_eq!(run(&["check", "/nonexistent.scn"]).status.code(), Some(2));
    assert_eq!(check("empty", &["--format", "yaml"]).status.code(), Some(2));
}
