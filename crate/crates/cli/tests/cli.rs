use std::path::PathBuf;
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hilbfock")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn strong_check_on_elliptic_passes() {
    let o = run(&["check", &fixture("M_E.json"), "--n", "2", "--mode", "strong", "--expect", "pass"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("[pass] strong multiplicativity"));
}

#[test]
fn filtration_check_on_genus2_fails_as_expected() {
    let o = run(&["check", &fixture("M_2.json"), "--n", "2", "--mode", "filtration", "--expect", "fail"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("q2(1) * q2(1)"), "{out}");
    assert!(out.contains("g=3: 4 q2(p)"), "{out}");

    let o = run(&["check", &fixture("M_2.json"), "--n", "2", "--mode", "filtration", "--expect", "pass"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn analyze_i2() {
    let o = run(&["fibration-analyze", &fixture("fibers/I2.json")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("elliptic=true"), "{out}");
    assert!(out.contains("star=true"), "{out}");

    let o = run(&["--format", "json", "fibration-analyze", &fixture("fibers/I2.json")]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["elliptic"], true);
    assert_eq!(v["star_ok"], true);
    assert_eq!(v["intersection_matrix"], serde_json::json!([[-2, 2], [2, -2]]));
}

#[test]
fn non_integral_fiber_is_rejected() {
    let o = run(&["fibration-analyze", &fixture("fibers/b12_single_edge.json")]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("row"), "{}", stderr(&o));
}

#[test]
fn emit_then_validate_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["I1", "I2", "I3", "I4", "I5", "smooth_genus2", "two_genus1"] {
        let out = dir.path().join(format!("{name}.model.json"));
        let o = run(&["fibration-emit", &fixture(&format!("fibers/{name}.json")), "-o", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let o = run(&["--format", "json", "validate", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
        assert_eq!(v["strongly_multiplicative_g"], name != "two_genus1");
    }
}

#[test]
fn cup_table_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let o = run(&["cup-table", &fixture("M_2.json"), "--n", "2", "-o", a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_hilbfock"))
        .env("HILB_THREADS", "1")
        .args(["cup-table", &fixture("M_2.json"), "--n", "2", "-o", b.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    let v: serde_json::Value = serde_json::from_slice(&x).unwrap();
    assert_eq!(v["basis"].as_array().unwrap().len(), 23);
}

#[test]
fn weight_cap_is_enforced() {
    let o = run(&["cup-table", &fixture("M_E.json"), "--n", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("cap 4") && err.contains("--max-weight"), "{err}");
    let o = run(&["basis", &fixture("M_E.json"), "--n", "7"]);
    assert!(stderr(&o).contains("cap 6"));
    let o = run(&["--max-weight", "7", "basis", &fixture("M_E.json"), "--n", "7"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn usage_errors_name_the_token() {
    let o = run(&["apply", &fixture("M_E.json"), "--op", "q(2,zz)", "--to", "vac"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("zz"));
    let o = run(&["apply", &fixture("M_E.json"), "--op", "w(2,p)", "--to", "vac"]);
    assert!(stderr(&o).contains("\"w\""), "{}", stderr(&o));
}

#[test]
fn apply_and_basis() {
    let o = run(&["apply", &fixture("M_2.json"), "--op", "del", "--to", "q2(1)"]);
    assert_eq!(stdout(&o).trim(), "2 q2(p)");
    let o = run(&["apply", &fixture("M_E.json"), "--op", "q(-1,a^)", "--to", "q1(b).q1(1)"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(&["--format", "json", "basis", &fixture("M_E.json"), "--n", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dimension"], 12);
}

#[test]
fn taut_class_command() {
    let o = run(&["taut", &fixture("M_E.json"), "--alpha", "1", "--l", "3", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("1/2 q2(1)"), "{}", stdout(&o));
}

#[test]
fn boundary_self_reports_obstruction() {
    let o = run(&["boundary-self", &fixture("M_2.json"), "--n", "2"]);
    let out = stdout(&o);
    assert!(out.contains("-4 q2(p)") && out.contains("obstructed"), "{out}");
}

#[test]
fn audit_json_is_stable() {
    let args = ["--format", "json", "audit", &fixture("M_2.json"), "--kind", "purity", "--n", "2", "--expect", "fail"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["items"][3]["witnesses"][0]["observed"], "(2, 4, 3): 2 q2(p)");
}

#[test]
fn acceptance_suite_runs_clean() {
    let o = run(&["suite", &fixture("suite.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("MISMATCH"));
}
