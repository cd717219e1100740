use std::path::PathBuf;
use std::process::{Command, Output};

use bpcalc_core::report::Report;

fn bpcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bpcalc"))
        .args(args)
        .env_remove("BPCALC_PRIME")
        .env_remove("BPCALC_FORMAT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

#[test]
fn eval_r1_on_v2() {
    let o = bpcalc(&["eval", "R[1]", "v2", "--prime", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-8*v1^7");
    let o = bpcalc(&["eval", "R[0,1]", "v2", "--prime", "5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["value"], "5");
}

#[test]
fn localize_twelve_away_from_two() {
    let o = bpcalc(&["localize-group", "Z/12", "--invert", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "Z/3");
    let o = bpcalc(&["localize-group", "Z/12", "--local-at", "2", "--oracle"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Z/4\n"));
    assert!(stdout(&o).contains("(agrees)"));
    let o = bpcalc(&["localize-group", "Z + Z/5", "--rationalize"]);
    assert_eq!(stdout(&o).trim(), "Q");
}

#[test]
fn arithmetic_square_report() {
    let o = bpcalc(&["localize-group", "Z/12", "--invert", "2", "--square", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = Report::from_json(&stdout(&o)).unwrap();
    assert!(r.passed());
    assert!(r.records[0].computed.contains("M[1/P1] = Z/3; M[1/P2] = Z/4; M tensor Q = 0"));
}

#[test]
fn verify_gamma1_value_at_seven() {
    let o = bpcalc(&["verify", "thm7.2", "--prime", "7", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = Report::from_json(&stdout(&o)).unwrap();
    assert!(r.passed());
    let last = r.records.iter().find(|x| x.id == "gamma1.value").unwrap();
    assert_eq!(last.computed, "[-2*v2^4*l]");
    assert_eq!(last.modulus.as_deref(), Some("(p, v1)"));
    assert!(r.records.iter().all(|x| !x.anchor.is_empty()));
}

#[test]
fn verification_targets_pass_at_five() {
    for target in ["lemma7.1", "lemma7.3", "lemma7.5", "lemma7.7", "lemma7.9", "thm7.10"] {
        let o = bpcalc(&["verify", target, "--prime", "5"]);
        assert_eq!(o.status.code(), Some(0), "{target}: {}", stdout(&o));
    }
    let o = bpcalc(&["verify", "lemma7.1", "--prime", "5"]);
    assert!(stdout(&o).contains("PASS  complex.printed-d1-rejected"));
}

#[test]
fn reports_are_byte_identical() {
    let a = bpcalc(&["verify", "lemma7.3", "--format", "json"]);
    let b = bpcalc(&["verify", "lemma7.3", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains("runtime_ms"));
    let t = bpcalc(&["verify", "lemma7.3", "--format", "json", "--timings"]);
    assert!(stdout(&t).contains("runtime_ms"));
}

#[test]
fn exit_codes() {
    assert_eq!(bpcalc(&["verify", "lemma7.4"]).status.code(), Some(2));
    assert_eq!(bpcalc(&["--prime", "9", "eval", "R[1]", "v1"]).status.code(), Some(2));
    assert_eq!(bpcalc(&["--prime", "2", "eval", "R[1]", "v1"]).status.code(), Some(2));
    assert_eq!(bpcalc(&["verify", "thm7.2", "--truncation", "2"]).status.code(), Some(3));
    assert_eq!(bpcalc(&["eval", "R[1]", "v5"]).status.code(), Some(3));
    assert_eq!(bpcalc(&["eval", "R[1", "v2"]).status.code(), Some(4));
    assert_eq!(bpcalc(&["eval", "R[1]", "v2 +* v1"]).status.code(), Some(4));
    assert_eq!(bpcalc(&["localize-group", "Z/x"]).status.code(), Some(4));
    assert_eq!(bpcalc(&["cat", "check", &data("fork.cat")]).status.code(), Some(1));
}

#[test]
fn environment_overrides_flags_defaults() {
    let o = Command::new(env!("CARGO_BIN_EXE_bpcalc")).args(["eval", "R[1]", "v1"]).env("BPCALC_PRIME", "5").output().unwrap();
    assert_eq!(stdout(&o).trim(), "5");
}

#[test]
fn writes_to_out_path() {
    let path = std::env::temp_dir().join(format!("bpcalc-out-{}.json", std::process::id()));
    let o = bpcalc(&["verify", "lemma7.5", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let r = Report::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r.records.len(), 2);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn category_files() {
    let o = bpcalc(&["cat", "localize", &data("fork.cat"), "--class", "S", "--oracle"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("a -> b: 1 [{f, g, t^-1*h}]"), "{out}");
    assert!(!out.contains("DISAGREE"));

    let o = bpcalc(&["cat", "localize", &data("fork.cat"), "--class", "Span"]);
    assert_eq!(o.status.code(), Some(2));

    let o = bpcalc(&["cat", "check", &data("fork.cat"), "--class", "S"]);
    assert_eq!(o.status.code(), Some(0));

    let o = bpcalc(&["cat", "check", &data("interval.cat"), "--monad", "E:eta", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = Report::from_json(&stdout(&o)).unwrap();
    assert!(r.records.iter().any(|x| x.id == "E.monad.factorization"));

    let o = bpcalc(&["cat", "check", &data("interval.cat"), "--monad", "K:kappa"]);
    assert_eq!(o.status.code(), Some(1));
}
