use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_whitney")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(report: &'a str, key: &str) -> &'a str {
    let prefix = format!("{key}: ");
    report
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key:?} in report:\n{report}"))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("whitney-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    d
}

#[test]
fn whitney_two_point_square() {
    let o = run(&["whitney", "--problem", &data("whitney_square.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "holder_constant"), "2");
}

#[test]
fn gromov_identity_function() {
    let o = run(&["gromov", "--problem", &data("gromov_identity.json")]);
    let r = stdout(&o);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&r, "bound"), "2");
    assert_eq!(field(&r, "observed"), "1");
    assert_eq!(field(&r, "status"), "pass");
}

#[test]
fn extend_flat_jet_is_zero() {
    let o = run(&["extend", "--problem", &data("extend_flat.json"), "--probes", "500"]);
    let r = stdout(&o);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&r, "f.zero"), "true");
    assert_eq!(field(&r, "norm"), "0");
    assert_eq!(field(&r, "status"), "pass");
}

#[test]
fn reports_carry_reproducibility_metadata() {
    let o = run(&["extend", "--problem", &data("extend_segment.json"), "--probes", "500", "--seed", "9"]);
    let r = stdout(&o);
    assert_eq!(field(&r, "plateau"), "0.5");
    assert!(field(&r, "probes").contains("count=500 seed=9"));
    assert_eq!(field(&r, "tolerance.restriction"), "1e-6");
    assert_eq!(field(&r, "tolerance.flat"), "1e-10");
}

#[test]
fn identical_inputs_give_identical_reports() {
    let args = ["extend", "--problem", &data("extend_parabola.json"), "--probes", "400"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let args = ["family", "--problem", &data("family_segments.json"), "--probes", "300"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn plateau_flag_reaches_the_report() {
    let o = run(&["extend", "--problem", &data("extend_segment.json"), "--probes", "300", "--plateau", "0.3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "plateau"), "0.3");
}

#[test]
fn extend_then_verify_round_trip() {
    let dir = scratch("roundtrip");
    let d = dir.to_str().unwrap();
    let o = run(&["extend", "--problem", &data("extend_segment.json"), "--probes", "500", "--out", d, "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.join("report.txt").exists());
    let csv = fs::read_to_string(dir.join("probes.csv")).unwrap();
    assert!(csv.starts_with("x0,x1,f\n"));
    assert_eq!(csv.lines().count(), 501);
    let c = dir.join("construction.json");
    let v = run(&["verify", "--problem", c.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", String::from_utf8_lossy(&v.stderr));
    let (a, b) = (stdout(&o), stdout(&v));
    for key in ["restriction_max_error", "norm", "flatness_violations", "seam_residual", "probes"] {
        assert_eq!(field(&a, key), field(&b, key), "{key}");
    }
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn error_exit_codes() {
    let o = run(&["extend", "--problem", &data("open_box_not_flat.json")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kind=precondition"));
    let o = run(&["extend", "--problem", &data("missing_strata.json")]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("stratification required"));
    let o = run(&["extend", "--problem", "/nonexistent/problem.json"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["whitney", "--problem", &data("gromov_identity.json")]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn unknown_fields_warn_unless_strict() {
    let dir = scratch("strict");
    fs::create_dir_all(&dir).unwrap();
    let text = fs::read_to_string(data("whitney_square.json")).unwrap();
    let p = dir.join("p.json");
    fs::write(&p, text.replacen('{', "{ \"comment\": \"t^2\",", 1)).unwrap();
    let path = p.to_str().unwrap();
    let o = run(&["whitney", "--problem", path]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning: ignoring unknown field \"comment\""));
    let o = run(&["whitney", "--problem", path, "--strict"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kind=schema"));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verification_failure_exits_two() {
    let dir = scratch("tamper");
    let d = dir.to_str().unwrap();
    run(&["extend", "--problem", &data("extend_flat.json"), "--probes", "200", "--out", d]);
    let c = dir.join("construction.json");
    let text = fs::read_to_string(&c).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["construction"]["f"] = serde_json::json!({ "constant": 1.0 });
    fs::write(&c, serde_json::to_string(&v).unwrap()).unwrap();
    let o = run(&["verify", "--problem", c.to_str().unwrap(), "--probes", "200"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(field(&stdout(&o), "status"), "fail");
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn remaining_commands_pass_on_fixtures() {
    for (cmd, file) in [
        ("family", "family_segments.json"),
        ("cm", "cm_square.json"),
        ("shvartsman", "shvartsman_square.json"),
        ("glue", "glue_line.json"),
    ] {
        let o = run(&[cmd, "--problem", &data(file), "--probes", "500"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(field(&stdout(&o), "status"), "pass", "{cmd}");
    }
}

#[test]
fn family_mode_flag() {
    let o = run(&["family", "--problem", &data("family_segments.json"), "--probes", "300", "--mode", "per-member"]);
    let r = stdout(&o);
    assert_eq!(field(&r, "mode"), "per_member");
    assert_ne!(field(&r, "uniform_constant"), "none");
}
