//! End-to-end tests of the `sol4` binary: exit codes, output formats,
//! determinism, and the documented invocation examples.

use std::process::{Command, Output};

fn sol4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sol4"))
        .args(args)
        .env_remove("SOL4_CONFIG")
        .output()
        .expect("binary should run")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout should be UTF-8")
}

#[test]
fn verify_ambient_passes_and_emits_json() {
    let output = sol4(&["verify-ambient"]);
    assert_eq!(output.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(report["suite"], "ambient");
    assert_eq!(report["pass"], true);
    assert_eq!(report["checks"].as_array().unwrap().len(), 7);
}

#[test]
fn family_example_reports_the_expected_principal_curvatures() {
    let output = sol4(&["verify-family", "--family", "m1", "--r", "1"]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout_of(&output);
    assert!(text.contains("1.31303529"), "{text}");
    assert!(text.contains("0.761594156"), "{text}");
    assert!(text.contains("-1.52318831"), "{text}");
}

#[test]
fn reconstruct_example_identifies_the_half_radius_slice() {
    let output = sol4(&["reconstruct", "--case", "II", "--c", "0.648054", "--d", "0.761594"]);
    assert_eq!(output.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(report["pass"], true);
    let radius_check = &report["checks"][0];
    assert_eq!(radius_check["id"], "reconstruct/match/radius");
    assert!(radius_check["anchor"].as_str().unwrap().contains("M3"));
    let radius = radius_check["value"].as_f64().unwrap();
    assert!((radius - 0.5).abs() < 1e-5, "radius {radius}");
}

#[test]
fn seeded_runs_are_byte_identical() {
    let args = ["--seed", "5", "--samples", "8", "orbit"];
    let first = sol4(&args);
    let second = sol4(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn csv_format_emits_one_row_per_check() {
    let output = sol4(&["--format", "csv", "verify-ambient"]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout_of(&output);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("suite,id,value,bound,pass,anchor"));
    assert_eq!(lines.count(), 7);
}

#[test]
fn config_file_overrides_tolerances_and_failures_exit_one() {
    let path = std::env::temp_dir().join("sol4-cli-test-impossible.cfg");
    std::fs::write(&path, "spectrum_tol = 1e-30\n").unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_sol4"))
        .args(["verify-family", "--family", "m2", "--r", "1"])
        .env("SOL4_CONFIG", &path)
        .output()
        .expect("binary should run");
    std::fs::remove_file(&path).ok();
    assert_eq!(output.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(report["pass"], false);
}

#[test]
fn usage_errors_exit_two() {
    let missing_param = sol4(&["reconstruct", "--case", "II", "--d", "0.7"]);
    assert_eq!(missing_param.status.code(), Some(2));
    let stderr = String::from_utf8(missing_param.stderr).unwrap();
    assert!(stderr.contains("--c"), "{stderr}");

    let bad_family = sol4(&["verify-family", "--family", "m9"]);
    assert_eq!(bad_family.status.code(), Some(2));

    let bad_flag = sol4(&["--no-such-flag", "all"]);
    assert_eq!(bad_flag.status.code(), Some(2));
}

#[test]
fn curvature_evaluates_frame_plane_values() {
    let output = sol4(&["curvature", "--point", "0,0,0,0", "--u", "1,0,0,0", "--v", "0,1,0,0"]);
    assert_eq!(output.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    let sectional = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == "curvature/sectional")
        .unwrap();
    assert_eq!(sectional["value"].as_f64().unwrap(), -1.0);
}

#[test]
fn dump_points_writes_a_point_cloud() {
    let path = std::env::temp_dir().join("sol4-cli-test-points.csv");
    let output = Command::new(env!("CARGO_BIN_EXE_sol4"))
        .args([
            "verify-family",
            "--family",
            "m4",
            "--r",
            "0",
            "--dump-points",
            path.to_str().unwrap(),
        ])
        .env_remove("SOL4_CONFIG")
        .output()
        .expect("binary should run");
    assert_eq!(output.status.code(), Some(0));
    let cloud = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let mut lines = cloud.lines();
    assert_eq!(lines.next(), Some("x,y,z,t"));
    assert!(lines.count() > 100);
}
