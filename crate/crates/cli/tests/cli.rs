//! End-to-end behaviour of the `threecenter` binary and the run pipeline.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use threecenter_cli::report::read_csv;
use threecenter_cli::{load_config, parse_config, run_cases, RunOptions, Status};

const CASE: &str = "
[case]
id = small-01
label = 1.0s0 | 1.0s0
a = 1.0 0 0 1.24
b = 1.0 0 0 5.67
center_a = 0 0 0
center_b = 0 0 -2.0143
center_c = 0 0 -4.1934
reference = REFERENCE
min_digits = 26
";

fn small_config(reference: &str) -> String {
    format!("name = small\nl_max = 14\ndigits = 10\n{}", CASE.replace("REFERENCE", reference))
}

fn threecenter(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_threecenter"))
        .args(args)
        .current_dir(dir)
        .env_remove("THREECENTER_DIGITS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn empty_config_gives_an_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "empty.cfg", "name = empty\n# nothing to do\n");
    let out = threecenter(&["table", "--config", &cfg, "--out", "reports"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("(no cases)"));
    let csv = fs::read(dir.path().join("reports/empty.csv")).unwrap();
    assert!(read_csv(csv.as_slice()).unwrap().is_empty());
}

#[test]
fn matching_reference_exits_zero_and_round_trips_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.cfg", &small_config("2.94549 60536 73751 14101 41604 E-02"));
    let out = threecenter(&["table", "--config", &cfg, "--out", "reports", "--format", "both"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let reports = read_csv(fs::read(dir.path().join("reports/small.csv")).unwrap().as_slice()).unwrap();
    assert_eq!(reports.len(), 1);
    let r = &reports[0];
    assert_eq!(r.case_id, "small-01");
    assert_eq!(r.status, Some(Status::Match));
    assert_eq!(r.required_digits, 10);
    assert!(r.matching_digits >= 10);
    let txt = fs::read_to_string(dir.path().join("reports/small.txt")).unwrap();
    assert!(txt.contains("small-01") && txt.contains("match"));
}

#[test]
fn corrupted_reference_digit_is_reported_as_a_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    // fourth digit changed from 5 to 6
    let cfg = write(dir.path(), "bad.cfg", &small_config("2.94649 60536 73751 14101 41604 E-02"));
    let out = threecenter(&["table", "--config", &cfg, "--out", "reports", "--format", "csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let reports = read_csv(fs::read(dir.path().join("reports/small.csv")).unwrap().as_slice()).unwrap();
    assert_eq!(reports[0].status, Some(Status::Fail));
    assert_eq!(reports[0].matching_digits, 3);
}

#[test]
fn parse_errors_exit_with_the_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "broken.cfg", &small_config("2.94549 60536 E-02").replace("l_max = 14", "l_max = many"));
    let out = threecenter(&["table", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("broken.cfg:2:"), "{}", String::from_utf8_lossy(&out.stderr));

    let out = threecenter(&["table", "--config", "no-such-file.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_monotone_levels_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = threecenter(
        &["convergence", "--config", "threecenter4", "--case", "threecenter4-01", "--levels", "10,5,20"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn list_names_every_bundled_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = threecenter(&["list"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for t in ["threecenter1", "threecenter2", "threecenter3", "threecenter4"] {
        assert!(text.contains(t));
    }
    assert!(text.contains("threecenter4-12"));
}

#[test]
fn runs_are_deterministic() {
    let config = parse_config(&small_config("2.94549 60536 73751 14101 41604 E-02"), "small").unwrap();
    let opts = RunOptions::default();
    let first = run_cases(&config, None, &opts).unwrap();
    let second = run_cases(&config, None, &opts).unwrap();
    assert_eq!(first.reports.len(), 1);
    for (a, b) in first.reports.iter().zip(&second.reports) {
        assert_eq!(a.value_fields(), b.value_fields());
    }
}

#[test]
fn first_collinear_row_reaches_twenty_digits() {
    let config = load_config("threecenter1").unwrap();
    let run = run_cases(&config, Some("threecenter1-01"), &RunOptions::default()).unwrap();
    let r = &run.reports[0];
    assert!(r.matching_digits >= 20, "{} digits: {}", r.matching_digits, r.computed);
    assert_eq!(r.status, Some(Status::Match));
}
