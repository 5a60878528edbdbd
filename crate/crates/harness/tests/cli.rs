use std::process::{Command, Output};

fn ffgcd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffgcd")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn eval_and_height_print_reduced_values() {
    let out = ffgcd(&["eval", "(t^2-1)/(t-1)"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "t+1");
    let out = ffgcd(&["height", "t^3/(t+1)"]);
    assert_eq!(stdout(&out).trim(), "3");
}

#[test]
fn gcdcount_prints_both_counts() {
    let out = ffgcd(&["gcdcount", "t^2-1", "t-1"]);
    assert_eq!(stdout(&out), "N_S,gcd = 1\nh_gcd = 1\n");
    let out = ffgcd(&["gcdcount", "t^2-1", "t-1", "--S", "t-1"]);
    assert_eq!(stdout(&out), "N_S,gcd = 0\nh_gcd = 1\n");
}

#[test]
fn bad_input_exits_with_two() {
    let out = ffgcd(&["eval", "t+"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
    assert_eq!(ffgcd(&["suite", "nope"]).status.code(), Some(2));
}

#[test]
fn suite_writes_json_to_stdout() {
    let out = ffgcd(&["suite", "gauss", "--count", "3", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verdicts"].as_array().unwrap().len(), 3);
}

#[test]
fn config_files_select_the_suite() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    let csv = dir.path().join("run.csv");
    std::fs::write(&config, "suite = \"divisor\"\nseed = 2\ncount = 4\n").unwrap();
    let out = ffgcd(&["--config", config.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 5);

    let out = ffgcd(&["--config", config.to_str().unwrap(), "suite", "--count", "2"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verdicts"].as_array().unwrap().len(), 2);
}

#[test]
fn du_prints_the_twisted_derivative() {
    let out = ffgcd(&["du", "--poly", "x1+x2", "--units", "t", "3*t"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "((1)/(t))*x1+((1)/(t))*x2");
}

#[test]
fn refine_reports_a_chain_failure_for_coordinate_forms() {
    let out = ffgcd(&["refine", "--F1", "x1", "--F2", "x2", "--units", "t", "t+1", "--m", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let verdict: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(verdict["check"], "refinement");
}

#[test]
fn pisot_reads_the_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("b.txt");
    std::fs::write(&input, "(T^2+2*t*T+t^2 ; t^2)\n").unwrap();
    let out = ffgcd(&["pisot", "--input", input.to_str().unwrap(), "--d", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let verdict: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(verdict["check"], "pisot");
}
