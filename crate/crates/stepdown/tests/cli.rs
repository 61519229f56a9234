//! End-to-end tests of the command line interface: flag handling, config
//! merging, file formats, determinism, and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stepdown"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_file(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path.display().to_string()
}

#[test]
fn simulate_csv_is_deterministic_and_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        let res = run(&[
            "simulate",
            "--m",
            "30",
            "--cov",
            "ar1",
            "--rho",
            "0.4",
            "--p",
            "0.2",
            "--v",
            "9",
            "--methods",
            "bsd,bh,bonf",
            "--reps",
            "25",
            "--seed",
            "7",
            "--format",
            "csv",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(
            res.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&res.stderr)
        );
    }
    let a = fs::read(&out_a).unwrap();
    let b = fs::read(&out_b).unwrap();
    assert_eq!(a, b, "same config and seed must produce identical bytes");
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "method,metric,estimate,std_error,replicates"
    );
    assert_eq!(lines.count(), 3 * 5, "3 methods x 5 metrics");
}

#[test]
fn simulate_json_echoes_config_and_flags_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "exp.toml",
        r#"
m = 10
p = 0.3
v = 4.0
replicates = 5
seed = 11
methods = ["bsd"]

[cov]
family = "intraclass"
rho = 0.2
"#,
    );
    let out = dir.path().join("report.json");
    let res = run(&[
        "simulate",
        "--config",
        &config,
        "--m",
        "16",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        res.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&res.stderr)
    );
    let parsed: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(parsed["config"]["m"], 16, "flag must override the file");
    assert_eq!(parsed["config"]["seed"], 11);
    assert_eq!(parsed["config"]["cov"]["family"], "intraclass");
    assert!(parsed["rows"].as_array().unwrap().len() == 5);
    assert_eq!(parsed["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn simulate_rejects_bad_config_with_exit_2() {
    // missing required m
    let res = run(&["simulate", "--p", "0.2", "--v", "4"]);
    assert_eq!(res.status.code(), Some(2));
    // out-of-range correlation
    let res = run(&[
        "simulate",
        "--m",
        "10",
        "--cov",
        "intraclass",
        "--rho",
        "1.5",
        "--p",
        "0.2",
        "--v",
        "4",
    ]);
    assert_eq!(res.status.code(), Some(2));
    // unknown method token
    let res = run(&[
        "simulate",
        "--m",
        "10",
        "--p",
        "0.2",
        "--v",
        "4",
        "--methods",
        "bsd,nope",
    ]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn test_one_prints_the_trace() {
    let dir = tempfile::tempdir().unwrap();
    let x = write_file(dir.path(), "x.txt", "6.0\n0.1\n-0.3\n");
    let sigma = write_file(
        dir.path(),
        "sigma.txt",
        "3\n1 0.3 0.09\n0.3 1 0.3\n0.09 0.3 1\n",
    );
    let res = run(&[
        "test-one",
        "--x-file",
        &x,
        "--sigma-file",
        &sigma,
        "--p",
        "0.1",
        "--v",
        "25",
        "--methods",
        "bsd,mrd",
    ]);
    assert!(
        res.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&res.stderr)
    );
    let text = stdout(&res);
    assert!(text.contains("bsd stage 1: index 1"), "output: {text}");
    assert!(text.contains("mrd stage 1"), "output: {text}");
    assert!(text.contains("smallest two-sided marginal p-value"));
}

#[test]
fn test_one_standardizes_covariance_input() {
    let dir = tempfile::tempdir().unwrap();
    // covariance diag(4, 1): x = (4, 0) standardizes to (2, 0)
    let x = write_file(dir.path(), "x.txt", "4.0 0.0\n");
    let sigma = write_file(dir.path(), "sigma.txt", "2\n4 0\n0 1\n");
    let res = run(&[
        "test-one",
        "--x-file",
        &x,
        "--sigma-file",
        &sigma,
        "--p",
        "0.5",
        "--v",
        "3",
    ]);
    assert!(res.status.success());
    let text = stdout(&res);
    // log statistic at the standardized x = 2: log(0.5) + 1.5 = 0.806853
    assert!(text.contains("statistic 0.806853"), "output: {text}");
}

#[test]
fn test_one_estimates_parameters_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let values: Vec<String> = (0..50)
        .map(|i| {
            if i % 10 == 0 {
                "8.0".into()
            } else {
                format!("{:.2}", (i as f64) * 0.01 - 0.25)
            }
        })
        .collect();
    let x = write_file(dir.path(), "x.txt", &values.join("\n"));
    let res = run(&["test-one", "--x-file", &x, "--estimate-params"]);
    assert!(
        res.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&res.stderr)
    );
    let text = stdout(&res);
    assert!(text.contains("estimated p ="), "output: {text}");
    // strong coordinates should be rejected
    assert!(text.contains("reject"), "output: {text}");
}

#[test]
fn numeric_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let x = write_file(dir.path(), "x.txt", "1.0 0.5\n");
    // symmetric, positive diagonal, but indefinite
    let sigma = write_file(dir.path(), "sigma.txt", "2\n1 2\n2 1\n");
    let res = run(&[
        "test-one",
        "--x-file",
        &x,
        "--sigma-file",
        &sigma,
        "--p",
        "0.2",
        "--v",
        "4",
    ]);
    assert_eq!(
        res.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&res.stderr)
    );
}

#[test]
fn mismatched_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let x = write_file(dir.path(), "x.txt", "1.0 0.5 0.2\n");
    let sigma = write_file(dir.path(), "sigma.txt", "2\n1 0\n0 1\n");
    let res = run(&[
        "test-one",
        "--x-file",
        &x,
        "--sigma-file",
        &sigma,
        "--p",
        "0.2",
        "--v",
        "4",
    ]);
    assert_eq!(res.status.code(), Some(2));
    // malformed matrix file
    let bad = write_file(dir.path(), "bad.txt", "2\n1 0\n0\n");
    let res = run(&[
        "test-one",
        "--x-file",
        &x,
        "--sigma-file",
        &bad,
        "--p",
        "0.2",
        "--v",
        "4",
    ]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn custom_sigma_simulate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    // a covariance (not correlation) input: the harness standardizes it
    let sigma = write_file(dir.path(), "sigma.txt", "3\n4 1 0\n1 2 0.5\n0 0.5 1\n");
    let out = dir.path().join("r.json");
    let res = run(&[
        "simulate",
        "--m",
        "3",
        "--cov",
        "custom",
        "--sigma-file",
        &sigma,
        "--p",
        "0.3",
        "--v",
        "9",
        "--methods",
        "bsd,mrd,bh,by,bonf,abh",
        "--reps",
        "10",
        "--seed",
        "3",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
        "--per-replicate",
    ]);
    assert!(
        res.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&res.stderr)
    );
    let parsed: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(parsed["rows"].as_array().unwrap().len(), 6 * 5);
    assert_eq!(
        parsed["replicate_rows"].as_array().unwrap().len(),
        6 * 10,
        "per-replicate rows present"
    );
}
