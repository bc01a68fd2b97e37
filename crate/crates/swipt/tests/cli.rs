//! End-to-end checks of the command line binary: exit codes, output
//! formats, and run-to-run reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_swipt"))
}

fn write_link_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("link.json");
    std::fs::write(
        &path,
        serde_json::json!({
            "p_avg": 1.0,
            "f_c": 16.0,
            "bandwidth_b": 1.0,
            "a_gain": 1.0,
            "phi": 0.7,
            "sigma_a_sq": 0.1,
            "sigma_cov_sq": 0.001,
            "eta": 1.0,
        })
        .to_string(),
    )
    .unwrap();
    path
}

fn write_experiment_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("exp.json");
    std::fs::write(
        &path,
        serde_json::json!({
            "n_antennas": 3,
            "k_users": 2,
            "pathloss_db": -40.0,
            "sigma_a_dbm": -70.0,
            "sigma_cov_dbm": -50.0,
            "eta": 1.0,
            "seed": 11,
            "trials": 2,
            "sweep": {
                "parameter": "gamma",
                "values": [0.5, 2.0],
                "fixed": 1e-6,
            },
        })
        .to_string(),
    )
    .unwrap();
    path
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn simulate_receiver_reports_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_link_config(dir.path());

    let output = bin()
        .args(["simulate-receiver", "--config"])
        .arg(&config)
        .args(["--samples", "150", "--seed", "3", "--format", "csv"])
        .output()
        .unwrap();
    let text = stdout_of(&output);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "power_l,power_h,rho,q_harvested,snr");
    let row: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(row.len(), 5);
    assert!((row[2] - 0.5).abs() < 0.1, "rho {}", row[2]);

    let output = bin()
        .args(["simulate-receiver", "--config"])
        .arg(&config)
        .args(["--samples", "150", "--seed", "3", "--format", "json"])
        .output()
        .unwrap();
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert!(json["rho"].is_f64());
    assert!(json["recovered_lowpass"].is_array());
}

#[test]
fn simulate_receiver_rejects_missing_config_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["simulate-receiver", "--config"])
        .arg(dir.path().join("absent.json"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn simulate_receiver_rejects_short_windows_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_link_config(dir.path());
    let output = bin()
        .args(["simulate-receiver", "--config"])
        .arg(&config)
        .args(["--samples", "10"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&output.stderr).is_empty());
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"n_antennas\": 0}").unwrap();
    let output = bin().args(["sweep", "--config"]).arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn invalid_config_values_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero_trials.json");
    std::fs::write(
        &path,
        serde_json::json!({
            "n_antennas": 2,
            "k_users": 2,
            "pathloss_db": 0.0,
            "sigma_a_dbm": -70.0,
            "sigma_cov_dbm": -50.0,
            "eta": 1.0,
            "seed": 1,
            "trials": 0,
            "sweep": {"parameter": "gamma", "values": [1.0], "fixed": 0.0},
        })
        .to_string(),
    )
    .unwrap();
    let output = bin().args(["sweep", "--config"]).arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn sweep_csv_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_experiment_config(dir.path());
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    for out in [&first, &second] {
        let output = bin()
            .args(["sweep", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(out)
            .output()
            .unwrap();
        assert!(output.status.success());
    }
    let a = std::fs::read(&first).unwrap();
    let b = std::fs::read(&second).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with(
        "sweep_value,mean_power_w,mean_power_dbm,feasible_rate,rank1_rate,mean_gap\n"
    ));
}

#[test]
fn sweep_json_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_experiment_config(dir.path());
    let runs: Vec<String> = (0..2)
        .map(|_| {
            let output = bin()
                .args(["sweep", "--config"])
                .arg(&config)
                .args(["--format", "json"])
                .output()
                .unwrap();
            stdout_of(&output)
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    let json: serde_json::Value = serde_json::from_str(&runs[0]).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 2);
    assert!(json[0]["mean_power_w"].is_f64());
}

#[test]
fn seed_flag_overrides_config_seed() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_experiment_config(dir.path());
    let base = stdout_of(&bin().args(["sweep", "--config"]).arg(&config).output().unwrap());
    let same = stdout_of(
        &bin()
            .args(["sweep", "--config"])
            .arg(&config)
            .args(["--seed", "11"])
            .output()
            .unwrap(),
    );
    let other = stdout_of(
        &bin()
            .args(["sweep", "--config"])
            .arg(&config)
            .args(["--seed", "12"])
            .output()
            .unwrap(),
    );
    assert_eq!(base, same);
    assert_ne!(base, other);
}

#[test]
fn optimize_reports_solution_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_experiment_config(dir.path());
    let output = bin()
        .args(["optimize", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert!(json["total_power_w"].as_f64().unwrap() > 0.0);
    assert!(json["gap"].as_f64().unwrap() < 1e-6);
    assert_eq!(json["beamformers"].as_array().unwrap().len(), 2);
    assert_eq!(json["beamformers"][0].as_array().unwrap().len(), 3);

    let output = bin()
        .args(["optimize", "--config"])
        .arg(&config)
        .args(["--format", "csv"])
        .output()
        .unwrap();
    let text = stdout_of(&output);
    assert!(text.starts_with(
        "total_power_w,total_power_dbm,sdp_bound_w,gap,rank_one,iterations,method\n"
    ));
}

#[test]
fn feasibility_lists_one_row_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_experiment_config(dir.path());
    let output = bin()
        .args(["feasibility", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    let text = stdout_of(&output);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "trial,threshold_sum,rank,feasible");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].ends_with("true"));
}

#[test]
fn trace_dump_writes_time_value_rows() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_link_config(dir.path());
    let trace = dir.path().join("trace.csv");
    let report = dir.path().join("report.json");
    let output = bin()
        .args(["simulate-receiver", "--config"])
        .arg(&config)
        .args(["--samples", "150", "--seed", "9"])
        .arg("--dump-trace")
        .arg(&trace)
        .arg("--out")
        .arg(&report)
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "time,value");
    let row = lines.next().unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields.len(), 2);
    assert_eq!(fields[0].parse::<f64>().unwrap(), 0.0);
    // 150 symbols at 512 samples each, plus the header line.
    assert_eq!(text.lines().count(), 150 * 512 + 1);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(report["power_h"].is_f64());
}
