use std::process::Command;

use schedlab::cli::main_with_args;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("schedlab").chain(args.iter().copied());
    let code = main_with_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn payload(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn constants_row_for_inverse_square() {
    let (code, out, _) = run(&["constants", "--c", "1", "--alpha", "2"]);
    assert_eq!(code, 0);
    let rows = payload(&out);
    assert_eq!(rows[0], "c,alpha,r_star,eta_star,gamma");
    let fields: Vec<f64> = rows[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(&fields[..2], &[1.0, 2.0]);
    assert!((fields[2] - 4.0 / std::f64::consts::PI.powi(2)).abs() < 1e-12);
    assert!((fields[3] - 0.5).abs() < 1e-12);
    assert!((fields[4] - 2.903_165_410_578_91).abs() < 1e-9);
}

#[test]
fn zero_perturbation_path_is_the_schedule() {
    let (code, out, _) = run(&["path", "--model", "zero", "--u", "0.3", "--window", "0", "3"]);
    assert_eq!(code, 0);
    assert_eq!(payload(&out), ["schedule_index,arrival_time", "0,0.3", "1,1.3", "2,2.3"]);
    assert!(out.contains("# u: 0.3"));
}

#[test]
fn every_output_ends_with_a_payload_checksum() {
    use sha2::{Digest, Sha256};
    let (_, out, _) = run(&["tail-exact", "--p", "0.5,0.5,0.25", "--n", "0,1,2,3"]);
    let last = out.lines().last().unwrap();
    let mut h = Sha256::new();
    for l in payload(&out) {
        h.update(l.as_bytes());
        h.update(b"\n");
    }
    let hex: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(last, format!("# sha256: {hex}"));
}

#[test]
fn tail_exact_list_matches_hand_value() {
    let (code, out, _) = run(&["tail-exact", "--p", "0.5,0.5", "--n", "2"]);
    assert_eq!(code, 0);
    let prob: f64 = payload(&out)[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((prob - 0.25).abs() < 1e-12);
}

#[test]
fn missing_config_names_the_file_and_exits_two() {
    let (code, _, err) = run(&["experiment", "--config", "missing.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("missing.json"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["constants", "--c", "1"]).0, 2);
    assert_eq!(run(&["constants", "--c", "1", "--alpha", "2", "--bogus"]).0, 2);
    let (code, _, err) = run(&["tail-exact", "--n", "3"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"), "{err}");
    assert_eq!(run(&["constants", "--c", "1", "--alpha", "0.9"]).0, 2);
}

#[test]
fn invalid_config_exits_two_with_reason() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"experiment":"covariance","model":{"family":"symmetric_pareto","c":0.25,"alpha":0.9}}"#)
        .unwrap();
    let (code, _, err) = run(&["experiment", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("alpha must exceed 1"), "{err}");
}

#[test]
fn runtime_errors_exit_one() {
    // Lag 1 overlaps the reference interval, which the covariance routine rejects.
    let (code, _, err) = run(&["covariance", "--model", "laplace:1", "--n", "1"]);
    assert_eq!(code, 1, "{err}");
}

fn small_covariance(dir: &std::path::Path) -> std::path::PathBuf {
    let path = dir.join("cov.json");
    std::fs::write(&path, r#"{"experiment":"covariance","n_grid":[2,5],"mc_n":[3],"replications":400}"#).unwrap();
    path
}

#[test]
fn experiment_writes_csv_and_sidecar_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_covariance(dir.path());
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let cfg = cfg.to_str().unwrap();
    assert_eq!(run(&["--threads", "1", "experiment", "--config", cfg, "--out", a.to_str().unwrap()]).0, 0);
    assert_eq!(run(&["--threads", "3", "experiment", "--config", cfg, "--out", b.to_str().unwrap()]).0, 0);
    let csv_a = std::fs::read(&a).unwrap();
    assert_eq!(csv_a, std::fs::read(&b).unwrap());

    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(side["experiment"], "covariance");
    assert_eq!(side["seed"], schedlab::config::DEFAULT_SEED);
    assert_eq!(side["threads"], 1);
    let text = String::from_utf8(csv_a).unwrap();
    assert!(text.ends_with(&format!("# sha256: {}\n", side["sha256"].as_str().unwrap())));
    assert!(text.contains("\"eps\":1e-10") && text.contains("\"u\":0.5"), "defaults echoed");
}

#[test]
fn seed_flag_overrides_config_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_covariance(dir.path());
    let cfg = cfg.to_str().unwrap();
    let (_, base, _) = run(&["experiment", "--config", cfg]);
    let (_, other, _) = run(&["--seed", "7", "experiment", "--config", cfg]);
    assert!(other.contains("\"seed\":7"));
    assert_ne!(base, other);
}

#[test]
fn json_format_is_valid_json() {
    let (code, out, _) = run(&["--format", "json", "covariance", "--model", "laplace:1", "--n", "2,3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_schedlab");
    let ok = Command::new(bin).args(["constants", "--c", "1", "--alpha", "2"]).output().unwrap();
    assert!(ok.status.success());
    let missing = Command::new(bin).args(["experiment", "--config", "nowhere.json"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nowhere.json"));
}
