//! End-to-end runs of the `walklab` binary.

use std::path::Path;
use std::process::{Command, Output};

fn walklab(args: &[&str], out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_walklab"));
    cmd.args(args).env_remove("WALKLAB_WORKERS");
    if let Some(dir) = out {
        cmd.arg("--out").arg(dir);
    }
    cmd.output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn speed_run_writes_csv_with_exact_headers() {
    let dir = tempfile::tempdir().unwrap();
    let o = walklab(&["--preset", "speed", "--n", "1000,2000,4000", "--replicas", "8", "--seed", "3"], Some(dir.path()));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let replicas = read(dir.path(), "replicas.csv");
    let lines: Vec<&str> = replicas.lines().collect();
    assert_eq!(lines[0], format!("# walklab {}", env!("CARGO_PKG_VERSION")));
    assert!(lines[1].starts_with("# config: preset=speed epsilon=0.1 n=1000,2000,4000"));
    assert_eq!(
        lines[2],
        "replica,epsilon,n,final_x,final_y,fresh_visits,gap_final,tan_count,envelope_max_ratio,progress_min"
    );
    assert_eq!(lines.len(), 3 + 3 * 8);
    assert!(read(dir.path(), "aggregate.csv").lines().nth(2) == Some("metric,count,mean,stderr,ci_low,ci_high,min,max"));
    let fit = read(dir.path(), "fit.csv");
    assert_eq!(fit.lines().nth(2), Some("metric,slope,intercept,r_squared,points"));
    assert!(fit.lines().nth(3).unwrap().starts_with("final_x|eps=0.1,"));

    let meta: serde_json::Value = serde_json::from_str(&read(dir.path(), "meta.json")).unwrap();
    assert_eq!(meta["config"]["replicas"], 8);
    assert!(meta["config"]["workers"].as_u64().unwrap() >= 1);
    assert!(meta["unix_time"].as_u64().is_some());
}

#[test]
fn json_output_mirrors_csv_sections() {
    let dir = tempfile::tempdir().unwrap();
    let o = walklab(
        &["--preset", "tan-exponent", "--n", "256,512,1024", "--replicas", "4", "--format", "json"],
        Some(dir.path()),
    );
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&read(dir.path(), "results.json")).unwrap();
    assert_eq!(v["config"]["preset"], "tan-exponent");
    assert_eq!(v["replicas"].as_array().unwrap().len(), 12);
    assert!(v["replicas"][0]["tan_count_total"].as_u64().is_some());
    assert!(v["aggregate"]["tan_count|eps=0|n=256"]["mean"].as_f64().is_some());
    assert!(v["fit"]["tan_count|eps=0"]["slope"].as_f64().is_some());
    assert!(!dir.path().join("replicas.csv").exists());
}

#[test]
fn lemma_b_grid_file() {
    let dir = tempfile::tempdir().unwrap();
    assert!(walklab(&["--preset", "lemma-b"], Some(dir.path())).status.success());
    let text = read(dir.path(), "lemma_b.csv");
    let rows: Vec<&str> = text.lines().skip(3).collect();
    assert_eq!(rows.len(), 45);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}

#[test]
fn windowed_progress_and_envelope_fill_their_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = walklab(&["--preset", "windowed-progress", "--n", "4096", "--replicas", "3"], Some(dir.path()));
    assert!(o.status.success());
    let row = read(dir.path(), "replicas.csv").lines().nth(3).unwrap().to_string();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[2], "8192");
    assert!(!fields[9].is_empty());

    let o = walklab(&["--preset", "envelope", "--n", "2000", "--replicas", "3"], Some(dir.path()));
    assert!(o.status.success());
    let row = read(dir.path(), "replicas.csv").lines().nth(3).unwrap().to_string();
    assert!(!row.split(',').nth(8).unwrap().is_empty());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "preset = coupling-audit\nn = 500\nreplicas = 10\n").unwrap();
    let out = dir.path().join("out");
    let o = walklab(&["--config", conf.to_str().unwrap(), "--replicas", "5"], Some(&out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(&out, "replicas.csv").lines().count(), 3 + 5);
}

#[test]
fn exit_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| walklab(args, Some(dir.path())).status.code();
    assert_eq!(code(&["--preset", "speed", "--epsilon", "0.3"]), Some(2));
    assert_eq!(code(&["--preset", "speed", "--bogus"]), Some(2));
    assert_eq!(code(&["--epsilon", "0.1"]), Some(2));
    assert_eq!(code(&["--preset", "speed", "--n", "100000000000"]), Some(4));
    assert_eq!(walklab(&["--help"], None).status.code(), Some(0));

    let file = dir.path().join("not-a-dir");
    std::fs::write(&file, "").unwrap();
    let o = walklab(&["--preset", "lemma-b"], Some(&file));
    assert_eq!(o.status.code(), Some(3));
    assert!(walklab(&["--preset", "lemma-b", "--config", "/nonexistent.conf"], None).status.code() == Some(3));
}

#[test]
fn env_worker_override_keeps_results() {
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: &str, sub: &str| {
        let out = dir.path().join(sub);
        let o = Command::new(env!("CARGO_BIN_EXE_walklab"))
            .args(["--preset", "envelope", "--n", "3000", "--replicas", "30", "--workers", "2", "--out"])
            .arg(&out)
            .env("WALKLAB_WORKERS", workers)
            .output()
            .unwrap();
        assert!(o.status.success());
        let meta: serde_json::Value = serde_json::from_str(&read(&out, "meta.json")).unwrap();
        (read(&out, "aggregate.csv"), meta["config"]["workers"].as_u64().unwrap())
    };
    let (a, wa) = run("1", "a");
    let (b, wb) = run("4", "b");
    assert_eq!((wa, wb), (1, 4));
    assert_eq!(a, b);
}
