//! End-to-end runs of the `mumimo` binary.

use std::path::Path;
use std::process::Command;

fn mumimo() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mumimo"))
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("sweep.cfg");
    std::fs::write(&path, text).unwrap();
    path
}

const SMALL: &str = "receivers = joint-ml, null-ml\nms = qam4\nmi = qam16\nn = 12\ntrials = 40\nsnr_db = 0:5:10\n";

#[test]
fn classify_sweep_writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("fig.csv");
    let status = mumimo()
        .args(["classify-sweep", "--config"])
        .arg(&cfg)
        .args(["--seed", "1", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("snr_db,receiver,ms,mi_true,n,p_correct,ci,trials"));
    assert_eq!(lines.count(), 6);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["schema_version"], 1);
    assert_eq!(meta["config"]["seed"], 1);
    assert_eq!(meta["config_digest"].as_str().unwrap().len(), 16);
}

#[test]
fn json_output_mirrors_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let run = |format: &str| {
        let out = mumimo()
            .args(["classify-sweep", "--format", format, "--config"])
            .arg(&cfg)
            .output()
            .unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let csv = run("csv");
    let json: serde_json::Value = serde_json::from_str(&run("json")).unwrap();
    let records = json["records"].as_array().unwrap();
    assert_eq!(records.len(), csv.lines().count() - 1);
    for (row, rec) in csv.lines().skip(1).zip(records) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[1], rec["receiver"].as_str().unwrap());
        assert_eq!(fields[3], rec["mi_true"].as_str().unwrap());
        let v: f64 = fields[5].parse().unwrap();
        assert!((v - rec["value"].as_f64().unwrap()).abs() < 1e-6);
        assert_eq!(rec["metric"], "p_correct_classification");
    }
}

#[test]
fn missing_config_names_the_path() {
    let out = mumimo()
        .args(["classify-sweep", "--config", "/nonexistent/fig9.cfg"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/fig9.cfg"));
}

#[test]
fn invalid_field_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "trials = 0\n");
    let out = mumimo().args(["ber-sweep", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("trials"));
}

#[test]
fn unknown_subcommand_and_flag_print_usage() {
    for args in [&["frobnicate"][..], &["classify-sweep", "--bogus"][..]] {
        let out = mumimo().args(args).output().unwrap();
        assert!(!out.status.success());
        assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    }
}

#[test]
fn count_distances_reports_counts() {
    let out = mumimo().arg("count-distances").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("8960"), "{text}");
    assert!(text.contains("22.8"), "{text}");
    let out = mumimo().args(["count-distances", "--format", "json"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["genie_entries"], 8960);
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let run = |threads: &str| {
        mumimo()
            .env("MUMIMO_THREADS", threads)
            .args(["classify-sweep", "--config"])
            .arg(&cfg)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn shipped_configs_are_valid() {
    let figs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../figs");
    let mut n = 0;
    for entry in std::fs::read_dir(&figs).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "cfg") {
            let cfg = mumimo::harness::ExperimentConfig::load(&path).unwrap();
            cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 3);
}
