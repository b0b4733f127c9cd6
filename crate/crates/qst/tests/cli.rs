use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qst(args: &[&str], dir: &Path, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qst"));
    cmd.args(args).current_dir(dir);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn closed_run_writes_table_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "c.toml",
        "mode = \"closed\"\nM = 4\nt_max = 3.141592653589793\nnum_points = 5\n",
    );
    let out = qst(
        &["closed", "--config", "c.toml", "--out", "closed.csv"],
        dir.path(),
        &[],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("closed.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,fidelity,sin_law");
    assert_eq!(lines.len(), 6);
    let mid: Vec<&str> = lines[3].split(',').collect();
    assert_eq!(mid, ["1.57079632679", "1.00000000000", "1.00000000000"]);

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("closed.json")).unwrap()).unwrap();
    assert!((summary["peak_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(
        (summary["time_of_peak"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12
    );
    assert!(summary["max_deviation"].is_null());
    assert!(stderr(&out).contains("peak_fidelity"));
}

#[test]
fn compare_reports_small_deviation() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "c.toml",
        "mode = \"open\"\nM = 2\nN = 1\nt_max = 10.0\nnum_points = 201\noutput = \"cmp.csv\"\n",
    );
    let out = qst(&["compare", "--config", "c.toml"], dir.path(), &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("cmp.csv")).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("t,fidelity_analytic,fidelity_numeric,abs_deviation")
    );
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("cmp.json")).unwrap()).unwrap();
    assert_eq!(summary["mode"], "compare");
    assert!(summary["max_deviation"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn output_is_deterministic_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "s.toml",
        "mode = \"sweep\"\nM = 3\nN = [1, 5, 10, 25, 50]\nt_max = 4.0\nnum_points = 401\n",
    );
    let mut outputs = Vec::new();
    for (name, threads) in [("a.csv", "1"), ("b.csv", "4"), ("c.csv", "4")] {
        let out = qst(
            &["sweep", "--config", "s.toml", "--out", name],
            dir.path(),
            &[("QST_THREADS", threads)],
        );
        assert!(out.status.success(), "{}", stderr(&out));
        let csv = fs::read(dir.path().join(name)).unwrap();
        let json = fs::read(dir.path().join(name).with_extension("json")).unwrap();
        outputs.push((csv, json));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn sweep_peaks_are_nondecreasing() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "s.toml",
        "mode = \"sweep\"\nM = 2\nt_max = 3.0\nnum_points = 301\n",
    );
    let out = qst(
        &[
            "sweep",
            "--config",
            "s.toml",
            "--out",
            "s.csv",
            "--set",
            "N=[1,5,10,25,50]",
        ],
        dir.path(),
        &[],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("t,fidelity_N1,fidelity_N5,fidelity_N10,fidelity_N25,fidelity_N50")
    );
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    let peaks: Vec<f64> = summary["sweep"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["peak_fidelity"].as_f64().unwrap())
        .collect();
    assert_eq!(peaks.len(), 5);
    assert!(peaks.windows(2).all(|w| w[1] >= w[0]), "{peaks:?}");
}

#[test]
fn stdout_when_no_output_path() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "o.toml",
        "mode = \"open\"\nM = 2\nN = 50\nlambda = 50\nnum_points = 11\n",
    );
    let out = qst(&["open", "--config", "o.toml"], dir.path(), &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("t,fidelity"));
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad_m.toml", "M = 1\n");
    let out = qst(&["closed", "--config", "bad_m.toml"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("M must be ≥ 2"));

    write(dir.path(), "broken.toml", "M = 3\nt_max = [\n");
    let out = qst(&["closed", "--config", "broken.toml"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line"), "{}", stderr(&out));

    let out = qst(&["closed", "--config", "missing.toml"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(3));

    write(dir.path(), "ok.toml", "M = 3\n");
    let out = qst(
        &[
            "closed",
            "--config",
            "ok.toml",
            "--out",
            "no/such/dir/x.csv",
        ],
        dir.path(),
        &[],
    );
    assert_eq!(out.status.code(), Some(3));

    let out = qst(
        &["oracle", "--config", "ok.toml", "--set", "dt=0.5"],
        dir.path(),
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("dt"));

    let out = qst(
        &["sweep", "--config", "ok.toml"],
        dir.path(),
        &[("QST_THREADS", "zero")],
    );
    assert_eq!(out.status.code(), Some(1));

    let out = qst(&["teleport"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
}
