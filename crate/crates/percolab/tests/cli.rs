use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn percolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_percolab")).args(args).env_remove("PERCOLAB_THREADS").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).expect("file exists")).expect("valid json")
}

fn out(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

#[test]
fn verify_russo_reports_exact_identity() {
    let tmp = tempfile::tempdir().unwrap();
    let o = percolab(&["oracle", "verify-russo", "--event", "majority3", "--out", &out(tmp.path(), "r")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("identity: exact"));
}

#[test]
fn rsw_prints_a_report_with_margin() {
    let tmp = tempfile::tempdir().unwrap();
    let o = percolab(&["rsw", "--n", "8", "--p", "0.5", "--reps", "10000", "--seed", "42", "--out", &out(tmp.path(), "r")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let start = text.find('{').expect("json report");
    let end = text.rfind('}').unwrap();
    let report: Value = serde_json::from_str(&text[start..=end]).unwrap();
    assert!(report["margin"].as_f64().unwrap() > 0.0);
    assert!(report["tau"]["value"].as_f64().is_some());
}

#[test]
fn failed_check_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let o = percolab(&["mc", "annulus", "--ns", "8", "--reps", "10", "--out", &out(tmp.path(), "r")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL annulus-lower-bound"));
}

#[test]
fn usage_errors_exit_one() {
    let o = percolab(&["rsw", "--nn", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--n"));
    let o = percolab(&["rsw", "--p", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("outside [0, 1]"));
    assert_eq!(percolab(&["--help"]).status.code(), Some(0));
    assert_eq!(percolab(&["--version"]).status.code(), Some(0));
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, "# overrides\nreps = 500\nseed = 9\np = 0.6\n").unwrap();
    let dir = tmp.path().join("r");
    let o = percolab(&["--config", cfg.to_str().unwrap(), "rsw", "--p", "0.4", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = json(&dir.join("manifest.json"));
    assert_eq!(m["params"]["reps"], 500);
    assert_eq!(m["params"]["p"], serde_json::json!([0.4]));
    assert_eq!(m["params"]["n"], serde_json::json!([8]));
    assert_eq!(m["seed"], 9);

    fs::write(&cfg, "reps = 500\nbogus = 1\n").unwrap();
    let o = percolab(&["--config", cfg.to_str().unwrap(), "rsw", "--out", &out(tmp.path(), "s")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bogus"));
}

#[test]
fn results_follow_the_record_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("r");
    let o = percolab(&["mc", "theta", "--p", "0.6", "--radius", "4", "--reps", "200", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.join("results.jsonl")).unwrap();
    let rec: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    for key in ["op", "model", "params", "estimate", "stderr", "replicas", "seed", "wall_time"] {
        assert!(rec.get(key).is_some(), "missing {key}");
    }
    assert_eq!(rec["replicas"], 200);
    assert!(rec["wall_time"].is_null());
}

#[test]
fn report_summarises_runs_and_writes_plot_data() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("w");
    let o = percolab(&["threshold", "windows", "--ns", "8,16", "--reps", "400", "--out", dir.to_str().unwrap()]);
    assert!(o.status.code() == Some(0) || o.status.code() == Some(2), "{}", stderr(&o));
    let r = percolab(&["report", "--dir", dir.to_str().unwrap()]);
    assert_eq!(r.status.code(), o.status.code());
    assert!(stdout(&r).contains("window-shrinks"));
    let dat = fs::read_to_string(dir.join("sweep.dat")).unwrap();
    assert!(dat.starts_with("# n p estimate"));
    assert!(dat.contains("\n\n\n"), "blocks separated for gnuplot");

    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let r = percolab(&["report", "--dir", empty.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stderr(&r).contains("no manifest"));
}

#[test]
fn replay_is_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("u");
    let o = percolab(&["--threads", "1", "uniqueness", "--radii", "8,16", "--reps", "200", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = percolab(&["--threads", "3", "replay", "--dir", dir.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0), "{}{}", stdout(&r), stderr(&r));
    assert!(stdout(&r).contains("replay identical"));
    assert_eq!(fs::read(dir.join("results.jsonl")).unwrap(), fs::read(dir.join("replay/results.jsonl")).unwrap());
}

#[test]
fn thread_count_comes_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("r");
    let o = Command::new(env!("CARGO_BIN_EXE_percolab"))
        .args(["mc", "crossing", "--n", "2", "--reps", "100", "--out", dir.to_str().unwrap()])
        .env("PERCOLAB_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&dir.join("manifest.json"))["threads"], 3);
}

#[test]
fn dump_graph_matches_golden() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("g");
    let o = percolab(&["mc", "dump-graph", "--model", "bond-z2", "--shape", "box", "--m", "1", "--n", "1", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/box_1x1.json");
    assert_eq!(json(&dir.join("graph.json")), json(&golden));
}
