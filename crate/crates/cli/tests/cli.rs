use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_sopcast");

/// Small, fast settings for end-to-end runs.
const QUICK: &str = r#"
seed = 9
[synth]
duration_s = 345600
[train]
max_epochs = 3
[benchmark]
test_fraction = 0.4
short_train_stride = 200
short_test_stride = 600
"#;

fn sopcast(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = sopcast(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn quick_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), QUICK).unwrap();
    dir
}

#[test]
fn help_exits_zero_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["", "synth", "train", "forecast", "eval", "decompose", "correlate"] {
        let args: Vec<&str> = sub.split_whitespace().chain(["--help"]).collect();
        let out = sopcast(dir.path(), &args);
        assert_eq!(out.status.code(), Some(0), "{sub} --help");
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"));
    }
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sopcast(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(sopcast(dir.path(), &["synth", "--bogus"]).status.code(), Some(1));
    assert_eq!(sopcast(dir.path(), &[]).status.code(), Some(1));
    assert_eq!(sopcast(dir.path(), &["forecast", "--mode", "sideways"]).status.code(), Some(1));
    std::fs::write(dir.path().join("bad.toml"), "[paths]\nsopp = \"x\"\n").unwrap();
    assert_eq!(
        sopcast(dir.path(), &["--config", "bad.toml", "synth"]).status.code(),
        Some(1)
    );
    assert_eq!(sopcast(dir.path(), &["--config", "missing.toml", "synth"]).status.code(), Some(1));
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = sopcast(dir.path(), &["train", "--data-dir", "nowhere"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(dir.path().join("sop.csv"), "timestamp,sop_rad_per_s\n0,1\n1,2\n").unwrap();
    let out = sopcast(dir.path(), &["decompose", "--sop", "sop.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn synth_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "--seed", "42", "--days", "3", "--out", "a"]);
    ok(dir.path(), &["synth", "--seed", "42", "--days", "3", "--out", "b"]);
    ok(dir.path(), &["synth", "--seed", "43", "--days", "3", "--out", "c"]);
    for f in ["sop_1s.csv", "weather_30min.csv", "synth.json"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        assert_eq!(a, std::fs::read(dir.path().join("b").join(f)).unwrap(), "{f}");
    }
    assert_ne!(
        std::fs::read(dir.path().join("a/sop_1s.csv")).unwrap(),
        std::fs::read(dir.path().join("c/sop_1s.csv")).unwrap()
    );
    let header = std::fs::read_to_string(dir.path().join("a/weather_30min.csv")).unwrap();
    assert!(header.starts_with("timestamp,wind_gust,temperature,humidity\n"));
}

#[test]
fn pipeline_end_to_end() {
    let dir = quick_dir();
    let d = dir.path();
    let cfg = ["--config", "run.toml"];
    let with = |extra: &[&str]| -> Vec<String> { cfg.iter().chain(extra).map(|s| s.to_string()).collect() };
    let run = |extra: &[&str]| {
        let args = with(extra);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        ok(d, &refs)
    };

    run(&["synth"]);
    assert!(d.join("data/sop_1s.csv").exists());
    run(&["train"]);
    for f in ["windy", "calm", "short_ann", "long_term", "ann_dwt", "long_ann", "training"] {
        assert!(d.join("models").join(format!("{f}.json")).exists(), "{f}");
    }

    run(&["forecast", "--out", "short.csv"]);
    let short = std::fs::read_to_string(d.join("short.csv")).unwrap();
    assert_eq!(short.lines().count(), 1 + 12);
    assert!(short.starts_with("timestamp,sop_rad_per_s\n"));

    let out = run(&["forecast", "--mode", "long"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1 + 24);

    run(&["forecast", "--mode", "adaptive", "--out", "fused.csv"]);
    let fused = std::fs::read_to_string(d.join("fused.csv")).unwrap();
    let lines: Vec<&str> = fused.lines().collect();
    assert_eq!(lines[0], "timestamp,sop_rad_per_s,provenance");
    assert_eq!(lines.len(), 1 + 24 * 30 + 1);
    assert!(lines[1..].iter().all(|l| l.ends_with(",long-term") || l.ends_with(",short-term")));

    // a threshold no gust reaches turns the gate off everywhere
    let out = run(&["forecast", "--mode", "adaptive", "--threshold", "1e9"]);
    let calm = String::from_utf8(out.stdout).unwrap();
    assert!(calm.lines().skip(1).all(|l| l.ends_with(",long-term")));
    // and one every gust reaches turns it on
    let out = run(&["forecast", "--mode", "adaptive", "--threshold", "1e-9"]);
    let windy = String::from_utf8(out.stdout).unwrap();
    assert!(windy.lines().skip(1).all(|l| l.ends_with(",short-term")));

    run(&["eval", "--out", "reports"]);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("reports/report_short.json")).unwrap()).unwrap();
    let methods: Vec<&str> = report["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["method"].as_str().unwrap())
        .collect();
    assert_eq!(methods, ["windy", "calm", "ann", "moving_average"]);
    assert_eq!(report["seed"], 9);
    assert!(d.join("reports/predictions.csv").exists());

    let out = run(&["decompose"]);
    let dump: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(dump["levels"], 5);
    assert_eq!(dump["original_length"], 36);

    let out = run(&["correlate", "--scale", "long"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("channel,band,r\n"));
    assert_eq!(csv.lines().count(), 1 + 3 * 6);
}
