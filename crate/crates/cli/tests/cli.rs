use std::path::PathBuf;
use std::process::{Command, Output};

use qgauss_core::export::{import_gauss, import_lpair, GaussJson, LPairJson};
use qgauss_core::{RatFunc, Rational};

fn qgauss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgauss")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qgauss-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn corrected_ybe_passes_and_literal_fails() {
    let ok = qgauss(&["check", "ybe", "--n", "2", "--convention", "corrected"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("PASS  ybe.n2.corrected"));
    let bad = qgauss(&["check", "ybe", "--n", "2", "--convention", "literal"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = stdout(&bad);
    assert!(text.contains("FAIL  ybe.n2.literal"));
    assert!(text.contains("first mismatch"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["check", "ybe", "--n", "0"][..],
        &["check", "nonsense"],
        &["check", "rll", "--q", "1"],
        &["check", "rll", "--q", "-1"],
        &["check", "rll", "--n", "5"],
        &["check", "rll", "--order", "1"],
        &["check", "rll", "--a", "0"],
        &["frobnicate"],
    ] {
        assert_eq!(qgauss(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let cfg = scratch("run.cfg");
    std::fs::write(&cfg, "# settings\nn = 3\norder = 3\nq = 3/2\nformat = json\n").unwrap();
    let out = qgauss(&["check", "unitarity", "--config", cfg.to_str().unwrap(), "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let ids: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["check_id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["r_at_one.n2.corrected", "unitarity.n2.corrected"]);

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(qgauss(&["check", "ybe", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn output_file_replaces_target() {
    let path = scratch("reports.json");
    std::fs::write(&path, "stale").unwrap();
    let out = qgauss(&["check", "ybe", "--n", "2", "--format", "json", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v[0]["verdict"], "pass");
    let leftovers: Vec<_> = std::fs::read_dir(path.parent().unwrap())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn exported_tables_import_back() {
    let out = qgauss(&["export", "--n", "2", "--order", "3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let j: LPairJson = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(j.variables, ["a", "q"]);
    let lp = import_lpair::<RatFunc<RatFunc<Rational>>>(&j).unwrap();
    assert_eq!((lp.n, lp.order), (2, 3));

    let out = qgauss(&["decompose", "--n", "2", "--order", "3", "--q", "2", "--a", "1/3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let g: std::collections::BTreeMap<String, GaussJson> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(g.keys().collect::<Vec<_>>(), ["minus", "plus"]);
    for table in g.values() {
        import_gauss::<Rational>(table).unwrap();
    }
}

#[test]
fn build_r_prints_the_matrix() {
    let out = qgauss(&["build-r", "--n", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["n"], 2);
    assert_eq!(v["entries"].as_array().unwrap().len(), 4);
    assert_eq!(v["entries"][0][0], "1");
}
