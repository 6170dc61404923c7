use std::process::{Command, Output};

use serde_json::Value;

fn tenscomb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tenscomb")).args(args).env("TENSCOMB_THREADS", "2").output().unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn same_flags_give_identical_bytes() {
    let runs: &[&[&str]] = &[
        &["graph", "--mode", "random", "--d", "4", "--order", "6", "--seed", "9", "--what", "summary"],
        &["scaling", "--what", "map", "--d", "3", "--seed", "17"],
        &["oracle", "--d", "3", "--moment", "quartic:1,quartic:2", "--N", "2"],
        &["loop", "--lambda", "0.2", "--what", "half", "--at", "1.5,0.5"],
        &["series", "--d", "2", "--order", "12", "--format", "csv"],
    ];
    for args in runs {
        let (a, b) = (tenscomb(args), tenscomb(args));
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn seed_is_always_reported() {
    let v = json(&tenscomb(&["series", "--what", "critical", "--d", "3"]));
    assert_eq!(v["manifest"]["seed"], 0);
    let v = json(&tenscomb(&["graph", "--mode", "random", "--d", "3", "--seed", "5"]));
    assert_eq!(v["manifest"]["seed"], 5);
    let csv = tenscomb(&["series", "--d", "3", "--order", "3", "--format", "csv", "--seed", "3"]);
    assert!(String::from_utf8(csv.stdout).unwrap().contains("seed=3"));
}

#[test]
fn output_formats() {
    let v = json(&tenscomb(&["series", "--d", "3", "--order", "4"]));
    assert_eq!(v["result"]["coefficients"][4], "140/1");
    let v = json(&tenscomb(&["scaling", "--d", "3", "--lambda", "4"]));
    assert_eq!(v["result"]["g2_exact"], "2/3");
    assert_eq!(v["result"]["alpha_plus"]["re"], "0");
    assert_eq!(v["result"]["g2"].as_str().unwrap(), "0.66666666666666663");
    let v = json(&tenscomb(&["oracle", "--d", "4", "--moment", "quartic", "--symbolic"]));
    assert_eq!(v["result"]["poly"], serde_json::json!({"-1": "1/1", "1": "1/1"}));
}

#[test]
fn exit_codes() {
    assert_eq!(tenscomb(&["series", "--nope"]).status.code(), Some(2));
    assert_eq!(tenscomb(&["graph", "--mode", "melon", "--d", "3", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(tenscomb(&["series", "--what", "melonic"]).status.code(), Some(2));
    assert_eq!(tenscomb(&["scaling", "--what", "double", "--d", "3", "--x", "0.05", "--N", "1e6"]).status.code(), Some(1));
    assert_eq!(tenscomb(&["knot", "--pd", "[[1,2,3,4]]"]).status.code(), Some(1));
    assert_eq!(tenscomb(&["knot", "--pd", "not json"]).status.code(), Some(1));
    assert_eq!(tenscomb(&["--help"]).status.code(), Some(0));
}

#[test]
fn knot_output_feeds_graph_input() {
    let dir = std::env::temp_dir().join(format!("tenscomb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("trefoil.json");
    let p = path.to_str().unwrap();
    let o = tenscomb(&["knot", "--pd", "[[1,5,2,4],[3,1,4,6],[5,3,6,2]]", "--out", p]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v = json(&tenscomb(&["graph", "--in", p, "--what", "summary"]));
    assert_eq!(v["result"]["vertices"], 24);
    let knot: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["omega"], knot["result"]["report"]["omega"]);
    let bubbles = json(&tenscomb(&["graph", "--in", p, "--what", "bubbles"]));
    let tori = bubbles["result"]["bubbles"].as_array().unwrap().iter().filter(|b| b["genus"] == 1).count();
    assert_eq!(tori, 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_subset() {
    let o = tenscomb(&["verify", "--suite", "1,2,16", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.lines().filter(|l| l.ends_with("PASS")).count(), 3);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["failed"], serde_json::json!([]));
    let bad = tenscomb(&["verify", "--suite", "15"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(tenscomb(&["verify", "--suite", "99"]).status.code(), Some(2));
}
