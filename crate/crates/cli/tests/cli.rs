use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn revbias(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_revbias"))
        .args(args)
        .env_remove("REVBIAS_THREADS")
        .output()
        .expect("binary runs")
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_revbias"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn report<'a>(v: &'a Value, rule: &str) -> &'a Value {
    v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["rule"] == rule)
        .unwrap()
}

#[test]
fn audit_fixtures() {
    let v = json(&revbias(&["audit", "--fixture", "intro-6-4", "--json"]));
    assert_eq!(report(&v, "minimax")["type1"], true);
    assert_eq!(report(&v, "minimax")["selection_p"], serde_json::json!([1]));

    let v = json(&revbias(&["audit", "--fixture", "tm3-4-4", "--json"]));
    let m = report(&v, "minimax");
    assert_eq!((m["type3"].as_bool(), m["type2"].as_bool()), (Some(true), Some(false)));
}

#[test]
fn audit_unanimous_profile_from_stdin() {
    let out = with_stdin(&["audit", "-", "--json", "--mu", "3"], "1 1 1\n2 2 2\n3 3 3\n");
    let v = json(&out);
    for r in v["reports"].as_array().unwrap() {
        assert_eq!(r["type3"], false, "{r}");
    }
    assert_eq!(v["graphs"][0]["arcs"].as_array().unwrap().len(), 3);
}

#[test]
fn audit_reports_parse_location() {
    let out = with_stdin(&["audit", "-"], "1 2 3\n2 x 1\n3 1 2\n");
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 2, column 2"), "{err}");
}

#[test]
fn verify_small_grid_exhaustively() {
    let out = revbias(&["verify", "--h", "2..4", "--n", "2..4", "--strategy", "exhaustive", "--json"]);
    let v = json(&out);
    assert_eq!(v["summary"]["cells"], 27);
    assert_eq!(v["summary"]["consistent"], 27);
    let cells = v["cells"].as_array().unwrap();
    let keys: Vec<(u64, u64, u64)> = cells
        .iter()
        .map(|c| (c["h"].as_u64().unwrap(), c["n"].as_u64().unwrap(), c["j"].as_u64().unwrap()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(cells.iter().all(|c| c.get("elapsed").is_none()));
}

#[test]
fn verify_seven_four_certificate() {
    let out = revbias(&[
        "verify", "--h", "7", "--n", "4", "--j", "1", "--strategy", "exhaustive", "--no-neutral", "--json",
    ]);
    let v = json(&out);
    let c = &v["cells"][0];
    assert_eq!(c["outcome"], "certified-immune");
    assert_eq!(c["profiles_examined"], 2_035_800);
    assert_eq!(c["kramer_mismatches"], 0);
}

#[test]
fn verify_constructive_witness() {
    let out = revbias(&["verify", "--h", "6", "--n", "4", "--j", "1", "--strategy", "constructive", "--json"]);
    let v = json(&out);
    assert_eq!(v["cells"][0]["outcome"], "witness-found");
    assert_eq!(v["cells"][0]["method"], "constructive");
}

#[test]
fn verify_exit_codes() {
    let out = revbias(&["verify", "--h", "5", "--n", "5", "--j", "1", "--samples", "500"]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("inconclusive"), "{text}");

    let out = revbias(&["verify", "--h", "4", "--n", "4", "--j", "1", "--strategy", "constructive", "--csv"]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("h,n,j,expected_immune,method,outcome"), "{text}");
}

#[test]
fn verify_is_byte_identical_across_runs_and_threads() {
    let args = ["verify", "--h", "2..6", "--n", "2..5", "--samples", "3000", "--seed", "99", "--json"];
    let a = revbias(&args);
    let b = revbias(&args);
    let c = Command::new(env!("CARGO_BIN_EXE_revbias"))
        .args(args)
        .env("REVBIAS_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn graph_exports() {
    let v = json(&revbias(&["graph", "--fixture", "tm2-5-4", "--reversed", "--mu", "4"]));
    assert_eq!(v["dominant_set"], serde_json::json!([1, 2, 4]));
    assert_eq!(v["analysis"]["maximal"], v["dominant_set"]);

    let v = json(&revbias(&["graph", "--fixture", "intro-6-4", "--mu", "6"]));
    assert_eq!(v["analysis"]["acyclic"], true);

    // odd h: the minimal-majority graph is a complete tournament
    let v = json(&revbias(&["graph", "--fixture", "tm2-5-5", "--mu", "3"]));
    assert_eq!(v["arcs"].as_array().unwrap().len(), 10);

    let out = revbias(&["graph", "--fixture", "intro-6-4", "--mu", "3"]);
    assert!(!out.status.success());

    let out = revbias(&["graph", "--fixture", "confronto1-3-3", "--mu", "2", "--dot", "-"]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph"), "{dot}");
    assert!(dot.contains("1 -> 2;"), "{dot}");
}

#[test]
fn compare_rules() {
    let v = json(&revbias(&["compare", "--h", "3", "--n", "3", "--rules", "minimax,copeland", "--json"]));
    assert_eq!(v["verdict"], "equal");
    assert_eq!(v["profiles_covered"], 216);

    let v = json(&revbias(&["compare", "--h", "3", "--n", "3", "--rules", "minimax,borda", "--json"]));
    assert_eq!(v["verdict"], "differ");
    assert!(v["first_difference"]["profile"].is_string());

    let v = json(&revbias(&["compare", "--h", "6", "--n", "2", "--rules", "m,bor", "--json"]));
    assert_eq!(v["verdict"], "equal");

    let out = revbias(&["compare", "--h", "3", "--n", "3", "--rules", "minimax"]);
    assert_eq!(out.status.code(), Some(1));
    let out = revbias(&["compare", "--h", "3", "--rules", "minimax,borda"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fixtures_and_thresholds() {
    let out = revbias(&["fixtures", "list"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 9);
    let out = revbias(&["fixtures", "emit", "tm3-2-n", "--param", "4"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "1 4\n2 1\n3 2\n4 3\n");
    let out = revbias(&["fixtures", "emit", "nope"]);
    assert!(!out.status.success());

    let out = revbias(&["thresholds", "--h", "6,7", "--n", "4", "--csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "h,n,mu0,mu_a,mu_g\n6,4,4,5,5\n7,4,4,5,6\n");
}

#[test]
fn witness_bundle_round_trip() {
    let out = revbias(&["witness", "--h", "9", "--n", "4", "--j", "1"]);
    let bundle = json(&out);
    assert_eq!(bundle["selections"]["p"], serde_json::json!([4]));
    assert_eq!(bundle["strategy"], "constructive");
    let text = String::from_utf8(out.stdout).unwrap();
    let out = with_stdin(&["certify", "-"], &text);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));

    let tampered = text.replacen("\"p\": [\n      4\n    ]", "\"p\": [\n      3\n    ]", 1);
    assert_ne!(tampered, text);
    let out = with_stdin(&["certify", "-"], &tampered);
    assert_eq!(out.status.code(), Some(2));

    let out = revbias(&["witness", "--h", "4", "--n", "4", "--j", "1", "--strategy", "exhaustive"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("certified immune"));
}
