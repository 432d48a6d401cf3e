//! End-to-end tests of the binary: exit codes, report shape and stability,
//! and the reduce round trip, all against the bundled game files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn games_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../games")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monfg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn fixture(name: &str) -> String {
    games_dir().join(name).to_string_lossy().into_owned()
}

#[test]
fn reduce_round_trip_and_identity_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("tradeoff.json");
    let report = run_ok(&["reduce", &fixture("gym.json"), "--output", first.to_str().unwrap()]);
    assert_eq!(report["command"], "reduce");
    assert_eq!(
        report["results"]["payoffs"][0],
        serde_json::json!([[17.0], [26.0], [5.0], [4.0]])
    );

    // The written trade-off game re-ingests, and re-reducing it under the
    // identity utility is a fixed point.
    let mut reduced: Value =
        serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
    reduced["utilities"] = serde_json::json!(["p1", "p1"]);
    let second_in = dir.path().join("tradeoff_with_identity.json");
    std::fs::write(&second_in, serde_json::to_string(&reduced).unwrap()).unwrap();
    let second_out = dir.path().join("tradeoff2.json");
    let report2 = run_ok(&[
        "reduce",
        second_in.to_str().unwrap(),
        "--output",
        second_out.to_str().unwrap(),
    ]);
    assert_eq!(report["results"]["payoffs"], report2["results"]["payoffs"]);
}

#[test]
fn psne_reports_labels_and_warnings() {
    let report = run_ok(&["psne", &fixture("gym.json")]);
    assert_eq!(report["results"]["count"], 2);
    assert_eq!(report["results"]["psne"][0]["indices"], serde_json::json!([0, 0]));
    assert_eq!(
        report["results"]["psne"][1]["labels"],
        serde_json::json!(["Cardio", "Lifting"])
    );
    // The product utility of player 2 is not quasiconvex.
    assert_eq!(report["warnings"][0]["kind"], "not-quasiconvex");
    assert_eq!(report["warnings"][0]["player"], 1);

    let verified = run_ok(&["psne", &fixture("ser_esr_mismatch.json"), "--mode", "verified"]);
    assert_eq!(verified["results"]["count"], 0);
    assert!(verified["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .any(|w| w["kind"] == "empty-verified-set"));
}

#[test]
fn verify_examples() {
    let ne = run_ok(&[
        "verify",
        &fixture("ser_esr_mismatch.json"),
        "--profile",
        "0.55,0.45;1,0",
    ]);
    assert_eq!(ne["results"]["is-epsilon-ne"], true);
    assert!((ne["results"]["values"][0].as_f64().unwrap() - 0.3025).abs() < 1e-8);

    let not_ne = run_ok(&[
        "verify",
        &fixture("ser_esr_mismatch.json"),
        "--profile",
        "1,0;1,0",
    ]);
    assert_eq!(not_ne["results"]["is-epsilon-ne"], false);
    assert!((not_ne["results"]["exploitability"][0].as_f64().unwrap() - 0.2025).abs() < 1e-6);

    let blended = run_ok(&[
        "verify",
        &fixture("gym.json"),
        "--profile",
        "1,0;0.5,0.5",
        "--assignment",
        "ESR,SER",
    ]);
    assert_eq!(blended["results"]["is-epsilon-ne"], true);
    assert_eq!(blended["results"]["assignment"], serde_json::json!(["ESR", "SER"]));
}

#[test]
fn best_response_example() {
    let report = run_ok(&[
        "best-response",
        &fixture("gym.json"),
        "--player",
        "1",
        "--opponent",
        "1,0",
        "--criterion",
        "SER",
    ]);
    let strategy = report["results"]["strategy"].as_array().unwrap();
    assert!((strategy[0].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert!((report["results"]["value"].as_f64().unwrap() - 6.25).abs() < 1e-8);
    assert_eq!(report["results"]["value-is-lower-bound"], true);
}

#[test]
fn search_mixed_and_classify_examples() {
    let empty = run_ok(&["search-mixed", &fixture("no_ne_under_ser.json"), "--epsilon", "1e-4"]);
    assert_eq!(empty["results"]["count"], 0);
    let note = empty["results"]["note"].as_str().unwrap();
    assert!(note.contains("not found within budget") || note.contains("may still exist"));

    let classify = run_ok(&[
        "classify-utility",
        "(+ (* 0.1 p1) (* (max 0 p1) (max 0 p2)))",
        "--shape",
        "quasiconvex",
        "--trials",
        "20000",
    ]);
    assert!(!classify["results"]["counterexample"].is_null());
    assert!(classify["results"]["note"].as_str().unwrap().contains("not a certificate"));
}

#[test]
fn reports_are_byte_stable() {
    let gym = fixture("gym.json");
    let mismatch = fixture("ser_esr_mismatch.json");
    for args in [
        vec!["psne", gym.as_str()],
        vec!["search-mixed", mismatch.as_str()],
        vec![
            "classify-utility",
            "(* p1 p2)",
            "--shape",
            "quasiconvex",
            "--trials",
            "5000",
        ],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.stdout, b.stdout, "unstable output for {args:?}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // 0: success.
    assert_eq!(run(&["psne", &fixture("prisoners_dilemma.json"), "--mode", "trusted"])
        .status
        .code(), Some(0));

    // 2: usage and parse errors.
    let bad_json = dir.path().join("bad.json");
    std::fs::write(&bad_json, "{not json").unwrap();
    assert_eq!(run(&["psne", bad_json.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(
        run(&["verify", &fixture("gym.json"), "--profile", "0.5,x;1,0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["classify-utility", "(bogus p1)", "--shape", "convex"]).status.code(),
        Some(2)
    );
    // Missing utilities in the game file is a usage error.
    assert_eq!(
        run(&["reduce", &fixture("prisoners_dilemma.json"), "--output",
              dir.path().join("out.json").to_str().unwrap()]).status.code(),
        Some(2)
    );

    // 3: structural validation errors.
    let short = dir.path().join("short.json");
    std::fs::write(
        &short,
        r#"{"players":2,"actions":[2,2],"objectives":1,"payoffs":[[[1],[2],[3]],[[1],[2],[3],[4]]]}"#,
    )
    .unwrap();
    assert_eq!(run(&["psne", short.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(
        run(&["verify", &fixture("gym.json"), "--profile", "0.5,0.6;1,0"]).status.code(),
        Some(3)
    );

    // 4: structurally unsupported inputs.
    let wide = dir.path().join("wide.json");
    let cells: Vec<Vec<i32>> = (0..10).map(|_| vec![0, 0]).collect();
    std::fs::write(
        &wide,
        serde_json::to_string(&serde_json::json!({
            "players": 2,
            "actions": [5, 2],
            "objectives": 2,
            "payoffs": [cells, cells],
            "utilities": ["p1", "p1"],
        }))
        .unwrap(),
    )
    .unwrap();
    assert_eq!(
        run(&["search-mixed", wide.to_str().unwrap(), "--assignment", "SER,SER"]).status.code(),
        Some(4)
    );
}
