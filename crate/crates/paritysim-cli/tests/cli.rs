//! End-to-end checks of the compiled binary: output contracts, exit codes,
//! JSON round trips, and byte-level reproducibility.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paritysim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn tmp_file(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::write(&path, contents).expect("write temp file");
    path
}

#[test]
fn teleport_json_lists_four_perfect_branches() {
    let output = run(&["run", "teleport", "--branches", "all", "--json"]);
    assert_eq!(output.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&output)).expect("valid json");
    let branches = doc.as_array().expect("array");
    assert_eq!(branches.len(), 4);
    let mut seen = Vec::new();
    for branch in branches {
        assert_eq!(branch["probability"], serde_json::json!(0.25));
        assert_eq!(branch["corrected_fidelity"], serde_json::json!(1.0));
        seen.push((branch["outcomes"]["p1"].clone(), branch["outcomes"]["p2"].clone()));
    }
    seen.sort_by_key(|(a, b)| (a.to_string(), b.to_string()));
    seen.dedup();
    assert_eq!(seen.len(), 4, "all four outcome pairs appear");
}

#[test]
fn verify_identities_prints_six_pass_lines() {
    let output = run(&["verify-identities"]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout_of(&output);
    let passes = text.lines().filter(|line| line.contains("PASS")).count();
    assert_eq!(passes, 6);

    let json_output = run(&["verify-identities", "--json"]);
    assert_eq!(json_output.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&stdout_of(&json_output)).expect("valid json");
    let rows = doc.as_array().expect("array");
    assert_eq!(rows.len(), 6);
    for row in rows {
        assert_eq!(row["pass"], serde_json::json!(true));
        assert_eq!(row["trials"], serde_json::json!(50));
        assert!(row["max_deviation"].as_f64().expect("number") < 1e-9);
    }
}

#[test]
fn impossible_tolerance_fails_verification_with_exit_1() {
    let output = run(&["verify-identities", "--tolerance", "1e-30"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stdout_of(&output).contains("FAIL"));
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        vec!["run", "teleport", "--branches", "all", "--json"],
        vec!["run", "hybrid-ghz", "--n", "3", "--branches", "sample", "--seed", "11"],
        vec!["verify-identities", "--seed", "4", "--json"],
    ] {
        let first = run(&args);
        let second = run(&args);
        assert_eq!(first.stdout, second.stdout, "args {args:?}");
        assert_eq!(first.status.code(), second.status.code());
    }
}

#[test]
fn sampling_follows_the_seed() {
    let a = run(&["run", "teleport", "--branches", "sample", "--seed", "0"]);
    let b = run(&["run", "teleport", "--branches", "sample", "--seed", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    assert!(stdout_of(&a).contains("sampled 1 of 4 branches"));
    assert_ne!(
        stdout_of(&a).lines().nth(1),
        stdout_of(&b).lines().nth(1),
        "seeds 0 and 1 happen to pick different branches"
    );
}

#[test]
fn emitted_states_feed_back_through_input_state() {
    let output = run(&["run", "teleport", "--json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&output)).expect("valid json");
    let state = doc[2]["state"].to_string();

    let inline = run(&["run", "teleport", "--input-state", &state, "--json"]);
    assert_eq!(inline.status.code(), Some(0));
    let redone: serde_json::Value = serde_json::from_str(&stdout_of(&inline)).expect("valid json");
    assert_eq!(redone.as_array().expect("array").len(), 4);
    assert_eq!(redone[0]["corrected_fidelity"], serde_json::json!(1.0));

    let path = tmp_file("teleport_state.json", &state);
    let from_file = run(&["run", "teleport", "--input-state", path.to_str().expect("utf-8 path")]);
    assert_eq!(from_file.status.code(), Some(0));
}

#[test]
fn count_resources_matches_the_published_row() {
    let output = run(&["count-resources", "--n", "3"]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout_of(&output);
    assert!(text.contains("ancillae                      0            2"));
    assert!(text.contains("p_gates                       2            4"));
    assert!(text.contains("hadamards                     3           11"));
    assert!(text.contains("post_processing_ops           2            4"));

    let json_output = run(&["count-resources", "--n", "3", "--json"]);
    let doc: serde_json::Value =
        serde_json::from_str(&stdout_of(&json_output)).expect("valid json");
    assert_eq!(doc["n"], serde_json::json!(3));
    assert_eq!(doc["native"]["p_gates"], serde_json::json!(2));
    assert_eq!(doc["cnot_based"]["hadamards"], serde_json::json!(11));
}

#[test]
fn exec_runs_a_circuit_file() {
    let circuit = r#"{
        "register": [{"label": "q1"}, {"label": "q2"}],
        "steps": [
            {"op": "H", "q": "q1"},
            {"op": "H", "q": "q2"},
            {"op": "P", "q1": "q1", "q2": "q2", "out": "p"},
            {"op": "X", "q": "q2", "if": "p"}
        ]
    }"#;
    let path = tmp_file("bell_prep_circuit.json", circuit);
    let path = path.to_str().expect("utf-8 path");

    let output = run(&["exec", path, "--json"]);
    assert_eq!(output.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&output)).expect("valid json");
    let branches = doc.as_array().expect("array");
    assert_eq!(branches.len(), 2);
    for branch in branches {
        assert_eq!(branch["probability"], serde_json::json!(0.5));
        assert_eq!(branch["state"]["amplitudes"].as_array().expect("amps").len(), 4);
    }

    // A basis input on matching labels steers the circuit.
    let one_one = r#"{"register": [{"label": "q1"}, {"label": "q2"}],
                      "amplitudes": [[0,0],[0,0],[0,0],[1,0]]}"#;
    let steered = run(&["exec", path, "--input-state", one_one]);
    assert_eq!(steered.status.code(), Some(0));

    // Mismatched labels are a usage error.
    let wrong = r#"{"register": [{"label": "a"}, {"label": "b"}],
                    "amplitudes": [[1,0],[0,0],[0,0],[0,0]]}"#;
    let mismatch = run(&["exec", path, "--input-state", wrong]);
    assert_eq!(mismatch.status.code(), Some(2));
}

#[test]
fn graph_fusion_reports_the_fused_graph() {
    let path = tmp_file("path_graph.json", r#"{"n":4,"edges":[[0,1],[1,2],[2,3]]}"#);
    let output = run(&[
        "run",
        "fuse",
        "--graph",
        path.to_str().expect("utf-8 path"),
        "--q1",
        "0",
        "--q2",
        "3",
        "--branches",
        "all",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout_of(&output);
    assert!(text.contains(r#"fused graph: {"n":4,"edges":[[0,3],[1,2],[1,3],[2,3]]}"#));
    assert_eq!(text.lines().filter(|l| l.contains("stabilizer_deviation")).count(), 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["run", "fuse"]).status.code(), Some(2));
    assert_eq!(run(&["run", "bell", "--x", "2"]).status.code(), Some(2));
    assert_eq!(run(&["run", "ghz", "--n", "1"]).status.code(), Some(2));
    assert_eq!(run(&["exec", "/no/such/file.json"]).status.code(), Some(2));
}
