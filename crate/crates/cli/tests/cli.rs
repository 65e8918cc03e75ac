//! End-to-end tests of the binary: exit codes, piping, JSON reports and
//! witness replay.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn cutperc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cutperc"))
}

fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = cutperc()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn cutperc");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn catalog(name: &str, param: usize) -> String {
    let out = cutperc()
        .args(["catalog", name, &param.to_string()])
        .output()
        .unwrap();
    assert!(out.status.success());
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn catalog_pipes_into_percolate() {
    let doc = catalog("even_cycle", 3);
    let out = run_with_stdin(&["percolate"], &doc);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("cut-percolating: true"));
}

#[test]
fn path3_is_a_negative_decision() {
    let doc = catalog("path", 3);
    let out = run_with_stdin(&["percolate"], &doc);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_json_is_an_input_error() {
    let out = run_with_stdin(&["percolate"], "{ not json");
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn invalid_catalog_parameter_is_an_input_error() {
    let out = cutperc()
        .args(["catalog", "even_cycle", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn budget_exhaustion_is_reported() {
    // A rainbow 6-cycle: the reachability search needs more than two
    // visited states.
    let input = "u1 v1 a\nu2 v1 b\nu2 v2 c\nu3 v2 d\nu3 v3 e\nu1 v3 f\n";
    let out = run_with_stdin(&["reach", "--budget", "2"], input);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_report_has_the_envelope() {
    let doc = catalog("even_cycle", 2);
    let out = run_with_stdin(&["percolate", "--json"], &doc);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("valid report JSON");
    assert_eq!(value["format_version"], 1);
    assert_eq!(value["command"], "percolate");
    assert_eq!(value["verdict"], true);
    assert_eq!(value["exit_code"], 0);
    assert!(value["data"]["witness"]["steps"].is_array());
    assert!(value["data"]["folds"]["count"].as_u64().unwrap() > 0);
}

#[test]
fn witness_replay_round_trip() {
    let doc = catalog("even_cycle", 3);
    let out = run_with_stdin(&["percolate", "--json"], &doc);
    assert_eq!(out.status.code(), Some(0));
    let dir = std::env::temp_dir().join(format!("cutperc-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let report_path = dir.join("witness.json");
    std::fs::write(&report_path, &out.stdout).unwrap();

    let replay = run_with_stdin(
        &["percolate", "--replay", report_path.to_str().unwrap()],
        &doc,
    );
    assert_eq!(replay.status.code(), Some(0));

    // Tamper with the witness: the replay must reject it.
    let mut value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    value["data"]["witness"]["sets_idx"][0] = serde_json::json!([0, 1]);
    std::fs::write(&report_path, value.to_string()).unwrap();
    let replay = run_with_stdin(
        &["percolate", "--replay", report_path.to_str().unwrap()],
        &doc,
    );
    assert_eq!(replay.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn reach_witness_replay() {
    let doc = catalog("star", 2);
    let out = run_with_stdin(&["reach", "--json"], &doc);
    assert_eq!(out.status.code(), Some(0));
    let dir = std::env::temp_dir().join(format!("cutperc-reach-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let report_path = dir.join("reach.json");
    std::fs::write(&report_path, &out.stdout).unwrap();
    let replay = run_with_stdin(
        &["reach", "--replay", report_path.to_str().unwrap()],
        &doc,
    );
    assert_eq!(replay.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_theorem_exit_codes() {
    let doc = catalog("even_cycle", 2);
    let out = run_with_stdin(&["verify-theorem"], &doc);
    assert_eq!(out.status.code(), Some(0));

    let doc = catalog("path", 3);
    let out = run_with_stdin(&["verify-theorem"], &doc);
    // Consistent report with a false verdict: a negative decision.
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("consistent: true"));
}

#[test]
fn verify_theorem_scan_skip_on_the_cube() {
    let doc = catalog("hypercube", 3);
    let out = run_with_stdin(
        &["verify-theorem", "--skip-partition-scans", "--json"],
        &doc,
    );
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["data"]["consistent"], true);
    assert_eq!(value["data"]["transitivity"], true);
    let items = value["data"]["items"].as_array().unwrap();
    assert!(items.iter().any(|i| i["mode"] == "Skipped"));
}

#[test]
fn palette_too_small_is_an_input_error() {
    let doc = catalog("even_cycle", 2);
    let out = run_with_stdin(&["verify-theorem", "--palette", "2"], &doc);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_left_theorem_runs() {
    let doc = catalog("even_cycle", 2);
    let out = run_with_stdin(&["verify-left-theorem", "--json"], &doc);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["data"]["consistent"], true);
}

#[test]
fn stability_on_colored_edge_list() {
    // A two-colored 4-cycle with classes of size 2: not fold-stable.
    let input = "u1 v1 red\nu2 v1 red\nu2 v2 blue\nu1 v2 blue\n";
    let out = run_with_stdin(&["stability", "--json"], input);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["command"], "stability");
    // Folding collapses a color class, so plain stability fails.
    assert_eq!(value["verdict"], false);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn density_reports_exact_fractions() {
    let doc = catalog("star", 2);
    let out = run_with_stdin(&["density", "--json", "--random", "3"], &doc);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // t(K_{1,2}, W^{K_{1,2}}) = 4 homomorphisms / (1^1 · 2^2) = 1.
    assert_eq!(value["data"]["density_natural"], "1");
    assert!(value["data"]["folds"].as_array().unwrap().len() == 2);
}

#[test]
fn density_stages_certify() {
    let doc = catalog("star", 2);
    let out = run_with_stdin(&["density", "--json", "--random", "2", "--stages", "3"], &doc);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let stages = value["data"]["stages"]["stages"].as_array().unwrap();
    assert_eq!(stages.len(), 4);
    assert!(stages.iter().all(|s| s["certified"] == true));
    assert_eq!(stages.last().unwrap()["mass"], "1");
}

#[test]
fn export_dot_with_fold_annotation() {
    let doc = catalog("even_cycle", 2);
    let out = run_with_stdin(&["export-dot", "--fold", "0"], &doc);
    assert_eq!(out.status.code(), Some(0));
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("graph bigraph {"));
    assert!(dot.contains("peripheries=2"));

    let out = run_with_stdin(&["export-dot", "--fold", "99"], &doc);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn folds_lists_independent_subset() {
    let out = cutperc().args(["catalog", "complete", "2", "3"]).output().unwrap();
    assert!(out.status.success());
    let doc = String::from_utf8(out.stdout).unwrap();
    let all = run_with_stdin(&["folds", "--json"], &doc);
    let value: serde_json::Value = serde_json::from_slice(&all.stdout).unwrap();
    assert_eq!(value["data"]["count"], 8);
    let ind = run_with_stdin(&["folds", "--json", "--independent"], &doc);
    let value: serde_json::Value = serde_json::from_slice(&ind.stdout).unwrap();
    assert_eq!(value["data"]["count"], 2);
}

#[test]
fn density_emits_flag_table_for_labeled_documents() {
    let input = r#"{"format_version":1,"v1":["u1"],"v2":["v1","v2"],
        "edges":[["u1","v1"],["u1","v2"]],"theta":["u1"]}"#;
    let out = run_with_stdin(&["density", "--json", "--random", "1"], input);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let table = value["data"]["flag_table"].as_array().unwrap();
    // One labeled left vertex over a 1-point left space.
    assert_eq!(table.len(), 1);
    assert_eq!(table[0]["value"], "1");
}

#[test]
fn stability_covers_left_colorings() {
    let input = r#"{"format_version":1,
        "v1":["u1","u2"],"v2":["v1","v2"],
        "edges":[["u1","v1"],["u1","v2"],["u2","v1"],["u2","v2"]],
        "left_coloring":{"u1":"a","u2":"b"}}"#;
    let out = run_with_stdin(&["stability", "--json"], input);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // The rainbow left coloring over the monochromatic 4-cycle: the
    // product collapses under folding, so it is not stable; the verdict
    // field must be present and false.
    assert_eq!(value["data"]["left_symmetrically_fold_stable"], false);
}

#[test]
fn document_round_trip_through_catalog() {
    for (name, param) in [("even_cycle", 3), ("hypercube", 3), ("path", 4), ("star", 3)] {
        let doc = catalog(name, param);
        // Re-parse and re-emit through folds --json, which echoes the
        // normalized document.
        let out = run_with_stdin(&["folds", "--json"], &doc);
        let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        let original: serde_json::Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(value["data"]["document"]["v1"], original["v1"]);
        assert_eq!(value["data"]["document"]["v2"], original["v2"]);
        assert_eq!(value["data"]["document"]["edges"], original["edges"]);
    }
}
