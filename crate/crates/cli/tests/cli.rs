use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn konig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_konig"))
        .args(args)
        .current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data"))
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn unsolvable_span_reports_its_core() {
    let out = konig(&["solve", "span.diag.json"]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(r["solvable"], false);
    assert_eq!(r["unsat_core"], serde_json::json!(["inclA", "inclB"]));
}

#[test]
fn restricted_solve_drops_the_missing_arrow() {
    let out = konig(&["solve", "span.diag.json", "--arrows", "inclA"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["solution"]["A"], "a");
    assert_eq!(r["solution"]["D"], "x");
}

#[test]
fn enumeration_respects_the_cap() {
    let out = konig(&["solve", "chain3.diag.json", "--all"]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["count"], 1);
    let out = konig(&["solve", "span.diag.json", "--arrows", "inclA", "--all", "--cap", "1"]);
    assert_eq!(report(&out)["count"], 1);
}

#[test]
fn six_points_witness_the_pair_of_two_and_three() {
    let out = konig(&["witness", "lorders6.cat.json", "-A", "o2", "-B", "o3", "--colors", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["witness"], "o6");
    let out = konig(&["witness", "lorders5.cat.json", "-A", "o2", "-B", "o3", "--colors", "2"]);
    assert_eq!(code(&out), 1);
    assert_eq!(report(&out)["witness"], Value::Null);
}

#[test]
fn rejected_candidate_comes_with_a_coloring() {
    let out = konig(&["witness", "lorders3.cat.json", "-A", "o1", "-B", "o2", "-C", "o2"]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(r["certificate"]["o1->o2:0"], 0);
    assert_eq!(r["certificate"]["o1->o2:1"], 1);
}

#[test]
fn missing_composite_is_invalid_input() {
    let out = konig(&["validate", "broken.cat.json"]);
    assert_eq!(code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("broken.cat.json"), "{stderr}");
    assert!(stderr.contains("g∘f"), "{stderr}");
    let r = report(&out);
    assert_eq!(r["error"]["pointer"], "/compose");
}

#[test]
fn malformed_inputs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.display().to_string()
    };
    let cases = [
        write("syntax.json", "{ \"version\": 1,"),
        write("untagged.json", r#"{ "objects": ["a"] }"#),
        write("version.json", r#"{ "version": 7, "kind": "category", "objects": ["a"] }"#),
        write("extra.json", r#"{ "version": 1, "kind": "category", "objects": ["a"], "colour": 1 }"#),
        write(
            "carrier.json",
            r#"{ "version": 1, "kind": "diagram", "category": { "objects": ["a", "b"] }, "sets": { "a": ["x"] } }"#,
        ),
    ];
    for file in &cases {
        let out = konig(&["validate", file]);
        assert_eq!(code(&out), 2, "{file}");
        assert!(report(&out)["error"]["message"].is_string());
    }
    let r = report(&konig(&["validate", &cases[4]]));
    assert_eq!(r["error"]["pointer"], "/sets/b");
    // a diagram where a category is expected
    assert_eq!(code(&konig(&["confluent", "span.diag.json"])), 2);
    assert_eq!(code(&konig(&["witness", "lorders3.cat.json", "-A", "o9", "-B", "o1"])), 2);
    assert_eq!(code(&konig(&["confluent", "missing.cat.json"])), 2);
    assert_eq!(code(&konig(&["confluent"])), 2);
    assert_eq!(code(&konig(&["confluent", "span.cat.json", "-o", "x.json"])), 2);
}

#[test]
fn verdict_commands_use_exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["confluent", "span.cat.json"], 1),
        (&["confluent", "lorders3.cat.json"], 0),
        (&["ramsey", "lorders3.cat.json"], 1),
        (&["fibration", "doubled.fun.json"], 0),
        (&["section", "doubled.fun.json"], 0),
        (&["ep", "doubled.fun.json"], 1),
        (&["ep", "identity.fun.json"], 0),
        (&["amalgamation", "orders3.class.json", "--bound", "3"], 0),
        (&["amalgamation", "matchings3.class.json", "--bound", "3"], 1),
        (&["superpose", "orders3.class.json", "-C", "o2", "--map", "0,0,1"], 0),
        (&["superpose", "matchings3.class.json", "-C", "m2.1", "--map", "0,0,1"], 1),
        (&["superpose", "orders3.class.json", "-C", "o2", "--map", "0,0"], 2),
        (&["report", "span.cat.json"], 1),
        (&["report", "lorders3.cat.json", "--samples", "10"], 1),
    ];
    for (args, expected) in cases {
        assert_eq!(code(&konig(args)), *expected, "{args:?}");
    }
}

#[test]
fn expansion_homs_between_point_expansions() {
    let r = report(&konig(&["hom-expansion", "identity.fun.json", "doubled.fun.json", "--all"]));
    assert_eq!(r["count"], 2);
    let r = report(&konig(&["hom-expansion", "doubled.fun.json", "identity.fun.json", "--all"]));
    assert_eq!(r["count"], 1);
    let r = report(&konig(&["core", "doubled.fun.json"]));
    assert_eq!(r["fiber_sizes"]["*"], 1);
    assert_eq!(r["is_own_core"], false);
}

#[test]
fn edge_formula_and_superposed_order() {
    let r = report(&konig(&["formulas", "ordered_graphs2.class.json", "graphs2.class.json"]));
    assert_eq!(r["reducts_in_base"], true);
    assert_eq!(r["formulas"]["E"]["free"], 2);
    let r = report(&konig(&["superpose", "orders3.class.json", "-C", "o2", "--map", "0,0,1"]));
    assert_eq!(r["member"], "o3");
    assert_eq!(r["right_inverses"], 2);
}

#[test]
fn reports_are_deterministic() {
    let runs: &[&[&str]] = &[
        &["report", "lorders3.cat.json", "--samples", "30", "--seed", "5"],
        &["ramsey", "lorders3.cat.json", "--colors", "3"],
        &["blowup", "orders3.class.json", "sets2.class.json"],
        &["validate", "broken.cat.json"],
    ];
    for args in runs {
        let (a, b) = (konig(args), konig(args));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(code(&a), code(&b));
    }
    let one = konig(&["witness", "lorders5.cat.json", "-A", "o2", "-B", "o3"]);
    let four = konig(&["witness", "lorders5.cat.json", "-A", "o2", "-B", "o3", "--threads", "4"]);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn input_hash_tracks_every_file_read() {
    let a = report(&konig(&["solve", "span.diag.json"]));
    let b = report(&konig(&["validate", "span.diag.json"]));
    assert_eq!(a["input_hash"], b["input_hash"]);
    let c = report(&konig(&["validate", "span.cat.json"]));
    assert_ne!(a["input_hash"], c["input_hash"]);
    assert_eq!(a["input_hash"].as_str().unwrap().len(), 64);
    assert_eq!(a["tool_version"], env!("CARGO_PKG_VERSION"));
}

/// Runs a builder with `-o`, checks the file against the embedded
/// artifact, re-validates it, and rebuilds it byte for byte.
fn build(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let p = path.display().to_string();
    let mut with_output = args.to_vec();
    with_output.extend(["-o", &p]);
    let out = konig(&with_output);
    assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let first = std::fs::read(&path).unwrap();
    let embedded = report(&konig(args))["artifact"].clone();
    assert_eq!(serde_json::from_slice::<Value>(&first).unwrap(), embedded, "{args:?}");
    let out = konig(&["validate", &p]);
    assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(code(&konig(&with_output)), 0);
    assert_eq!(std::fs::read(&path).unwrap(), first, "{args:?}");
    path
}

#[test]
fn builders_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let s = |p: &Path| p.display().to_string();

    let prod = build(dir, "prod.json", &["product", "lorders3.cat.json", "span.cat.json"]);
    let r = report(&konig(&["validate", &s(&prod)]));
    assert_eq!(r["objects"], 9);
    assert_eq!(r["arrows"], 11 * 5);
    // products of exported files reproduce the product of the originals
    let again = build(dir, "prod2.json", &["product", &s(&prod), &s(&data("point.cat.json"))]);
    let r2 = report(&konig(&["validate", &s(&again)]));
    assert_eq!(r2["arrows"], 55);

    let bad = build(dir, "bad.json", &["bad-diagram", "lorders3.cat.json", "-A", "o2", "-B", "o3"]);
    let out = konig(&["solve", &s(&bad)]);
    assert_eq!(code(&out), 1);
    assert_eq!(out.stdout, konig(&["solve", &s(&bad)]).stdout);

    let confl = build(dir, "confl.json", &["confl-diagram", "span.cat.json", "-A", "A", "-B", "B"]);
    assert_eq!(code(&konig(&["solve", &s(&confl)])), 1);

    let sl = build(dir, "slice.json", &["slice", "lorders3.cat.json", "-A", "o2"]);
    assert_eq!(code(&konig(&["fibration", &s(&sl)])), 1);

    let el = build(dir, "elts.json", &["elts", "arrow.cv.json"]);
    assert_eq!(report(&konig(&["validate", &s(&el)]))["source_objects"], 3);

    let bl = build(dir, "blowup.json", &["blowup", "orders3.class.json", "sets2.class.json"]);
    // several fiber embeddings lift each base arrow
    assert_eq!(code(&konig(&["fibration", &s(&bl)])), 1);
    assert_eq!(report(&konig(&["blowup", "orders3.class.json", "sets2.class.json"]))["discrete_fibration"], false);

    let core = build(dir, "core.json", &["core", "doubled.fun.json"]);
    let r = report(&konig(&["core", &s(&core)]));
    assert_eq!(r["is_own_core"], true);
    let twice = build(dir, "core2.json", &["core", &s(&core)]);
    assert_eq!(std::fs::read(&core).unwrap(), std::fs::read(&twice).unwrap());
}
