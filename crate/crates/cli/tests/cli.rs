use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_attriscore"))
        .args(args)
        .current_dir(fixtures())
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Exit status and the error code from stderr; stdout must be empty.
fn fails(args: &[&str]) -> (i32, String) {
    let out = run(args);
    assert!(out.stdout.is_empty(), "partial output: {}", String::from_utf8_lossy(&out.stdout));
    let err: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    (out.status.code().unwrap(), err["error"]["code"].as_str().unwrap().to_string())
}

fn r(num: i64, den: i64) -> Value {
    let dec = attriscore::rational::to_decimal(&attriscore::rational::ratio(num, den));
    json!({"num": num, "den": den, "decimal": dec})
}

#[test]
fn inc_deg_and_resp_examples() {
    assert_eq!(ok(&["inc-deg", "--data", "ex3", "--dc", "ex3.dc"]), r(1, 4));
    assert_eq!(ok(&["resp", "--data", "ex1", "--query", "ex1.q", "--tuple", "S:b"]), r(1, 1));
    assert_eq!(ok(&["resp", "--data", "ex1", "--query", "ex1.q", "--tuple", "R:cd"]), r(0, 1));
}

#[test]
fn selftest_passes() {
    assert_eq!(ok(&["selftest"])["passed"], 8);
}

#[test]
fn repairs_kinds() {
    let s = ok(&["repairs", "--data", "hypergraph", "--dc", "hypergraph.dc"]);
    assert_eq!(s["kind"], "s");
    assert_eq!(s["repairs"].as_array().unwrap().len(), 4);
    let c = ok(&["repairs", "--data", "hypergraph", "--dc", "hypergraph.dc", "--kind", "c"]);
    assert_eq!(c["repairs"], json!([["A", "B", "D"], ["A", "D", "E"], ["C", "D", "E"]]));
    let approx = ok(&["inc-deg", "--data", "hypergraph", "--dc", "hypergraph.dc", "--approx"]);
    assert_eq!(approx["approximate"], true);
}

#[test]
fn attr_causes_focus_flag() {
    let all = ok(&["attr-causes", "--data", "attr", "--query", "attr.q"]);
    assert_eq!(all["change_sets"].as_array().unwrap().len(), 7);
    let y = ok(&["attr-causes", "--data", "attr", "--query", "attr.q", "--focus", "y"]);
    assert_eq!(y["change_sets"], json!([["t6[1]"], ["t1[2]", "t3[2]"]]));
}

#[test]
fn eval_each_query() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("two.q");
    fs::write(&q, "Q :- S(x), R(x,x)\nQ :- R(x,y), R(y,x), S(d)\n").unwrap();
    let v = ok(&["eval", "--data", "ex1", "--query", q.to_str().unwrap()]);
    assert_eq!(v["results"][0]["holds"], true);
    assert_eq!(v["results"][1]["holds"], false);
    // causes needs exactly one query
    assert_eq!(fails(&["causes", "--data", "ex1", "--query", q.to_str().unwrap()]), (1, "cli.query_count".into()));
}

#[test]
fn circuits() {
    assert_eq!(ok(&["model-count", "--circuit", "ddbc.json"])["count"], 7);
    assert_eq!(ok(&["model-count", "--circuit", "monotone2cnf.json", "--method", "brute"])["count"], 5);
    assert_eq!(
        fails(&["model-count", "--circuit", "monotone2cnf.json"]),
        (1, "circuit.decomposability_violation".into())
    );
    let v = ok(&["validate", "--circuit", "ddbc.json"]);
    assert_eq!(v["valid"], true);
    assert_eq!(v["or_gates"]["literals"], 2);
}

#[test]
fn compile_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let c = ok(&["compile-dt", "--tree", "btree.json"]);
    let path = dir.path().join("c.json");
    fs::write(&path, c.to_string()).unwrap();
    // x1 ? (x3 ? x2 : 1) : x2 has 5 models over three features
    assert_eq!(ok(&["model-count", "--circuit", path.to_str().unwrap()])["count"], 5);
    assert_eq!(fails(&["compile-dt", "--tree", "tree.json"]), (1, "circuit.not_binary".into()));
    let b = ok(&["compile-dt", "--tree", "tree.json", "--binarize"]);
    assert_eq!(b["exactly_one"][0]["feature"], "outlook");
}

#[test]
fn shap_methods_agree() {
    for dist in [None, Some("product.json")] {
        let mut base = vec!["shap", "--tree", "btree.json", "--entity", "x1=1,x2=0,x3=1"];
        if let Some(d) = dist {
            base.extend(["--dist", d]);
        }
        let fast = ok(&[base.clone(), vec!["--method", "ddbc"]].concat());
        let slow = ok(&[base, vec!["--method", "brute"]].concat());
        assert_eq!(fast["results"], slow["results"]);
    }
    let one = ok(&["shap", "--circuit", "ddbc.json", "--entities", "ddbc_entities.csv", "--entity", "2", "--feature", "x3"]);
    assert_eq!(one["results"][0]["scores"], json!([{"feature": "x3", "score": r(61, 192)}]));
}

#[test]
fn resp_ml_search_and_local() {
    let g = ok(&["resp-ml", "--tree", "tree.json", "--entity", "rain,0,0", "--feature", "windy"]);
    assert_eq!(g["results"][0]["score"], r(1, 2));
    let l = ok(&[
        "resp-ml", "--circuit", "ddbc.json", "--entity", "1,1,0,1", "--feature", "x4", "--contingency", "x3=1",
    ]);
    assert_eq!(l["results"][0]["contingency"], json!({"x3": "1"}));
    assert_eq!(l["results"][0]["score"], r(0, 1));
    assert_eq!(
        fails(&["resp-ml", "--tree", "tree.json", "--entity", "sunny,1,0", "--feature", "humid"]),
        (1, "mlscore.label_not_one".into())
    );
}

#[test]
fn check_eq8_on_tree_and_circuit() {
    let v = ok(&["check-eq8", "--tree", "btree.json", "--entity", "0,1,1"]);
    assert_eq!(v["results"][0]["count"], 5);
    assert_eq!(v["results"][0]["equal"], true);
    let m = ok(&["check-eq8", "--circuit", "monotone2cnf.json", "--entities", "monotone2cnf_entities.csv"]);
    assert_eq!(m["results"][0]["used_ddbc"], false);
    assert_eq!(m["results"][1]["rhs"], r(5, 1));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["shap", "--tree", "btree.json", "--circuit", "ddbc.json", "--entity", "1"]).status.code(), Some(2));
    assert_eq!(fails(&["shap", "--tree", "btree.json"]), (2, "cli.usage".into()));
    assert!(run(&["--help"]).status.success());
}

#[test]
fn domain_errors_exit_1() {
    assert_eq!(fails(&["inc-deg", "--data", "nowhere", "--dc", "ex3.dc"]), (1, "cli.io".into()));
    assert_eq!(fails(&["resp", "--data", "ex1", "--query", "ex1.q", "--tuple", "S:z"]), (1, "dbcause.unknown_tuple".into()));
    assert_eq!(fails(&["shap", "--tree", "btree.json", "--entity", "x1=7,x2=0,x3=0"]), (1, "mlscore.unknown_value".into()));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.q");
    fs::write(&bad, "Q :- S(x\n").unwrap();
    assert_eq!(fails(&["causes", "--data", "ex1", "--query", bad.to_str().unwrap()]), (1, "relcore.syntax".into()));
}

#[test]
fn config_caps_and_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"caps": {"max_tuples": 3}}"#).unwrap();
    let args = ["inc-deg", "--data", "ex3", "--dc", "ex3.dc", "--config", cfg.to_str().unwrap()];
    assert_eq!(fails(&args), (1, "cli.too_many_tuples".into()));
    fs::write(&cfg, r#"{"caps": {"max_tuples": 0}}"#).unwrap();
    assert_eq!(fails(&args), (1, "cli.config".into()));
    fs::write(&cfg, r#"{"colour": true}"#).unwrap();
    assert_eq!(fails(&args), (1, "cli.config".into()));
    fs::write(&cfg, r#"{"format": "table"}"#).unwrap();
    let out = run(&args);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1/4 (0.25)");
}

#[test]
fn csv_loading_rules() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("R.csv"), "A,B\na,NULL\nb,b\n").unwrap();
    fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let q = dir.path().join("q");
    fs::write(&q, "Q :- R(x,x)").unwrap();
    let v = ok(&["causes", "--data", dir.path().to_str().unwrap(), "--query", q.to_str().unwrap()]);
    assert_eq!(v["causes"][0]["tuple"], "R:2");
    let null = dir.path().join("n");
    fs::write(&null, "Q :- R(x,y)").unwrap();
    let v = ok(&["causes", "--data", dir.path().to_str().unwrap(), "--query", null.to_str().unwrap()]);
    assert_eq!(v["causes"].as_array().unwrap().len(), 2);
}

#[test]
fn output_is_deterministic() {
    let args = ["causes", "--data", "ex1", "--query", "ex1.q"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}
