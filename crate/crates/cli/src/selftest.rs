//! Worked examples embedded in the binary and checked through the same
//! code paths as the subcommands.

use attriscore::mlscore::{Classifier, Distribution, Entity};
use attriscore::relcore::RelationalInstance;
use attriscore::Caps;
use serde_json::{json, Value};

use crate::commands::{self, Model};
use crate::{input, CliError, Method};

macro_rules! fixture {
    ($path:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/", $path))
    };
}

fn instance(files: &[(&str, &str)]) -> Result<RelationalInstance, CliError> {
    let owned: Vec<(String, String)> = files.iter().map(|(p, t)| (p.to_string(), t.to_string())).collect();
    input::instance_from_csv(&owned, &Caps::default())
}

fn ex1() -> Result<RelationalInstance, CliError> {
    instance(&[("R", fixture!("ex1/R.csv")), ("S", fixture!("ex1/S.csv"))])
}

fn ex3() -> Result<RelationalInstance, CliError> {
    instance(&[("P", fixture!("ex3/P.csv")), ("Q", fixture!("ex3/Q.csv")), ("R", fixture!("ex3/R.csv"))])
}

fn hypergraph() -> Result<RelationalInstance, CliError> {
    instance(&[
        ("A", fixture!("hypergraph/A.csv")),
        ("B", fixture!("hypergraph/B.csv")),
        ("C", fixture!("hypergraph/C.csv")),
        ("D", fixture!("hypergraph/D.csv")),
        ("E", fixture!("hypergraph/E.csv")),
    ])
}

fn attr() -> Result<RelationalInstance, CliError> {
    instance(&[("R", fixture!("attr/R.csv")), ("S", fixture!("attr/S.csv"))])
}

fn r(num: i64, den: i64) -> Value {
    json!({"num": num, "den": den})
}

fn expect(got: Value, want: Value) -> Result<Result<String, String>, CliError> {
    Ok(if got == want { Ok(got.to_string()) } else { Err(format!("got {got}, expected {want}")) })
}

type Check = fn(&Caps) -> Result<Result<String, String>, CliError>;

fn causes_ex1(caps: &Caps) -> Result<Result<String, String>, CliError> {
    let d = ex1()?;
    let q = input::single_query(fixture!("ex1.q"), d.schema())?;
    let v = commands::causes(&d, &q, caps)?;
    let got: Vec<Value> =
        v["causes"].as_array().into_iter().flatten().map(|c| json!([c["tuple"], c["responsibility"]])).collect();
    let want = vec![
        json!(["R:ab", r(1, 2)]),
        json!(["R:bb", r(1, 2)]),
        json!(["S:a", r(1, 2)]),
        json!(["S:b", r(1, 1)]),
    ];
    let non_cause = commands::resp(&d, &q, "R:cd", caps)?;
    expect(json!([got, non_cause]), json!([want, r(0, 1)]))
}

fn resp_ex1(caps: &Caps) -> Result<Result<String, String>, CliError> {
    let d = ex1()?;
    let q = input::single_query(fixture!("ex1.q"), d.schema())?;
    expect(commands::resp(&d, &q, "S:b", caps)?, r(1, 1))
}

fn repairs_ex3(caps: &Caps) -> Result<Result<String, String>, CliError> {
    let d = ex3()?;
    let dcs = input::constraints(fixture!("ex3.dc"), d.schema())?;
    let s = commands::repairs(&d, &dcs, false, caps)?;
    let c = commands::repairs(&d, &dcs, true, caps)?;
    let deg = commands::inc_deg(&d, &dcs, false, caps)?;
    expect(
        json!([s["repairs"], c["repairs"], deg]),
        json!([[["P:1", "P:2"], ["P:2", "Q:1", "R:1"]], [["P:2", "Q:1", "R:1"]], r(1, 4)]),
    )
}

/// Maximal independent sets of the hyperedges {B,E}, {B,C,D}, {A,C}.
fn repairs_hypergraph(caps: &Caps) -> Result<Result<String, String>, CliError> {
    let d = hypergraph()?;
    let dcs = input::constraints(fixture!("hypergraph.dc"), d.schema())?;
    let s = commands::repairs(&d, &dcs, false, caps)?;
    let c = commands::repairs(&d, &dcs, true, caps)?;
    let deg = commands::inc_deg(&d, &dcs, false, caps)?;
    expect(
        json!([s["repairs"], c["repairs"], deg]),
        json!([
            [["A", "B", "D"], ["A", "D", "E"], ["B", "C"], ["C", "D", "E"]],
            [["A", "B", "D"], ["A", "D", "E"], ["C", "D", "E"]],
            r(2, 5)
        ]),
    )
}

fn attr_causes_focus(caps: &Caps) -> Result<Result<String, String>, CliError> {
    let d = attr()?;
    let q = input::single_query(fixture!("attr.q"), d.schema())?;
    let v = commands::attr_causes(&d, &q, Some(vec!["y".into()]), caps)?;
    let resp: Vec<Value> =
        v["causes"].as_array().into_iter().flatten().map(|c| json!([c["position"], c["responsibility"]])).collect();
    expect(
        json!([v["change_sets"], resp]),
        json!([[["t6[1]"], ["t1[2]", "t3[2]"]], [["t1[2]", r(1, 2)], ["t3[2]", r(1, 2)], ["t6[1]", r(1, 1)]]]),
    )
}

fn monotone_2cnf(caps: &Caps) -> Result<Result<String, String>, CliError> {
    let c = input::circuit_from_text(fixture!("monotone2cnf.json"), "monotone2cnf.json")?;
    let cl = Classifier::circuit(c.clone());
    let es = input::entities_from_csv(fixture!("monotone2cnf_entities.csv"), "entities", cl.space())?;
    let labels: Vec<bool> = es.iter().map(|e| cl.label(e)).collect();
    let n = commands::model_count(&c, Method::Brute, false, caps)?;
    let rejected = commands::validate(&c, false, caps).err().map(|e| e.code());
    expect(
        json!([labels, n["count"], rejected]),
        json!([[true, false], 5, "circuit.decomposability_violation"]),
    )
}

fn ddbc_counts(caps: &Caps) -> Result<Result<String, String>, CliError> {
    let c = input::circuit_from_text(fixture!("ddbc.json"), "ddbc.json")?;
    let fast = commands::model_count(&c, Method::Ddbc, false, caps)?;
    let slow = commands::model_count(&c, Method::Brute, false, caps)?;
    let cl = Classifier::circuit(c.clone());
    let es = input::entities_from_csv(fixture!("ddbc_entities.csv"), "entities", cl.space())?;
    let id = commands::check_eq8(&c, &cl, &es, caps)?;
    let all_equal = id["results"].as_array().is_some_and(|r| r.iter().all(|x| x["equal"] == true));
    expect(json!([fast["count"], all_equal]), json!([slow["count"], true]))
}

fn tree_shap(caps: &Caps) -> Result<Result<String, String>, CliError> {
    let t = input::tree_from_text(fixture!("btree.json"), "btree.json")?;
    let m = Model::from_tree(t);
    let space = m.classifier(Method::Ddbc)?.space().clone();
    let es: Vec<Entity> = space.entities().collect();
    let dist = input::distribution_from_text(fixture!("product.json"), "product.json", ".".as_ref(), &space)?;
    let mut outs = Vec::new();
    for dist in [Distribution::Uniform, dist] {
        let fast = commands::shap(&m, Method::Ddbc, &dist, &es, None, caps)?;
        let slow = commands::shap(&m, Method::Brute, &dist, &es, None, caps)?;
        outs.push(fast["results"] == slow["results"]);
    }
    expect(json!(outs), json!([true, true]))
}

const CHECKS: [(&str, Check); 8] = [
    ("tuple causes and responsibilities", causes_ex1),
    ("responsibility of a counterfactual cause", resp_ex1),
    ("repairs and inconsistency degree", repairs_ex3),
    ("repairs from a conflict hypergraph", repairs_hypergraph),
    ("attribute-level causes on join cells", attr_causes_focus),
    ("monotone 2CNF labels and count", monotone_2cnf),
    ("dDBC model count and count identity", ddbc_counts),
    ("tree Shap, dDBC against brute force", tree_shap),
];

pub fn run() -> Result<Value, CliError> {
    let caps = Caps::default();
    let mut checks = Vec::new();
    let mut failed = Vec::new();
    for (name, check) in CHECKS {
        let outcome = check(&caps).unwrap_or_else(|e| Err(format!("{}: {e}", e.code())));
        if let Err(why) = &outcome {
            failed.push(format!("{name}: {why}"));
        }
        checks.push(json!({"name": name, "pass": outcome.is_ok()}));
    }
    if !failed.is_empty() {
        return Err(CliError::Selftest { count: failed.len(), detail: failed.join("; ") });
    }
    Ok(json!({"passed": checks.len(), "checks": checks}))
}
