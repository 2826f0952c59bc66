//! One function per subcommand, over already loaded inputs.

use std::path::Path;

use attriscore::circuit::{self, Circuit, CircuitError, Ddbc, DecisionTree, ValidateOptions};
use attriscore::dbcause::{self, AttrOptions};
use attriscore::mlscore::{self, Classifier, Distribution, Entity, FeatureSpace};
use attriscore::relcore::{BooleanQuery, DenialConstraint, RelationalInstance, TupleId};
use attriscore::{repair, Caps};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::report::rational;
use crate::{input, CliError, Method};

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn count(n: &BigUint) -> Value {
    match n.to_u64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

// ------------------------------------------------------------------ relational

pub fn eval(d: &RelationalInstance, qs: &[BooleanQuery]) -> Value {
    let results: Vec<Value> = qs
        .iter()
        .map(|q| json!({"query": q.to_string(), "holds": attriscore::relcore::eval_bcq(d, q)}))
        .collect();
    json!({ "results": results })
}

pub fn causes(d: &RelationalInstance, q: &BooleanQuery, caps: &Caps) -> Result<Value, CliError> {
    let reports = dbcause::actual_causes(d, q, caps)?;
    let max = reports.iter().map(|r| &r.responsibility).max();
    let most: Vec<&TupleId> = reports.iter().filter(|r| Some(&r.responsibility) == max).map(|r| &r.tuple).collect();
    Ok(json!({"query": q.to_string(), "causes": to_value(&reports), "most_responsible": most}))
}

pub fn resp(d: &RelationalInstance, q: &BooleanQuery, tuple: &str, caps: &Caps) -> Result<Value, CliError> {
    let r = dbcause::responsibility(d, q, &TupleId::new(tuple), caps)?;
    Ok(rational(&r.responsibility))
}

pub fn attr_causes(
    d: &RelationalInstance,
    q: &BooleanQuery,
    focus: Option<Vec<String>>,
    caps: &Caps,
) -> Result<Value, CliError> {
    let opts = AttrOptions { focus: focus.map(|f| f.into_iter().collect()) };
    Ok(to_value(&dbcause::attr_level_causes(d, q, &opts, caps)?))
}

pub fn repairs(d: &RelationalInstance, dcs: &[DenialConstraint], cardinality: bool, caps: &Caps) -> Result<Value, CliError> {
    let r = if cardinality { repair::c_repairs(d, dcs, caps)? } else { repair::s_repairs(d, dcs, caps)? };
    Ok(to_value(&r))
}

pub fn inc_deg(d: &RelationalInstance, dcs: &[DenialConstraint], approx: bool, caps: &Caps) -> Result<Value, CliError> {
    if approx {
        Ok(to_value(&repair::greedy_inc_degree(d, dcs, caps)?))
    } else {
        Ok(rational(&repair::inc_degree(d, dcs, caps)?))
    }
}

// --------------------------------------------------------------------- circuits

pub fn compile_dt(t: &DecisionTree, binarize: bool) -> Result<Value, CliError> {
    if binarize {
        let b = circuit::binarize_dt(t)?;
        let d = circuit::compile_dt(&b.tree)?;
        Ok(json!({"circuit": to_value(&d.to_json()), "exactly_one": to_value(&b.exactly_one)}))
    } else {
        Ok(to_value(&circuit::compile_dt(t)?.to_json()))
    }
}

fn options(trust: bool, caps: &Caps) -> ValidateOptions {
    ValidateOptions { budget: caps.determinism_budget, trust_determinism: trust }
}

pub fn validate(c: &Circuit, trust: bool, caps: &Caps) -> Result<Value, CliError> {
    let d = circuit::validate_ddbc(c, &options(trust, caps))?;
    Ok(json!({
        "valid": true,
        "features": c.feature_count(),
        "gates": c.gates().len(),
        "or_gates": to_value(&d.evidence_summary()),
    }))
}

pub fn model_count(c: &Circuit, method: Method, trust: bool, caps: &Caps) -> Result<Value, CliError> {
    let n = match method {
        Method::Ddbc => circuit::model_count(&circuit::validate_ddbc(c, &options(trust, caps))?),
        Method::Brute => circuit::brute_force_count(c, caps.brute_force_features)?,
    };
    Ok(json!({"count": count(&n), "features": c.feature_count(), "method": method_name(method)}))
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Brute => "brute",
        Method::Ddbc => "ddbc",
    }
}

// ---------------------------------------------------------------- classifiers

pub enum Source {
    Tree(DecisionTree),
    Circuit(Circuit),
}

/// A loaded classifier together with its dDBC form, when it has one.
pub struct Model {
    pub source: Source,
    pub ddbc: Result<Ddbc, CircuitError>,
}

impl Model {
    pub fn load(tree: Option<&Path>, circuit: Option<&Path>, trust: bool, caps: &Caps) -> Result<Model, CliError> {
        match (tree, circuit) {
            (Some(p), None) => Ok(Model::from_tree(input::tree_from_text(&input::read(p)?, &p.display().to_string())?)),
            (None, Some(p)) => {
                let c = input::circuit_from_text(&input::read(p)?, &p.display().to_string())?;
                Ok(Model::from_circuit(c, trust, caps))
            }
            _ => Err(CliError::Usage("give exactly one of --tree and --circuit".into())),
        }
    }

    pub fn from_tree(t: DecisionTree) -> Model {
        let ddbc = circuit::compile_dt(&t);
        Model { source: Source::Tree(t), ddbc }
    }

    pub fn from_circuit(c: Circuit, trust: bool, caps: &Caps) -> Model {
        let ddbc = circuit::validate_ddbc(&c, &options(trust, caps));
        Model { source: Source::Circuit(c), ddbc }
    }

    /// The requested method, or dDBC when available and the distribution
    /// is not empirical.
    pub fn shap_method(&self, requested: Option<Method>, dist: Option<&str>) -> Result<Method, CliError> {
        if let Some(m) = requested {
            return Ok(m);
        }
        let empirical = dist
            .and_then(|t| serde_json::from_str::<Value>(t).ok())
            .is_some_and(|v| v["kind"] == "empirical");
        Ok(if self.ddbc.is_ok() && !empirical { Method::Ddbc } else { Method::Brute })
    }

    pub fn classifier(&self, method: Method) -> Result<Classifier, CliError> {
        Ok(match (method, &self.source) {
            (Method::Ddbc, _) => Classifier::circuit(self.ddbc.clone()?.into_circuit()),
            (Method::Brute, Source::Tree(t)) => Classifier::tree(t.clone()),
            (Method::Brute, Source::Circuit(c)) => Classifier::circuit(c.clone()),
        })
    }

    /// The circuit itself, or the compiled tree.
    pub fn boolean_circuit(&self) -> Result<Circuit, CliError> {
        match &self.source {
            Source::Circuit(c) => Ok(c.clone()),
            Source::Tree(_) => Ok(self.ddbc.clone()?.into_circuit()),
        }
    }
}

fn label(cl: &Classifier, e: &Entity) -> u8 {
    u8::from(cl.label(e))
}

fn scores(space: &FeatureSpace, features: &[usize], values: &[attriscore::Rational]) -> Value {
    Value::Array(
        features.iter().zip(values).map(|(&f, s)| json!({"feature": space.name(f), "score": rational(s)})).collect(),
    )
}

pub fn shap(
    m: &Model,
    method: Method,
    dist: &Distribution,
    es: &[Entity],
    feature: Option<&str>,
    caps: &Caps,
) -> Result<Value, CliError> {
    let cl = m.classifier(method)?;
    let space = cl.space();
    let only = feature.map(|f| space.index(f)).transpose()?;
    let features: Vec<usize> = match only {
        Some(f) => vec![f],
        None => (0..space.len()).collect(),
    };
    let mut results = Vec::with_capacity(es.len());
    for e in es {
        let values = match (method, only) {
            (Method::Ddbc, _) => {
                let all = mlscore::shap_ddbc(m.ddbc.as_ref().map_err(Clone::clone)?, dist, e)?;
                features.iter().map(|&f| all[f].clone()).collect()
            }
            (Method::Brute, Some(f)) => vec![mlscore::shap_bruteforce(&cl, dist, e, f, caps)?],
            (Method::Brute, None) => mlscore::shap_bruteforce_all(&cl, dist, e, caps)?,
        };
        let mut r = json!({
            "entity": e.display(space).to_string(),
            "label": label(&cl, e),
            "scores": scores(space, &features, &values),
        });
        if only.is_none() {
            r["sum"] = rational(&values.iter().sum());
        }
        results.push(r);
    }
    Ok(json!({"method": method_name(method), "distribution": dist.name(), "results": results}))
}

fn parse_contingency(spec: &str, space: &FeatureSpace) -> Result<Vec<(usize, usize)>, CliError> {
    spec.split(',')
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| CliError::Entity(format!("cannot read `{p}` as name=value")))?;
            let f = space.index(k.trim())?;
            Ok((f, space.value_index(f, v.trim())?))
        })
        .collect()
}

fn contingency_json(space: &FeatureSpace, gamma: &[(usize, usize)]) -> Value {
    Value::Object(gamma.iter().map(|&(f, v)| (space.name(f).to_string(), json!(space.domain(f)[v]))).collect())
}

pub fn resp_ml(
    cl: &Classifier,
    dist: &Distribution,
    es: &[Entity],
    feature: &str,
    contingency: Option<&str>,
    caps: &Caps,
) -> Result<Value, CliError> {
    let space = cl.space();
    let f = space.index(feature)?;
    let gamma = contingency.map(|c| parse_contingency(c, space)).transpose()?;
    let mut results = Vec::with_capacity(es.len());
    for e in es {
        let entity = e.display(space).to_string();
        results.push(match &gamma {
            Some(g) => {
                let s = mlscore::resp_local(cl, dist, e, f, g)?;
                json!({"entity": entity, "feature": feature, "contingency": contingency_json(space, g), "score": rational(&s)})
            }
            None => {
                let r = mlscore::resp_global(cl, dist, e, f, caps)?;
                json!({
                    "entity": entity,
                    "feature": feature,
                    "score": rational(&r.score),
                    "contingency": r.contingency.as_deref().map(|g| contingency_json(space, g)),
                    "searched_up_to": r.searched_up_to,
                    "exhausted": r.exhausted,
                })
            }
        });
    }
    Ok(json!({"distribution": dist.name(), "results": results}))
}

pub fn check_eq8(c: &Circuit, cl: &Classifier, es: &[Entity], caps: &Caps) -> Result<Value, CliError> {
    let space = cl.space();
    let all: Vec<usize> = (0..space.len()).collect();
    let mut results = Vec::with_capacity(es.len());
    for e in es {
        let id = mlscore::sat_count_identity(c, e, caps)?;
        if !id.equal {
            return Err(CliError::IdentityMismatch { count: id.lhs.to_string(), rhs: id.rhs.to_string() });
        }
        results.push(json!({
            "entity": e.display(space).to_string(),
            "label": label(cl, e),
            "count": count(&id.lhs),
            "rhs": rational(&id.rhs),
            "equal": id.equal,
            "used_ddbc": id.used_ddbc,
            "shap": scores(space, &all, &id.shap),
        }));
    }
    Ok(json!({ "results": results }))
}
