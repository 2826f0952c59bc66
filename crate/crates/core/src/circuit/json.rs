//! On-disk JSON forms of circuits and decision trees.

use std::collections::HashMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Circuit, CircuitBuilder, CircuitError, DecisionTree, DtNode, Gate};

/// `{"features":[..], "gates":[..], "output":id}`. Gate ids may be numbers
/// or strings; gates may be listed in any order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitJson {
    pub features: Vec<String>,
    pub gates: Vec<GateJson>,
    pub output: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateJson {
    pub id: Value,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub children: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
}

/// `{"features":{name:[values]}, "nodes":[..], "root":id}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeJson {
    pub features: IndexMap<String, Vec<Value>>,
    pub nodes: Vec<NodeJson>,
    pub root: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeJson {
    pub id: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub children: Option<IndexMap<String, Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf: Option<Value>,
}

/// Numbers and strings both name things; `1` and `"1"` are the same id.
pub(crate) fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(if *b { "1" } else { "0" }.to_string()),
        _ => None,
    }
}

fn bit(v: &Value) -> Option<bool> {
    match scalar(v)?.as_str() {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    }
}

fn id_of(v: &Value, what: &str) -> Result<String, CircuitError> {
    scalar(v).ok_or_else(|| CircuitError::MalformedGate { gate: v.to_string(), msg: format!("{what} must be a string or number") })
}

/// Order of `ids` with every child before its parents; detects cycles.
fn topo_sort(ids: &[String], children: &[Vec<usize>]) -> Result<Vec<usize>, CircuitError> {
    let n = ids.len();
    // 0 unvisited, 1 on stack, 2 done
    let mut state = vec![0u8; n];
    let mut order = Vec::with_capacity(n);
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        state[start] = 1;
        while let Some(&mut (g, ref mut next)) = stack.last_mut() {
            if let Some(&c) = children[g].get(*next) {
                *next += 1;
                match state[c] {
                    0 => {
                        state[c] = 1;
                        stack.push((c, 0));
                    }
                    1 => return Err(CircuitError::Cycle(ids[c].clone())),
                    _ => {}
                }
            } else {
                state[g] = 2;
                order.push(g);
                stack.pop();
            }
        }
    }
    Ok(order)
}

impl Circuit {
    pub fn from_json(j: &CircuitJson) -> Result<Circuit, CircuitError> {
        let ids: Vec<String> = j.gates.iter().map(|g| id_of(&g.id, "gate id")).collect::<Result<_, _>>()?;
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id, i).is_some() {
                return Err(CircuitError::DuplicateGate(id.clone()));
            }
        }
        let lookup = |v: &Value| -> Result<usize, CircuitError> {
            let id = id_of(v, "child id")?;
            index.get(id.as_str()).copied().ok_or(CircuitError::UnknownGate(id))
        };
        let mut children = Vec::with_capacity(ids.len());
        for g in &j.gates {
            children.push(g.children.iter().flatten().map(lookup).collect::<Result<Vec<_>, _>>()?);
        }
        let order = topo_sort(&ids, &children)?;
        let mut b = CircuitBuilder::new(j.features.iter().cloned())?;
        let mut pos = vec![0usize; ids.len()];
        for &i in &order {
            let g = &j.gates[i];
            let bad = |msg: &str| CircuitError::MalformedGate { gate: ids[i].clone(), msg: msg.to_string() };
            let ch: Vec<usize> = children[i].iter().map(|&c| pos[c]).collect();
            let gate = match g.kind.to_ascii_lowercase().as_str() {
                "var" => {
                    let f = g.feature.as_deref().ok_or_else(|| bad("var gate needs `feature`"))?;
                    let f = b.features.iter().position(|x| x == f).ok_or_else(|| CircuitError::UnknownFeature(f.to_string()))?;
                    Gate::Var(f)
                }
                "const" => Gate::Const(g.value.as_ref().and_then(bit).ok_or_else(|| bad("const gate needs `value` 0 or 1"))?),
                "not" => match ch[..] {
                    [c] => Gate::Not(c),
                    _ => return Err(bad("not gate needs exactly one child")),
                },
                "and" => Gate::And(ch),
                "or" => Gate::Or(ch),
                k => return Err(bad(&format!("unknown kind `{k}`"))),
            };
            if !matches!(gate, Gate::And(_) | Gate::Or(_) | Gate::Not(_)) && !children[i].is_empty() {
                return Err(bad("input gates take no children"));
            }
            pos[i] = b.push_labeled(gate, ids[i].clone())?;
        }
        let out = lookup(&j.output)?;
        b.build(pos[out])
    }

    pub fn to_json(&self) -> CircuitJson {
        let id = |g: usize| Value::String(self.labels[g].clone());
        let gates = self
            .gates
            .iter()
            .enumerate()
            .map(|(g, gate)| {
                let (kind, feature, value) = match gate {
                    Gate::Var(f) => ("var", Some(self.features[*f].clone()), None),
                    Gate::Const(v) => ("const", None, Some(Value::from(u8::from(*v)))),
                    Gate::Not(_) => ("not", None, None),
                    Gate::And(_) => ("and", None, None),
                    Gate::Or(_) => ("or", None, None),
                };
                let children = match gate {
                    Gate::Var(_) | Gate::Const(_) => None,
                    _ => Some(gate.children().iter().map(|&c| id(c)).collect()),
                };
                GateJson { id: id(g), kind: kind.to_string(), children, feature, value }
            })
            .collect();
        CircuitJson { features: self.features.clone(), gates, output: id(self.output) }
    }
}

impl DecisionTree {
    pub fn from_json(j: &TreeJson) -> Result<DecisionTree, CircuitError> {
        let mut features = Vec::with_capacity(j.features.len());
        for (name, dom) in &j.features {
            let dom = dom
                .iter()
                .map(|v| scalar(v).ok_or_else(|| CircuitError::MalformedTree(format!("bad domain value {v} for `{name}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            features.push((name.clone(), dom));
        }
        let ids: Vec<String> = j
            .nodes
            .iter()
            .map(|n| scalar(&n.id).ok_or_else(|| CircuitError::MalformedTree(format!("bad node id {}", n.id))))
            .collect::<Result<_, _>>()?;
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id, i).is_some() {
                return Err(CircuitError::MalformedTree(format!("duplicate node id `{id}`")));
            }
        }
        let lookup = |v: &Value| -> Result<usize, CircuitError> {
            let id = scalar(v).unwrap_or_else(|| v.to_string());
            index.get(id.as_str()).copied().ok_or_else(|| CircuitError::MalformedTree(format!("unknown node `{id}`")))
        };
        let mut nodes = Vec::with_capacity(ids.len());
        for (i, n) in j.nodes.iter().enumerate() {
            let node = match (&n.feature, &n.children, &n.leaf) {
                (None, None, Some(v)) => DtNode::Leaf(
                    bit(v).ok_or_else(|| CircuitError::MalformedTree(format!("leaf `{}` must be 0 or 1", ids[i])))?,
                ),
                (Some(f), Some(ch), None) => {
                    let fi = features
                        .iter()
                        .position(|(g, _)| g == f)
                        .ok_or_else(|| CircuitError::UnknownFeature(f.clone()))?;
                    let dom = &features[fi].1;
                    if let Some(v) = ch.keys().find(|v| !dom.contains(v)) {
                        return Err(CircuitError::UnknownValue { feature: f.clone(), value: v.clone() });
                    }
                    let children = dom
                        .iter()
                        .map(|v| match ch.get(v) {
                            Some(c) => lookup(c),
                            None => Err(CircuitError::PartialSplit { node: ids[i].clone(), feature: f.clone(), value: v.clone() }),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    DtNode::Split { feature: fi, children }
                }
                _ => {
                    return Err(CircuitError::MalformedTree(format!(
                        "node `{}` must have either `leaf` or both `feature` and `children`",
                        ids[i]
                    )))
                }
            };
            nodes.push((ids[i].clone(), node));
        }
        let root = lookup(&j.root)?;
        DecisionTree::new(features, nodes, root)
    }

    pub fn to_json(&self) -> TreeJson {
        let features = self
            .features()
            .iter()
            .zip(self.domains())
            .map(|(f, d)| (f.clone(), d.iter().cloned().map(Value::String).collect()))
            .collect();
        let nodes = self
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let id = Value::String(self.label(i).to_string());
                match n {
                    DtNode::Leaf(b) => NodeJson { id, feature: None, children: None, leaf: Some(Value::from(u8::from(*b))) },
                    DtNode::Split { feature, children } => NodeJson {
                        id,
                        feature: Some(self.features()[*feature].clone()),
                        children: Some(
                            self.domain(*feature)
                                .iter()
                                .zip(children)
                                .map(|(v, &c)| (v.clone(), Value::String(self.label(c).to_string())))
                                .collect(),
                        ),
                        leaf: None,
                    },
                }
            })
            .collect();
        TreeJson { features, nodes, root: Value::String(self.label(self.root()).to_string()) }
    }
}
