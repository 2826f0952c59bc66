//! Boolean classifiers as circuits and decision trees.
//!
//! A [`Circuit`] is a DAG of AND/OR/NOT gates over declared Boolean features.
//! [`validate_ddbc`] certifies that it is deterministic (OR children are
//! pairwise jointly unsatisfiable) and decomposable (AND children share no
//! feature), which makes [`model_count`] and Shap computation polynomial.

mod ddbc;
mod json;
mod tree;

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

pub use ddbc::{brute_force_count, model_count, validate_ddbc, Ddbc, OrEvidence, OrEvidenceCount, ValidateOptions};
pub use json::{CircuitJson, GateJson, NodeJson, TreeJson};
pub use tree::{binarize_dt, compile_dt, BinarizedTree, DecisionTree, DtNode, ExactlyOne, TreeBuilder};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("gate `{gate}` is not decomposable: children share feature `{feature}`")]
    DecomposabilityViolation { gate: String, feature: String },
    #[error("gate `{gate}` is not deterministic: two children are both true under {assignment}")]
    DeterminismViolation { gate: String, assignment: String },
    #[error("determinism check for gate `{gate}` needs 2^{vars} assignments, over budget; pass the trust flag to skip it")]
    DeterminismCheckTooLarge { gate: String, vars: usize },
    #[error("no value for feature `{0}`")]
    MissingFeature(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("feature `{0}` declared twice")]
    DuplicateFeature(String),
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("duplicate gate id `{0}`")]
    DuplicateGate(String),
    #[error("circuit has a cycle through gate `{0}`")]
    Cycle(String),
    #[error("malformed gate `{gate}`: {msg}")]
    MalformedGate { gate: String, msg: String },
    #[error("feature `{feature}` repeats on a path through node `{node}`")]
    RepeatedFeature { node: String, feature: String },
    #[error("node `{node}` has no child for value `{value}` of `{feature}`")]
    PartialSplit { node: String, feature: String, value: String },
    #[error("feature `{0}` has an empty or unspecified domain")]
    EmptyDomain(String),
    #[error("feature `{0}` is not binary; binarize the tree first")]
    NotBinary(String),
    #[error("value `{value}` is not in the domain of `{feature}`")]
    UnknownValue { feature: String, value: String },
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("truth table of {0} features is over budget")]
    TooManyFeatures(usize),
}

impl CircuitError {
    pub fn kind(&self) -> &'static str {
        match self {
            CircuitError::DecomposabilityViolation { .. } => "decomposability_violation",
            CircuitError::DeterminismViolation { .. } => "determinism_violation",
            CircuitError::DeterminismCheckTooLarge { .. } => "determinism_check_too_large",
            CircuitError::MissingFeature(_) => "missing_feature",
            CircuitError::UnknownFeature(_) => "unknown_feature",
            CircuitError::DuplicateFeature(_) => "duplicate_feature",
            CircuitError::UnknownGate(_) => "unknown_gate",
            CircuitError::DuplicateGate(_) => "duplicate_gate",
            CircuitError::Cycle(_) => "cycle",
            CircuitError::MalformedGate { .. } => "malformed_gate",
            CircuitError::RepeatedFeature { .. } => "repeated_feature",
            CircuitError::PartialSplit { .. } => "partial_split",
            CircuitError::EmptyDomain(_) => "empty_domain",
            CircuitError::NotBinary(_) => "not_binary",
            CircuitError::UnknownValue { .. } => "unknown_value",
            CircuitError::MalformedTree(_) => "malformed_tree",
            CircuitError::TooManyFeatures(_) => "too_many_features",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    Var(usize),
    Const(bool),
    Not(usize),
    And(Vec<usize>),
    Or(Vec<usize>),
}

impl Gate {
    pub fn children(&self) -> &[usize] {
        match self {
            Gate::Var(_) | Gate::Const(_) => &[],
            Gate::Not(c) => std::slice::from_ref(c),
            Gate::And(cs) | Gate::Or(cs) => cs,
        }
    }
}

/// Gates in topological order (children first), one output gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    features: Vec<String>,
    gates: Vec<Gate>,
    labels: Vec<String>,
    output: usize,
    varsets: Vec<FixedBitSet>,
}

impl Circuit {
    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn feature_count(&self) -> usize {
        self.features.len()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f == name)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    /// External id of gate `g`.
    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn varset(&self, g: usize) -> &FixedBitSet {
        &self.varsets[g]
    }

    /// Label of every gate, bottom-up. `assignment` is indexed like
    /// [`Circuit::features`].
    pub fn evaluate_all(&self, assignment: &[bool]) -> Vec<bool> {
        let mut val = vec![false; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            val[i] = match g {
                Gate::Var(f) => assignment[*f],
                Gate::Const(b) => *b,
                Gate::Not(c) => !val[*c],
                Gate::And(cs) => cs.iter().all(|&c| val[c]),
                Gate::Or(cs) => cs.iter().any(|&c| val[c]),
            };
        }
        val
    }

    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        assert_eq!(assignment.len(), self.features.len(), "one value per feature");
        self.evaluate_all(assignment)[self.output]
    }

    /// Evaluation from named feature values; every declared feature must be present.
    pub fn evaluate_named(&self, values: &HashMap<String, bool>) -> Result<bool, CircuitError> {
        let assignment = self
            .features
            .iter()
            .map(|f| values.get(f).copied().ok_or_else(|| CircuitError::MissingFeature(f.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.evaluate(&assignment))
    }

    /// The same circuit with a NOT gate on top.
    pub fn negated(&self) -> Circuit {
        let mut b = CircuitBuilder::from_circuit(self);
        let out = b.not(self.output);
        b.build(out).expect("negation of a valid circuit is valid")
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(c: &Circuit, g: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let list = |cs: &[usize], op: &str, f: &mut fmt::Formatter<'_>| -> fmt::Result {
                write!(f, "{op}(")?;
                for (i, &ch) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    go(c, ch, f)?;
                }
                write!(f, ")")
            };
            match &c.gates[g] {
                Gate::Var(v) => write!(f, "{}", c.features[*v]),
                Gate::Const(b) => write!(f, "{}", u8::from(*b)),
                Gate::Not(ch) => {
                    write!(f, "NOT ")?;
                    go(c, *ch, f)
                }
                Gate::And(cs) => list(cs, "AND", f),
                Gate::Or(cs) => list(cs, "OR", f),
            }
        }
        go(self, self.output, f)
    }
}

/// Appends gates bottom-up; every child must already exist.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    features: Vec<String>,
    gates: Vec<Gate>,
    labels: Vec<String>,
    dedup: HashMap<Gate, usize>,
}

impl CircuitBuilder {
    pub fn new<S: Into<String>>(features: impl IntoIterator<Item = S>) -> Result<Self, CircuitError> {
        let features: Vec<String> = features.into_iter().map(Into::into).collect();
        for (i, f) in features.iter().enumerate() {
            if features[..i].contains(f) {
                return Err(CircuitError::DuplicateFeature(f.clone()));
            }
        }
        Ok(CircuitBuilder { features, gates: Vec::new(), labels: Vec::new(), dedup: HashMap::new() })
    }

    fn from_circuit(c: &Circuit) -> Self {
        CircuitBuilder {
            features: c.features.clone(),
            gates: c.gates.clone(),
            labels: c.labels.clone(),
            dedup: c.gates.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect(),
        }
    }

    /// Adds `gate` under `label`, without structural sharing.
    pub fn push_labeled(&mut self, gate: Gate, label: String) -> Result<usize, CircuitError> {
        let n = self.gates.len();
        if let Gate::Var(f) = gate {
            if f >= self.features.len() {
                return Err(CircuitError::UnknownFeature(format!("#{f}")));
            }
        }
        if let Some(&c) = gate.children().iter().find(|&&c| c >= n) {
            return Err(CircuitError::UnknownGate(c.to_string()));
        }
        self.gates.push(gate);
        self.labels.push(label);
        Ok(n)
    }

    fn push(&mut self, gate: Gate) -> usize {
        if let Some(&i) = self.dedup.get(&gate) {
            return i;
        }
        let n = self.gates.len();
        self.dedup.insert(gate.clone(), n);
        self.gates.push(gate);
        self.labels.push(n.to_string());
        n
    }

    pub fn var(&mut self, feature: &str) -> Result<usize, CircuitError> {
        let f = self
            .features
            .iter()
            .position(|x| x == feature)
            .ok_or_else(|| CircuitError::UnknownFeature(feature.to_string()))?;
        Ok(self.push(Gate::Var(f)))
    }

    pub fn constant(&mut self, value: bool) -> usize {
        self.push(Gate::Const(value))
    }

    pub fn not(&mut self, child: usize) -> usize {
        self.push(Gate::Not(child))
    }

    pub fn and(&mut self, children: Vec<usize>) -> usize {
        self.push(Gate::And(children))
    }

    pub fn or(&mut self, children: Vec<usize>) -> usize {
        self.push(Gate::Or(children))
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn build(self, output: usize) -> Result<Circuit, CircuitError> {
        if output >= self.gates.len() {
            return Err(CircuitError::UnknownGate(output.to_string()));
        }
        let n = self.features.len();
        let mut varsets: Vec<FixedBitSet> = Vec::with_capacity(self.gates.len());
        for (i, g) in self.gates.iter().enumerate() {
            if g.children().iter().any(|&c| c >= i) {
                return Err(CircuitError::Cycle(self.labels[i].clone()));
            }
            let mut vs = FixedBitSet::with_capacity(n);
            match g {
                Gate::Var(f) => vs.insert(*f),
                _ => {
                    for &c in g.children() {
                        vs.union_with(&varsets[c]);
                    }
                }
            }
            varsets.push(vs);
        }
        Ok(Circuit { features: self.features, gates: self.gates, labels: self.labels, output, varsets })
    }
}
