use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::RelError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Const(String),
    Null,
}

impl Value {
    /// The literal `NULL` denotes the null constant.
    pub fn parse(s: &str) -> Value {
        if s == "NULL" {
            Value::Null
        } else {
            Value::Const(s.to_string())
        }
    }

    pub fn as_const(&self) -> Option<&str> {
        match self {
            Value::Const(c) => Some(c),
            Value::Null => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Const(c) => write!(f, "{c}"),
            Value::Null => write!(f, "NULL"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TupleId(pub String);

impl TupleId {
    pub fn new(s: impl Into<String>) -> Self {
        TupleId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TupleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TupleId {
    fn from(s: &str) -> Self {
        TupleId(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
    pub attributes: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schema {
    preds: BTreeMap<String, Predicate>,
}

impl Schema {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_arities<'a>(arities: impl IntoIterator<Item = (&'a str, usize)>) -> Result<Self, RelError> {
        let mut s = Schema::new();
        for (name, arity) in arities {
            s.add(name, arity, None)?;
        }
        Ok(s)
    }

    pub fn add(&mut self, name: &str, arity: usize, attributes: Option<Vec<String>>) -> Result<(), RelError> {
        if arity == 0 {
            return Err(RelError::Schema(format!("predicate `{name}` has arity 0")));
        }
        if let Some(attrs) = &attributes {
            if attrs.len() != arity {
                return Err(RelError::Schema(format!(
                    "predicate `{name}` declares {} attribute names for arity {arity}",
                    attrs.len()
                )));
            }
        }
        if self.preds.contains_key(name) {
            return Err(RelError::Schema(format!("predicate `{name}` declared twice")));
        }
        self.preds.insert(
            name.to_string(),
            Predicate { name: name.to_string(), arity, attributes },
        );
        Ok(())
    }

    pub fn predicate(&self, name: &str) -> Option<&Predicate> {
        self.preds.get(name)
    }

    pub fn predicates(&self) -> impl Iterator<Item = &Predicate> {
        self.preds.values()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tuple {
    pub id: TupleId,
    pub pred: String,
    pub values: Vec<Value>,
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.pred)?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// A finite set of ground atoms with stable tuple ids.
///
/// Tuples are addressed internally by their index in insertion order; the
/// public id is what reports carry.
#[derive(Debug, Clone)]
pub struct RelationalInstance {
    schema: Schema,
    tuples: Vec<Tuple>,
    ids: HashMap<TupleId, usize>,
    by_pred: HashMap<String, Vec<usize>>,
}

impl RelationalInstance {
    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn tuple(&self, idx: usize) -> &Tuple {
        &self.tuples[idx]
    }

    pub fn index_of(&self, id: &TupleId) -> Result<usize, RelError> {
        self.ids
            .get(id)
            .copied()
            .ok_or_else(|| RelError::UnknownTuple(id.0.clone()))
    }

    pub fn id(&self, idx: usize) -> &TupleId {
        &self.tuples[idx].id
    }

    pub(crate) fn relation(&self, pred: &str) -> &[usize] {
        self.by_pred.get(pred).map(Vec::as_slice).unwrap_or(&[])
    }

    /// A copy with the given `(tuple index, 0-based position)` cells set to NULL.
    pub fn with_nulls(&self, cells: &[(usize, usize)]) -> RelationalInstance {
        let mut out = self.clone();
        for &(t, j) in cells {
            out.tuples[t].values[j] = Value::Null;
        }
        out
    }

    /// The sub-instance made of the tuples at `indices`; ids are preserved.
    pub fn restrict(&self, indices: &[usize]) -> RelationalInstance {
        let mut b = InstanceBuilder::with_schema(self.schema.clone());
        for &i in indices {
            let t = &self.tuples[i];
            b.push(Some(t.id.clone()), &t.pred, t.values.clone());
        }
        b.build().expect("sub-instance of a valid instance is valid")
    }

    /// Tuple indices sorted by tuple id.
    pub fn sorted_by_id(&self, indices: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_by(|a, b| self.tuples[*a].id.cmp(&self.tuples[*b].id));
        v
    }

    pub fn ids_of(&self, indices: impl IntoIterator<Item = usize>) -> Vec<TupleId> {
        let mut v: Vec<TupleId> = indices.into_iter().map(|i| self.tuples[i].id.clone()).collect();
        v.sort();
        v
    }
}

/// Collects facts and validates them into a [`RelationalInstance`].
///
/// Without an explicit schema, predicate arities are inferred from the first
/// fact seen for each predicate. Tuples without an explicit id get
/// `pred:n`, with `n` the 1-based position of the tuple within its relation.
#[derive(Debug, Default)]
pub struct InstanceBuilder {
    schema: Option<Schema>,
    rows: Vec<(Option<TupleId>, String, Vec<Value>)>,
}

impl InstanceBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_schema(schema: Schema) -> Self {
        InstanceBuilder { schema: Some(schema), rows: Vec::new() }
    }

    pub fn fact(&mut self, pred: &str, values: &[&str]) -> &mut Self {
        self.push(None, pred, values.iter().map(|v| Value::parse(v)).collect())
    }

    pub fn fact_with_id(&mut self, id: &str, pred: &str, values: &[&str]) -> &mut Self {
        self.push(
            Some(TupleId::new(id)),
            pred,
            values.iter().map(|v| Value::parse(v)).collect(),
        )
    }

    pub fn push(&mut self, id: Option<TupleId>, pred: &str, values: Vec<Value>) -> &mut Self {
        self.rows.push((id, pred.to_string(), values));
        self
    }

    pub fn build(&self) -> Result<RelationalInstance, RelError> {
        let schema = match &self.schema {
            Some(s) => s.clone(),
            None => {
                let mut s = Schema::new();
                for (_, pred, values) in &self.rows {
                    if s.predicate(pred).is_none() {
                        s.add(pred, values.len(), None)?;
                    }
                }
                s
            }
        };
        let mut tuples = Vec::with_capacity(self.rows.len());
        let mut ids = HashMap::new();
        let mut by_pred: HashMap<String, Vec<usize>> = HashMap::new();
        let mut seen: HashSet<(String, Vec<Value>)> = HashSet::new();
        for (id, pred, values) in &self.rows {
            let p = schema
                .predicate(pred)
                .ok_or_else(|| RelError::UnknownPredicate(pred.clone()))?;
            if p.arity != values.len() {
                return Err(RelError::ArityMismatch {
                    pred: pred.clone(),
                    expected: p.arity,
                    found: values.len(),
                });
            }
            let rel = by_pred.entry(pred.clone()).or_default();
            let id = id
                .clone()
                .unwrap_or_else(|| TupleId(format!("{pred}:{}", rel.len() + 1)));
            let idx = tuples.len();
            if ids.insert(id.clone(), idx).is_some() {
                return Err(RelError::DuplicateTupleId(id.0));
            }
            let t = Tuple { id, pred: pred.clone(), values: values.clone() };
            if !values.contains(&Value::Null) && !seen.insert((pred.clone(), values.clone())) {
                return Err(RelError::DuplicateTuple(t.to_string()));
            }
            rel.push(idx);
            tuples.push(t);
        }
        Ok(RelationalInstance { schema, tuples, ids, by_pred })
    }
}
