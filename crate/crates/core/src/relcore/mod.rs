//! Relational instances, conjunctive queries and denial constraints.
//!
//! Constants are uninterpreted strings. The distinguished [`Value::Null`]
//! never satisfies an equality: a NULL in a position bound to a constant or
//! to a variable that occurs more than once in the query blocks the match.
//! A NULL under a variable that occurs exactly once is harmless, as in SQL.

pub(crate) mod eval;
mod instance;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use eval::{eval_bcq, eval_bcq_masked, for_each_match, minimal_witnesses, witness_family, MatchVisit};
pub use instance::{InstanceBuilder, Predicate, RelationalInstance, Schema, Tuple, TupleId, Value};
pub use parse::{parse_constraint, parse_constraints, parse_queries, parse_query};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate `{pred}` has arity {expected}, used with {found} arguments")]
    ArityMismatch { pred: String, expected: usize, found: usize },
    #[error("query has no atoms")]
    EmptyQuery,
    #[error("duplicate tuple id `{0}`")]
    DuplicateTupleId(String),
    #[error("duplicate tuple {0}")]
    DuplicateTuple(String),
    #[error("unknown tuple id `{0}`")]
    UnknownTuple(String),
    #[error("invalid schema: {0}")]
    Schema(String),
    #[error("witness enumeration exceeded {0} satisfying assignments")]
    WitnessCapExceeded(usize),
}

impl RelError {
    pub fn kind(&self) -> &'static str {
        match self {
            RelError::Syntax { .. } => "syntax",
            RelError::UnknownPredicate(_) => "unknown_predicate",
            RelError::ArityMismatch { .. } => "arity_mismatch",
            RelError::EmptyQuery => "empty_query",
            RelError::DuplicateTupleId(_) => "duplicate_tuple_id",
            RelError::DuplicateTuple(_) => "duplicate_tuple",
            RelError::UnknownTuple(_) => "unknown_tuple",
            RelError::Schema(_) => "schema",
            RelError::WitnessCapExceeded(_) => "witness_cap_exceeded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) if is_bare_constant(c) => write!(f, "{c}"),
            Term::Const(c) => write!(f, "'{}'", c.replace('\'', "\\'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub pred: String,
    pub terms: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, terms: Vec<Term>) -> Self {
        Atom { pred: pred.into(), terms }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.pred)?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

/// `∃x̄ (P1(x̄1) ∧ … ∧ Pm(x̄m))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BooleanQuery {
    pub atoms: Vec<Atom>,
}

/// `¬∃x̄ (P1(x̄1) ∧ … ∧ Pm(x̄m))`: the join pattern it forbids is `atoms`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DenialConstraint {
    pub atoms: Vec<Atom>,
}

impl BooleanQuery {
    pub fn new(atoms: Vec<Atom>, schema: &Schema) -> Result<Self, RelError> {
        check_atoms(&atoms, schema)?;
        Ok(BooleanQuery { atoms })
    }

    pub fn variables(&self) -> BTreeSet<&str> {
        self.atoms
            .iter()
            .flat_map(|a| a.terms.iter())
            .filter_map(|t| match t {
                Term::Var(v) => Some(v.as_str()),
                Term::Const(_) => None,
            })
            .collect()
    }
}

impl DenialConstraint {
    pub fn new(atoms: Vec<Atom>, schema: &Schema) -> Result<Self, RelError> {
        check_atoms(&atoms, schema)?;
        Ok(DenialConstraint { atoms })
    }

    /// The query whose truth is exactly the violation of this constraint.
    pub fn violation_query(&self) -> BooleanQuery {
        BooleanQuery { atoms: self.atoms.clone() }
    }
}

/// The constraint `κ(Q)`: an instance violates it iff it satisfies `query`.
pub fn cq_to_dc(query: &BooleanQuery) -> DenialConstraint {
    DenialConstraint { atoms: query.atoms.clone() }
}

pub fn dc_to_cq(dc: &DenialConstraint) -> BooleanQuery {
    dc.violation_query()
}

fn check_atoms(atoms: &[Atom], schema: &Schema) -> Result<(), RelError> {
    if atoms.is_empty() {
        return Err(RelError::EmptyQuery);
    }
    for a in atoms {
        let p = schema
            .predicate(&a.pred)
            .ok_or_else(|| RelError::UnknownPredicate(a.pred.clone()))?;
        if p.arity != a.terms.len() {
            return Err(RelError::ArityMismatch {
                pred: a.pred.clone(),
                expected: p.arity,
                found: a.terms.len(),
            });
        }
    }
    Ok(())
}

fn write_body(f: &mut fmt::Formatter<'_>, atoms: &[Atom]) -> fmt::Result {
    for (i, a) in atoms.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

impl fmt::Display for BooleanQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q :- ")?;
        write_body(f, &self.atoms)
    }
}

impl fmt::Display for DenialConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, ":- ")?;
        write_body(f, &self.atoms)
    }
}

/// Bare identifiers whose first letter is one of `u`–`z`, followed only by
/// digits, `_` or `'`, are variables (`x`, `y1`, `z_2`). Anything else bare
/// is a constant. `?name` forces a variable, quotes force a constant.
pub(crate) fn is_variable_name(tok: &str) -> bool {
    let mut chars = tok.chars();
    match chars.next() {
        Some(c) if ('u'..='z').contains(&c) => chars.all(|c| c.is_ascii_digit() || c == '_' || c == '\''),
        _ => false,
    }
}

pub(crate) fn is_bare_constant(c: &str) -> bool {
    !c.is_empty()
        && !is_variable_name(c)
        && c != "NULL"
        && c.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '.' || ch == '-')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_convention() {
        for v in ["x", "y", "z1", "u_2", "w'"] {
            assert!(is_variable_name(v), "{v}");
        }
        for c in ["a", "b", "john", "x1a", "X", "70K", "t"] {
            assert!(!is_variable_name(c), "{c}");
        }
    }

    #[test]
    fn cq_dc_round_trip() {
        let schema = Schema::from_arities([("S", 1), ("R", 2)]).unwrap();
        let q = parse_query("Q :- S(x), R(x,y), S(y)", &schema).unwrap();
        let dc = cq_to_dc(&q);
        assert_eq!(dc.atoms, q.atoms);
        assert_eq!(dc.to_string(), ":- S(x), R(x,y), S(y)");
        assert_eq!(dc_to_cq(&dc), q);
    }

    #[test]
    fn single_atom_dc_forbids_every_tuple() {
        let schema = Schema::from_arities([("P", 1)]).unwrap();
        let dc = cq_to_dc(&parse_query("Q :- P(x)", &schema).unwrap());
        let mut b = InstanceBuilder::new();
        b.fact("P", &["a"]);
        let d = b.build().unwrap();
        assert!(eval_bcq(&d, &dc.violation_query()));
        let empty = InstanceBuilder::with_schema(schema.clone()).build().unwrap();
        assert!(!eval_bcq(&empty, &dc.violation_query()));
    }
}
