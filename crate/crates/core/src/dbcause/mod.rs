//! Actual causes and responsibility for Boolean conjunctive query answers.
//!
//! A tuple `τ` is an actual cause for `D ⊨ Q` when some contingency set
//! `Γ ⊆ D ∖ {τ}` keeps the query true while `Γ ∪ {τ}` falsifies it. Its
//! responsibility is `1 / (1 + |Γ|)` for a smallest such `Γ`, and `0` when
//! no `Γ` exists.
//!
//! Everything is computed from the family of minimal witnesses: removing a
//! set of tuples falsifies `Q` iff it hits every minimal witness.

mod attr;

use serde::Serialize;
use thiserror::Error;

use crate::config::Caps;
use crate::rational::{int, ratio, Rational};
use crate::relcore::{eval_bcq, witness_family, BooleanQuery, RelError, RelationalInstance, TupleId};
use crate::repair::hitting::{self, SetSystem};
use crate::repair::RepairError;

pub use attr::{attr_level_causes, AttrCauseReport, AttrCauses, AttrOptions, Position};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CauseError {
    #[error(transparent)]
    Rel(#[from] RelError),
    #[error(transparent)]
    Repair(#[from] RepairError),
    #[error("the query is false in the instance: nothing to explain")]
    NothingToExplain,
}

impl CauseError {
    pub fn kind(&self) -> &'static str {
        match self {
            CauseError::Rel(e) => e.kind(),
            CauseError::Repair(e) => e.kind(),
            CauseError::NothingToExplain => "nothing_to_explain",
        }
    }
}

impl From<hitting::Abort> for CauseError {
    fn from(a: hitting::Abort) -> Self {
        CauseError::Repair(a.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CauseReport {
    pub tuple: TupleId,
    pub is_actual: bool,
    pub is_counterfactual: bool,
    #[serde(with = "crate::rational::serde_ratio")]
    pub responsibility: Rational,
    /// A minimum contingency set, lexicographically smallest among those of
    /// minimum size. Empty for counterfactual causes and for non-causes.
    pub contingency: Vec<TupleId>,
}

/// Minimal witnesses re-indexed so that vertex order is tuple-id order.
struct WitnessSystem {
    /// vertex -> tuple index
    tuples: Vec<usize>,
    /// tuple index -> vertex
    vertex: Vec<usize>,
    witnesses: Vec<Vec<usize>>,
}

impl WitnessSystem {
    fn build(instance: &RelationalInstance, query: &BooleanQuery, caps: &Caps) -> Result<Self, CauseError> {
        if !eval_bcq(instance, query) {
            return Err(CauseError::NothingToExplain);
        }
        let tuples = instance.sorted_by_id(0..instance.len());
        let mut vertex = vec![0; instance.len()];
        for (v, &t) in tuples.iter().enumerate() {
            vertex[t] = v;
        }
        let witnesses = witness_family(instance, query, caps.witness_assignments)?
            .into_iter()
            .map(|w| {
                let mut w: Vec<usize> = w.into_iter().map(|t| vertex[t]).collect();
                w.sort_unstable();
                w
            })
            .collect();
        Ok(WitnessSystem { tuples, vertex, witnesses })
    }

    fn ids(&self, instance: &RelationalInstance, vs: &[usize]) -> Vec<TupleId> {
        vs.iter().map(|&v| instance.id(self.tuples[v]).clone()).collect()
    }

    /// Smallest contingency set for vertex `tau`, if `tau` is an actual cause.
    ///
    /// A valid `Γ` must leave some minimal witness `W ∋ τ` intact and hit
    /// every minimal witness not containing `τ`; for each such `W` that is a
    /// minimum hitting set of `{W' ∖ W}` over vertices outside `W`.
    fn contingency(&self, tau: usize, node_cap: u64) -> Result<Option<Vec<usize>>, CauseError> {
        let (with, without): (Vec<&Vec<usize>>, Vec<&Vec<usize>>) =
            self.witnesses.iter().partition(|w| w.binary_search(&tau).is_ok());
        let mut best: Option<Vec<usize>> = None;
        for w in with {
            let edges = without
                .iter()
                .map(|o| o.iter().copied().filter(|v| w.binary_search(v).is_err()).collect::<Vec<_>>())
                .collect::<Vec<_>>();
            debug_assert!(edges.iter().all(|e| !e.is_empty()), "minimal witnesses are incomparable");
            let sys = SetSystem { n: self.tuples.len(), edges };
            let gamma = hitting::minimum(&sys, None, node_cap)?;
            let better = match &best {
                None => true,
                Some(b) => gamma.len() < b.len() || (gamma.len() == b.len() && gamma < *b),
            };
            if better {
                best = Some(gamma);
            }
        }
        Ok(best)
    }

    fn report(&self, instance: &RelationalInstance, tau: usize, caps: &Caps) -> Result<CauseReport, CauseError> {
        let tuple = instance.id(self.tuples[tau]).clone();
        Ok(match self.contingency(tau, caps.hitting_set_nodes)? {
            Some(gamma) => CauseReport {
                tuple,
                is_actual: true,
                is_counterfactual: gamma.is_empty(),
                responsibility: ratio(1, 1 + gamma.len() as i64),
                contingency: self.ids(instance, &gamma),
            },
            None => CauseReport {
                tuple,
                is_actual: false,
                is_counterfactual: false,
                responsibility: int(0),
                contingency: Vec::new(),
            },
        })
    }
}

/// Every actual cause with its responsibility, sorted by tuple id.
pub fn actual_causes(
    instance: &RelationalInstance,
    query: &BooleanQuery,
    caps: &Caps,
) -> Result<Vec<CauseReport>, CauseError> {
    let ws = WitnessSystem::build(instance, query, caps)?;
    let mut in_some = vec![false; ws.tuples.len()];
    for w in &ws.witnesses {
        for &v in w {
            in_some[v] = true;
        }
    }
    (0..ws.tuples.len())
        .filter(|&v| in_some[v])
        .map(|v| ws.report(instance, v, caps))
        .collect()
}

/// Responsibility report for one tuple; non-causes score 0.
pub fn responsibility(
    instance: &RelationalInstance,
    query: &BooleanQuery,
    tuple: &TupleId,
    caps: &Caps,
) -> Result<CauseReport, CauseError> {
    let t = instance.index_of(tuple)?;
    let ws = WitnessSystem::build(instance, query, caps)?;
    ws.report(instance, ws.vertex[t], caps)
}

/// The causes of maximum responsibility, sorted by tuple id.
pub fn most_responsible_causes(
    instance: &RelationalInstance,
    query: &BooleanQuery,
    caps: &Caps,
) -> Result<Vec<TupleId>, CauseError> {
    let causes = actual_causes(instance, query, caps)?;
    let Some(max) = causes.iter().map(|c| &c.responsibility).max().cloned() else {
        return Ok(Vec::new());
    };
    Ok(causes
        .into_iter()
        .filter(|c| c.responsibility == max)
        .map(|c| c.tuple)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relcore::{parse_query, InstanceBuilder};

    fn example1() -> (RelationalInstance, BooleanQuery) {
        let mut b = InstanceBuilder::new();
        b.fact_with_id("R(a,b)", "R", &["a", "b"])
            .fact_with_id("R(c,d)", "R", &["c", "d"])
            .fact_with_id("R(b,b)", "R", &["b", "b"])
            .fact_with_id("S(a)", "S", &["a"])
            .fact_with_id("S(c)", "S", &["c"])
            .fact_with_id("S(b)", "S", &["b"]);
        let d = b.build().unwrap();
        let q = parse_query("Q :- S(x), R(x,y), S(y)", d.schema()).unwrap();
        (d, q)
    }

    #[test]
    fn example1_causes() {
        let (d, q) = example1();
        let causes = actual_causes(&d, &q, &Caps::default()).unwrap();
        let got: Vec<(&str, Rational)> = causes
            .iter()
            .map(|c| (c.tuple.as_str(), c.responsibility.clone()))
            .collect();
        assert_eq!(
            got,
            vec![
                ("R(a,b)", ratio(1, 2)),
                ("R(b,b)", ratio(1, 2)),
                ("S(a)", ratio(1, 2)),
                ("S(b)", ratio(1, 1)),
            ]
        );
        let sb = causes.iter().find(|c| c.tuple.as_str() == "S(b)").unwrap();
        assert!(sb.is_counterfactual && sb.contingency.is_empty());
        let rab = causes.iter().find(|c| c.tuple.as_str() == "R(a,b)").unwrap();
        assert_eq!(rab.contingency, vec![TupleId::from("R(b,b)")]);
    }

    #[test]
    fn non_cause_scores_zero() {
        let (d, q) = example1();
        let r = responsibility(&d, &q, &"R(c,d)".into(), &Caps::default()).unwrap();
        assert!(!r.is_actual);
        assert_eq!(r.responsibility, int(0));
    }

    #[test]
    fn most_responsible() {
        let (d, q) = example1();
        assert_eq!(most_responsible_causes(&d, &q, &Caps::default()).unwrap(), vec![TupleId::from("S(b)")]);
    }

    #[test]
    fn symmetric_witnesses_tie() {
        let mut b = InstanceBuilder::new();
        b.fact("P", &["a"]).fact("P", &["b"]).fact("T", &["a"]).fact("T", &["b"]);
        let d = b.build().unwrap();
        let q = parse_query("Q :- P(x), T(x)", d.schema()).unwrap();
        let all = most_responsible_causes(&d, &q, &Caps::default()).unwrap();
        assert_eq!(all.len(), 4);
        for c in actual_causes(&d, &q, &Caps::default()).unwrap() {
            assert_eq!(c.responsibility, ratio(1, 2));
        }
    }

    #[test]
    fn single_witness_tuples_are_counterfactual() {
        let (d, _) = example1();
        let q = parse_query("Q :- S(x), R(x,d)", d.schema()).unwrap();
        let causes = actual_causes(&d, &q, &Caps::default()).unwrap();
        assert_eq!(causes.len(), 2);
        assert!(causes.iter().all(|c| c.is_counterfactual && c.responsibility == int(1)));
    }

    #[test]
    fn false_query_has_nothing_to_explain() {
        let (d, _) = example1();
        let q = parse_query("Q :- S(d)", d.schema()).unwrap();
        assert_eq!(actual_causes(&d, &q, &Caps::default()), Err(CauseError::NothingToExplain));
    }
}
