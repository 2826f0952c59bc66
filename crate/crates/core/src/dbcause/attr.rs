//! Attribute-level causes: cells whose replacement by NULL, possibly
//! together with other cells, falsifies the query.
//!
//! NULL never satisfies a join or a selection, so nulling a cell kills
//! exactly the satisfying assignments that use it under a constant or a
//! repeated variable. A set of cells falsifies the query iff it hits the
//! effective cells of every satisfying assignment; the minimal change-sets
//! are therefore the minimal hitting sets of that family.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::ops::ControlFlow;

use serde::{Serialize, Serializer};

use super::CauseError;
use crate::config::Caps;
use crate::rational::{ratio, Rational};
use crate::relcore::{eval_bcq, for_each_match, BooleanQuery, RelError, RelationalInstance, Term, TupleId};
use crate::repair::hitting::{self, SetSystem};

/// A cell `t[j]`; `attribute` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub tuple: TupleId,
    pub attribute: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.tuple, self.attribute)
    }
}

impl Serialize for Position {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Default)]
pub struct AttrOptions {
    /// Restrict candidate cells to those bound to these query variables.
    /// `None` takes every join and selection cell.
    pub focus: Option<BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttrCauseReport {
    pub position: Position,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attribute_name: Option<String>,
    #[serde(with = "crate::rational::serde_ratio")]
    pub responsibility: Rational,
    /// A smallest minimal change-set containing this cell.
    pub change_set: Vec<Position>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttrCauses {
    /// All subset-minimal change-sets, by size then lexicographically.
    pub change_sets: Vec<Vec<Position>>,
    /// One report per cell occurring in some minimal change-set.
    pub causes: Vec<AttrCauseReport>,
}

pub fn attr_level_causes(
    instance: &RelationalInstance,
    query: &BooleanQuery,
    options: &AttrOptions,
    caps: &Caps,
) -> Result<AttrCauses, CauseError> {
    if !eval_bcq(instance, query) {
        return Err(CauseError::NothingToExplain);
    }
    let effective = crate::relcore::eval::effective_positions(query);
    let candidate = |atom: usize, j: usize| match (&options.focus, &query.atoms[atom].terms[j]) {
        (None, _) => true,
        (Some(focus), Term::Var(v)) => focus.contains(v),
        (Some(_), Term::Const(_)) => false,
    };

    let mut families: HashSet<Vec<(usize, usize)>> = HashSet::new();
    let mut cells: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut visited = 0usize;
    let flow = for_each_match(instance, query, None, |images| {
        visited += 1;
        if visited > caps.witness_assignments {
            return ControlFlow::Break(());
        }
        let mut all = Vec::new();
        for (atom, &t) in images.iter().enumerate() {
            for &j in &effective[atom] {
                all.push((t, j));
                if candidate(atom, j) {
                    cells.insert((t, j));
                }
            }
        }
        all.sort_unstable();
        all.dedup();
        families.insert(all);
        ControlFlow::Continue(())
    });
    if flow.is_break() {
        return Err(RelError::WitnessCapExceeded(caps.witness_assignments).into());
    }

    // Number candidate cells in (tuple id, attribute) order.
    let mut order: Vec<(usize, usize)> = cells.into_iter().collect();
    order.sort_by(|a, b| instance.id(a.0).cmp(instance.id(b.0)).then(a.1.cmp(&b.1)));
    let index: BTreeMap<(usize, usize), usize> = order.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut edges: Vec<Vec<usize>> = families
        .into_iter()
        .map(|f| {
            let mut e: Vec<usize> = f.iter().filter_map(|c| index.get(c).copied()).collect();
            e.sort_unstable();
            e
        })
        .collect();
    edges.sort();
    edges.dedup();
    if edges.iter().any(Vec::is_empty) {
        // Some assignment uses no candidate cell: nothing restricted to the
        // candidates can falsify the query.
        return Ok(AttrCauses { change_sets: Vec::new(), causes: Vec::new() });
    }

    let sys = SetSystem { n: order.len(), edges };
    let mut sets = hitting::all_minimal(&sys, caps.repairs, caps.hitting_set_nodes)?;
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

    let position = |v: usize| {
        let (t, j) = order[v];
        Position { tuple: instance.id(t).clone(), attribute: j + 1 }
    };
    let mut causes = Vec::new();
    for (v, &(t, j)) in order.iter().enumerate() {
        // `sets` is sorted by size, so the first hit is a smallest one.
        if let Some(set) = sets.iter().find(|s| s.binary_search(&v).is_ok()) {
            let tuple = instance.tuple(t);
            let attribute_name = instance
                .schema()
                .predicate(&tuple.pred)
                .and_then(|p| p.attributes.as_ref())
                .map(|a| a[j].clone());
            causes.push(AttrCauseReport {
                position: position(v),
                attribute_name,
                responsibility: ratio(1, set.len() as i64),
                change_set: set.iter().map(|&u| position(u)).collect(),
            });
        }
    }
    Ok(AttrCauses {
        change_sets: sets.iter().map(|s| s.iter().map(|&u| position(u)).collect()).collect(),
        causes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relcore::{parse_query, InstanceBuilder};

    fn tids() -> RelationalInstance {
        let mut b = InstanceBuilder::new();
        b.fact_with_id("t1", "R", &["a", "b"])
            .fact_with_id("t2", "R", &["c", "d"])
            .fact_with_id("t3", "R", &["b", "b"])
            .fact_with_id("t4", "S", &["a"])
            .fact_with_id("t5", "S", &["c"])
            .fact_with_id("t6", "S", &["b"]);
        b.build().unwrap()
    }

    fn names(sets: &[Vec<Position>]) -> Vec<Vec<String>> {
        sets.iter().map(|s| s.iter().map(|p| p.to_string()).collect()).collect()
    }

    #[test]
    fn every_join_cell() {
        let d = tids();
        let q = parse_query("Q :- S(x), R(x,y), S(y)", d.schema()).unwrap();
        let r = attr_level_causes(&d, &q, &AttrOptions::default(), &Caps::default()).unwrap();
        assert_eq!(
            names(&r.change_sets),
            vec![
                vec!["t6[1]"],
                vec!["t1[1]", "t3[1]"],
                vec!["t1[1]", "t3[2]"],
                vec!["t1[2]", "t3[1]"],
                vec!["t1[2]", "t3[2]"],
                vec!["t3[1]", "t4[1]"],
                vec!["t3[2]", "t4[1]"],
            ]
        );
        let t6 = r.causes.iter().find(|c| c.position.to_string() == "t6[1]").unwrap();
        assert_eq!(t6.responsibility, ratio(1, 1));
        for p in ["t1[2]", "t3[2]"] {
            let c = r.causes.iter().find(|c| c.position.to_string() == p).unwrap();
            assert_eq!(c.responsibility, ratio(1, 2));
        }
    }

    #[test]
    fn focus_on_second_join_variable() {
        let d = tids();
        let q = parse_query("Q :- S(x), R(x,y), S(y)", d.schema()).unwrap();
        let opts = AttrOptions { focus: Some(["y".to_string()].into()) };
        let r = attr_level_causes(&d, &q, &opts, &Caps::default()).unwrap();
        assert_eq!(names(&r.change_sets), vec![vec!["t6[1]"], vec!["t1[2]", "t3[2]"]]);
        let got: Vec<(String, Rational)> =
            r.causes.iter().map(|c| (c.position.to_string(), c.responsibility.clone())).collect();
        assert_eq!(
            got,
            vec![("t1[2]".into(), ratio(1, 2)), ("t3[2]".into(), ratio(1, 2)), ("t6[1]".into(), ratio(1, 1))]
        );
    }

    #[test]
    fn ground_atom_cells_are_counterfactual() {
        let d = tids();
        let q = parse_query("Q :- R(a,b)", d.schema()).unwrap();
        let r = attr_level_causes(&d, &q, &AttrOptions::default(), &Caps::default()).unwrap();
        assert_eq!(names(&r.change_sets), vec![vec!["t1[1]"], vec!["t1[2]"]]);
        assert!(r.causes.iter().all(|c| c.responsibility == ratio(1, 1)));
    }

    #[test]
    fn free_variables_are_not_candidates() {
        let d = tids();
        let q = parse_query("Q :- R(x,d)", d.schema()).unwrap();
        let r = attr_level_causes(&d, &q, &AttrOptions::default(), &Caps::default()).unwrap();
        assert_eq!(names(&r.change_sets), vec![vec!["t2[2]"]]);
    }
}
