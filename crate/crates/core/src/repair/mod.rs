//! Subset and cardinality repairs under denial constraints, conflict
//! hypergraphs and the repair-based inconsistency degree.
//!
//! Tuples are the vertices of the conflict hypergraph and every minimal set
//! of tuples that jointly violates a constraint is a hyperedge. S-repairs are
//! the maximal independent sets, C-repairs the maximum ones; removing a
//! minimum hitting set yields a C-repair.

pub(crate) mod hitting;

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::config::Caps;
use crate::rational::Rational;
use crate::relcore::{witness_family, DenialConstraint, RelError, RelationalInstance, TupleId};
use hitting::{Abort, SetSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepairError {
    #[error(transparent)]
    Rel(#[from] RelError),
    #[error("exact search aborted after {0} branch-and-bound nodes")]
    SearchAborted(u64),
    #[error("more than {0} repairs")]
    TooManyRepairs(usize),
    #[error("inconsistency degree is undefined for an empty instance")]
    EmptyInstance,
    #[error("malformed hypergraph: {0}")]
    MalformedHypergraph(String),
    #[error("`{0}` is not a vertex of the hypergraph")]
    UnknownVertex(String),
}

impl RepairError {
    pub fn kind(&self) -> &'static str {
        match self {
            RepairError::Rel(e) => e.kind(),
            RepairError::SearchAborted(_) => "exact_search_aborted",
            RepairError::TooManyRepairs(_) => "repair_cap_exceeded",
            RepairError::EmptyInstance => "empty_instance",
            RepairError::MalformedHypergraph(_) => "malformed_hypergraph",
            RepairError::UnknownVertex(_) => "unknown_vertex",
        }
    }
}

impl From<Abort> for RepairError {
    fn from(a: Abort) -> Self {
        match a {
            Abort::Nodes(n) => RepairError::SearchAborted(n),
            Abort::Results(n) => RepairError::TooManyRepairs(n),
        }
    }
}

/// Vertices are kept sorted by tuple id; edges hold vertex positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictHypergraph {
    vertices: Vec<TupleId>,
    edges: Vec<Vec<usize>>,
}

impl ConflictHypergraph {
    pub fn from_edges(
        vertices: impl IntoIterator<Item = TupleId>,
        edges: impl IntoIterator<Item = BTreeSet<TupleId>>,
    ) -> Result<Self, RepairError> {
        let mut vertices: Vec<TupleId> = vertices.into_iter().collect();
        vertices.sort();
        vertices.dedup();
        let pos: HashMap<&TupleId, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut out = Vec::new();
        for e in edges {
            if e.is_empty() {
                return Err(RepairError::MalformedHypergraph("empty hyperedge".into()));
            }
            let idx = e
                .iter()
                .map(|t| pos.get(t).copied().ok_or_else(|| RepairError::UnknownVertex(t.0.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            out.push(idx);
        }
        Ok(Self::normalized(vertices, out))
    }

    fn normalized(vertices: Vec<TupleId>, mut edges: Vec<Vec<usize>>) -> Self {
        for e in &mut edges {
            e.sort_unstable();
            e.dedup();
        }
        edges.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        edges.dedup();
        ConflictHypergraph { vertices, edges }
    }

    pub fn vertices(&self) -> &[TupleId] {
        &self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Hyperedges as sorted tuple-id lists, ordered by size then id.
    pub fn edges(&self) -> Vec<Vec<TupleId>> {
        self.edges
            .iter()
            .map(|e| e.iter().map(|&i| self.vertices[i].clone()).collect())
            .collect()
    }

    fn system(&self) -> SetSystem {
        SetSystem { n: self.vertices.len(), edges: self.edges.clone() }
    }

    fn vertex(&self, id: &TupleId) -> Result<usize, RepairError> {
        self.vertices
            .binary_search(id)
            .map_err(|_| RepairError::UnknownVertex(id.0.clone()))
    }

    fn ids(&self, idx: &[usize]) -> Vec<TupleId> {
        idx.iter().map(|&i| self.vertices[i].clone()).collect()
    }
}

/// Hyperedges are the minimal violations of each constraint; vertices are
/// all tuples of the instance.
pub fn build_conflict_hypergraph(
    instance: &RelationalInstance,
    constraints: &[DenialConstraint],
    caps: &Caps,
) -> Result<ConflictHypergraph, RepairError> {
    let vertices: Vec<TupleId> = instance.ids_of(0..instance.len());
    let pos: HashMap<&TupleId, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut edges = Vec::new();
    for dc in constraints {
        for w in witness_family(instance, &dc.violation_query(), caps.witness_assignments)? {
            edges.push(w.iter().map(|&t| pos[instance.id(t)]).collect());
        }
    }
    Ok(ConflictHypergraph::normalized(vertices, edges))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RepairKind {
    S,
    C,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepairSet {
    pub kind: RepairKind,
    /// Each repair as a sorted id list; repairs sorted lexicographically.
    pub repairs: Vec<Vec<TupleId>>,
}

/// Maximal independent sets of the hypergraph, as kept-tuple lists.
pub fn hypergraph_s_repairs(h: &ConflictHypergraph, caps: &Caps) -> Result<Vec<Vec<TupleId>>, RepairError> {
    let minimal = hitting::all_minimal(&h.system(), caps.repairs, caps.hitting_set_nodes)?;
    let mut repairs: Vec<Vec<TupleId>> = minimal
        .iter()
        .map(|hs| {
            (0..h.vertices.len())
                .filter(|i| hs.binary_search(i).is_err())
                .map(|i| h.vertices[i].clone())
                .collect()
        })
        .collect();
    repairs.sort();
    Ok(repairs)
}

pub fn s_repairs(
    instance: &RelationalInstance,
    constraints: &[DenialConstraint],
    caps: &Caps,
) -> Result<RepairSet, RepairError> {
    let h = build_conflict_hypergraph(instance, constraints, caps)?;
    Ok(RepairSet { kind: RepairKind::S, repairs: hypergraph_s_repairs(&h, caps)? })
}

pub fn c_repairs(
    instance: &RelationalInstance,
    constraints: &[DenialConstraint],
    caps: &Caps,
) -> Result<RepairSet, RepairError> {
    let s = s_repairs(instance, constraints, caps)?;
    let max = s.repairs.iter().map(Vec::len).max().unwrap_or(0);
    Ok(RepairSet {
        kind: RepairKind::C,
        repairs: s.repairs.into_iter().filter(|r| r.len() == max).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HittingSet {
    pub size: usize,
    pub set: Vec<TupleId>,
}

/// Exact minimum hitting set, optionally required to contain `forced`.
/// Ties go to the lexicographically smallest sorted id list.
pub fn min_hitting_set(
    h: &ConflictHypergraph,
    forced: Option<&TupleId>,
    node_cap: u64,
) -> Result<HittingSet, RepairError> {
    let forced = forced.map(|f| h.vertex(f)).transpose()?;
    let set = hitting::minimum(&h.system(), forced, node_cap)?;
    Ok(HittingSet { size: set.len(), set: h.ids(&set) })
}

/// `(|D| - max C-repair size) / |D|`, computed as `|minimum hitting set| / |D|`.
pub fn inc_degree(
    instance: &RelationalInstance,
    constraints: &[DenialConstraint],
    caps: &Caps,
) -> Result<Rational, RepairError> {
    if instance.is_empty() {
        return Err(RepairError::EmptyInstance);
    }
    let h = build_conflict_hypergraph(instance, constraints, caps)?;
    let hs = min_hitting_set(&h, None, caps.hitting_set_nodes)?;
    Ok(Rational::new(BigInt::from(hs.size), BigInt::from(instance.len())))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApproxDegree {
    #[serde(with = "crate::rational::serde_ratio")]
    pub value: Rational,
    pub hitting_set: Vec<TupleId>,
    /// Always true: the value is an upper bound, not the exact degree.
    pub approximate: bool,
}

/// Upper bound on the inconsistency degree from a greedy hitting set.
pub fn greedy_inc_degree(
    instance: &RelationalInstance,
    constraints: &[DenialConstraint],
    caps: &Caps,
) -> Result<ApproxDegree, RepairError> {
    if instance.is_empty() {
        return Err(RepairError::EmptyInstance);
    }
    let h = build_conflict_hypergraph(instance, constraints, caps)?;
    let hs = hitting::greedy(&h.system(), None);
    Ok(ApproxDegree {
        value: Rational::new(BigInt::from(hs.len()), BigInt::from(instance.len())),
        hitting_set: h.ids(&hs),
        approximate: true,
    })
}
