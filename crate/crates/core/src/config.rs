use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Search and enumeration limits. Every exact algorithm in the crate stops
/// with an explicit error when it would exceed one of these.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Caps {
    /// Largest instance the CLI will load.
    pub max_tuples: usize,
    /// Satisfying assignments visited while enumerating witnesses.
    pub witness_assignments: usize,
    /// Repairs (or minimal change-sets) enumerated before giving up.
    pub repairs: usize,
    /// Branch-and-bound nodes for exact minimum hitting sets.
    pub hitting_set_nodes: u64,
    /// Largest contingency set tried by the generalized Resp score.
    pub max_contingency: usize,
    /// Total `(contingency, values)` candidates the Resp search may visit.
    pub contingency_candidates: u64,
    /// Largest feature count for brute-force Shapley sums.
    pub brute_force_features: usize,
    /// Largest product-space size enumerated for expectations.
    pub product_space: u64,
    /// Assignment budget for the exhaustive determinism check of one OR gate.
    pub determinism_budget: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_tuples: 5_000,
            witness_assignments: 1_000_000,
            repairs: 100_000,
            hitting_set_nodes: 10_000_000,
            max_contingency: 4,
            contingency_candidates: 1_000_000,
            brute_force_features: 20,
            product_space: 1 << 22,
            determinism_budget: 1 << 20,
        }
    }
}

impl Caps {
    pub fn validate(&self) -> Result<()> {
        let zero = [
            ("max_tuples", self.max_tuples as u64),
            ("witness_assignments", self.witness_assignments as u64),
            ("repairs", self.repairs as u64),
            ("hitting_set_nodes", self.hitting_set_nodes),
            ("contingency_candidates", self.contingency_candidates),
            ("brute_force_features", self.brute_force_features as u64),
            ("product_space", self.product_space),
            ("determinism_budget", self.determinism_budget),
        ]
        .into_iter()
        .find(|(_, v)| *v == 0);
        match zero {
            Some((name, _)) => Err(Error::Config(format!("cap `{name}` must be positive"))),
            None => Ok(()),
        }
    }
}
