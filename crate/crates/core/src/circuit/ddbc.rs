use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use super::{Circuit, CircuitError, Gate};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidateOptions {
    /// Largest truth table (2^k rows) tried for one pair of OR children.
    pub budget: u64,
    /// Accept OR gates whose exact check is over budget.
    pub trust_determinism: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { budget: 1 << 20, trust_determinism: false }
    }
}

/// How an OR gate was shown to be deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrEvidence {
    /// Every pair of children forces opposite values on some feature.
    Literals,
    /// Some pair needed a truth table; `rows` in total were checked.
    TruthTable { rows: u64 },
    /// Over budget and accepted on the caller's word.
    Trusted,
}

/// A circuit that passed [`validate_ddbc`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ddbc {
    circuit: Circuit,
    evidence: Vec<(usize, OrEvidence)>,
}

impl Ddbc {
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn into_circuit(self) -> Circuit {
        self.circuit
    }

    /// Per OR gate, in gate order.
    pub fn evidence(&self) -> &[(usize, OrEvidence)] {
        &self.evidence
    }
}

impl std::ops::Deref for Ddbc {
    type Target = Circuit;
    fn deref(&self) -> &Circuit {
        &self.circuit
    }
}

/// Literals true in every model, or `None` when there is no model.
type Implied = Option<BTreeMap<usize, bool>>;

fn meet(a: &Implied, b: &Implied) -> Implied {
    match (a, b) {
        (None, x) | (x, None) => x.clone(),
        (Some(a), Some(b)) => Some(a.iter().filter(|(f, v)| b.get(f) == Some(v)).map(|(f, v)| (*f, *v)).collect()),
    }
}

fn join(a: &Implied, b: &Implied) -> Implied {
    let (Some(a), Some(b)) = (a, b) else { return None };
    let mut out = a.clone();
    for (f, v) in b {
        if let Some(w) = out.insert(*f, *v) {
            if w != *v {
                return None;
            }
        }
    }
    Some(out)
}

/// Implied literals of every gate being true and of it being false.
fn implied_literals(c: &Circuit) -> (Vec<Implied>, Vec<Implied>) {
    let mut pos: Vec<Implied> = Vec::with_capacity(c.gates.len());
    let mut neg: Vec<Implied> = Vec::with_capacity(c.gates.len());
    for g in &c.gates {
        let (p, n) = match g {
            Gate::Var(f) => (Some([(*f, true)].into()), Some([(*f, false)].into())),
            Gate::Const(true) => (Some(BTreeMap::new()), None),
            Gate::Const(false) => (None, Some(BTreeMap::new())),
            Gate::Not(ch) => (neg[*ch].clone(), pos[*ch].clone()),
            Gate::And(cs) => (
                cs.iter().try_fold(BTreeMap::new(), |acc, &ch| join(&Some(acc), &pos[ch])),
                cs.iter().fold(None, |acc, &ch| meet(&acc, &neg[ch])),
            ),
            Gate::Or(cs) => (
                cs.iter().fold(None, |acc, &ch| meet(&acc, &pos[ch])),
                cs.iter().try_fold(BTreeMap::new(), |acc, &ch| join(&Some(acc), &neg[ch])),
            ),
        };
        pos.push(p);
        neg.push(n);
    }
    (pos, neg)
}

fn exclusive(a: &Implied, b: &Implied) -> bool {
    join(a, b).is_none()
}

/// Checks decomposability of every AND gate and determinism of every OR gate.
pub fn validate_ddbc(c: &Circuit, opts: &ValidateOptions) -> Result<Ddbc, CircuitError> {
    for (g, gate) in c.gates.iter().enumerate() {
        if let Gate::And(cs) = gate {
            let mut seen = FixedBitSet::with_capacity(c.feature_count());
            for &ch in cs {
                if let Some(f) = seen.intersection(&c.varsets[ch]).next() {
                    return Err(CircuitError::DecomposabilityViolation {
                        gate: c.labels[g].clone(),
                        feature: c.features[f].clone(),
                    });
                }
                seen.union_with(&c.varsets[ch]);
            }
        }
    }

    let (pos, _) = implied_literals(c);
    let mut evidence = Vec::new();
    for (g, gate) in c.gates.iter().enumerate() {
        let Gate::Or(cs) = gate else { continue };
        let mut rows = 0u64;
        let mut trusted = false;
        for i in 0..cs.len() {
            for j in i + 1..cs.len() {
                let (a, b) = (cs[i], cs[j]);
                if exclusive(&pos[a], &pos[b]) {
                    continue;
                }
                let mut vars = c.varsets[a].clone();
                vars.union_with(&c.varsets[b]);
                let vars: Vec<usize> = vars.ones().collect();
                if vars.len() >= 64 || (1u64 << vars.len()) > opts.budget {
                    if opts.trust_determinism {
                        trusted = true;
                        continue;
                    }
                    return Err(CircuitError::DeterminismCheckTooLarge { gate: c.labels[g].clone(), vars: vars.len() });
                }
                rows += 1 << vars.len();
                if let Some(w) = joint_model(c, a, b, &vars) {
                    let assignment = vars
                        .iter()
                        .zip(w)
                        .map(|(&f, v)| format!("{}={}", c.features[f], u8::from(v)))
                        .collect::<Vec<_>>()
                        .join(",");
                    return Err(CircuitError::DeterminismViolation { gate: c.labels[g].clone(), assignment });
                }
            }
        }
        let ev = if trusted {
            OrEvidence::Trusted
        } else if rows > 0 {
            OrEvidence::TruthTable { rows }
        } else {
            OrEvidence::Literals
        };
        evidence.push((g, ev));
    }
    Ok(Ddbc { circuit: c.clone(), evidence })
}

/// An assignment to `vars` making gates `a` and `b` both true.
fn joint_model(c: &Circuit, a: usize, b: usize, vars: &[usize]) -> Option<Vec<bool>> {
    let top = a.max(b);
    let mut x = vec![false; c.feature_count()];
    let mut val = vec![false; top + 1];
    for mask in 0u64..(1 << vars.len()) {
        for (i, &f) in vars.iter().enumerate() {
            x[f] = mask >> i & 1 == 1;
        }
        for (g, gate) in c.gates[..=top].iter().enumerate() {
            val[g] = match gate {
                Gate::Var(f) => x[*f],
                Gate::Const(v) => *v,
                Gate::Not(ch) => !val[*ch],
                Gate::And(cs) => cs.iter().all(|&ch| val[ch]),
                Gate::Or(cs) => cs.iter().any(|&ch| val[ch]),
            };
        }
        if val[a] && val[b] {
            return Some(vars.iter().map(|&f| x[f]).collect());
        }
    }
    None
}

/// Number of assignments to all declared features labelled 1.
pub fn model_count(d: &Ddbc) -> BigUint {
    let c = &d.circuit;
    let pow2 = |k: usize| BigUint::one() << k;
    let size = |g: usize| c.varsets[g].count_ones(..);
    let mut count: Vec<BigUint> = Vec::with_capacity(c.gates.len());
    for (g, gate) in c.gates.iter().enumerate() {
        let n = match gate {
            Gate::Var(_) => BigUint::one(),
            Gate::Const(v) => BigUint::from(u8::from(*v)),
            Gate::Not(ch) => pow2(size(*ch)) - &count[*ch],
            Gate::And(cs) => cs.iter().map(|&ch| &count[ch]).product(),
            Gate::Or(cs) => cs
                .iter()
                .map(|&ch| &count[ch] << (size(g) - size(ch)))
                .sum(),
        };
        count.push(n);
    }
    let out = c.output;
    &count[out] << (c.feature_count() - size(out))
}

/// Model count by enumerating the truth table; no structural assumptions.
pub fn brute_force_count(c: &Circuit, max_features: usize) -> Result<BigUint, CircuitError> {
    let n = c.feature_count();
    if n > max_features || n >= 64 {
        return Err(CircuitError::TooManyFeatures(n));
    }
    let mut x = vec![false; n];
    let mut total = 0u64;
    for mask in 0u64..(1 << n) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = mask >> i & 1 == 1;
        }
        total += u64::from(c.evaluate(&x));
    }
    Ok(BigUint::from(total))
}

/// OR gates by kind of evidence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OrEvidenceCount {
    pub literals: usize,
    pub truth_table: usize,
    pub trusted: usize,
}

impl Ddbc {
    pub fn evidence_summary(&self) -> OrEvidenceCount {
        let mut n = OrEvidenceCount::default();
        for (_, e) in &self.evidence {
            match e {
                OrEvidence::Literals => n.literals += 1,
                OrEvidence::TruthTable { .. } => n.truth_table += 1,
                OrEvidence::Trusted => n.trusted += 1,
            }
        }
        n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::circuit::tests::monotone_2cnf;
    use crate::circuit::CircuitBuilder;

    fn opts() -> ValidateOptions {
        ValidateOptions::default()
    }

    #[test]
    fn and_sharing_a_feature() {
        let mut b = CircuitBuilder::new(["x1"]).unwrap();
        let x = b.var("x1").unwrap();
        let g = b.and(vec![x, x]);
        let c = b.build(g).unwrap();
        assert_eq!(
            validate_ddbc(&c, &opts()).unwrap_err(),
            CircuitError::DecomposabilityViolation { gate: "1".into(), feature: "x1".into() }
        );
    }

    #[test]
    fn or_of_same_literal() {
        let mut b = CircuitBuilder::new(["x1"]).unwrap();
        let x = b.var("x1").unwrap();
        let g = b.or(vec![x, x]);
        let c = b.build(g).unwrap();
        assert_eq!(
            validate_ddbc(&c, &opts()).unwrap_err(),
            CircuitError::DeterminismViolation { gate: "1".into(), assignment: "x1=1".into() }
        );
    }

    #[test]
    fn monotone_2cnf_is_not_a_ddbc() {
        let c = monotone_2cnf();
        assert_eq!(
            validate_ddbc(&c, &opts()).unwrap_err(),
            CircuitError::DecomposabilityViolation { gate: "5".into(), feature: "x2".into() }
        );
        let mut b = CircuitBuilder::new(["x1", "x2"]).unwrap();
        let (x1, x2) = (b.var("x1").unwrap(), b.var("x2").unwrap());
        let clause = b.or(vec![x1, x2]);
        assert_eq!(
            validate_ddbc(&b.build(clause).unwrap(), &opts()).unwrap_err(),
            CircuitError::DeterminismViolation { gate: "2".into(), assignment: "x1=1,x2=1".into() }
        );
        assert_eq!(brute_force_count(&c, 20).unwrap(), BigUint::from(5u32));
    }

    /// `x1 ∧ (x2 ∨ x3)` written deterministically.
    fn guarded() -> Circuit {
        let mut b = CircuitBuilder::new(["x1", "x2", "x3", "x4"]).unwrap();
        let (x1, x2, x3) = (b.var("x1").unwrap(), b.var("x2").unwrap(), b.var("x3").unwrap());
        let n2 = b.not(x2);
        let right = b.and(vec![n2, x3]);
        let or = b.or(vec![x2, right]);
        let out = b.and(vec![x1, or]);
        b.build(out).unwrap()
    }

    #[test]
    fn counts_with_smoothing() {
        let c = guarded();
        let d = validate_ddbc(&c, &opts()).unwrap();
        assert_eq!(d.evidence(), &[(5, OrEvidence::Literals)]);
        // 3 of 8 over x1..x3, times 2 for the unused x4.
        assert_eq!(model_count(&d), BigUint::from(6u32));
        assert_eq!(brute_force_count(&c, 20).unwrap(), BigUint::from(6u32));
        let neg = validate_ddbc(&c.negated(), &opts()).unwrap();
        assert_eq!(model_count(&neg), BigUint::from(10u32));
    }

    #[test]
    fn negated_literal_certifies() {
        let mut b = CircuitBuilder::new(["x1", "x2"]).unwrap();
        let (x1, x2) = (b.var("x1").unwrap(), b.var("x2").unwrap());
        let both = b.and(vec![x1, x2]);
        let n1 = b.not(x1);
        let out = b.or(vec![both, n1]);
        let c = b.build(out).unwrap();
        let tight = ValidateOptions { budget: 1, trust_determinism: false };
        let d = validate_ddbc(&c, &tight).unwrap();
        assert_eq!(d.evidence_summary(), OrEvidenceCount { literals: 1, truth_table: 0, trusted: 0 });
        assert_eq!(model_count(&d), BigUint::from(3u32));
    }

    #[test]
    fn over_budget_needs_trust() {
        // Exclusive, but no forced literal shows it.
        let mut b = CircuitBuilder::new(["x1", "x2"]).unwrap();
        let (x1, x2) = (b.var("x1").unwrap(), b.var("x2").unwrap());
        let both = b.and(vec![x1, x2]);
        let nb = b.not(both);
        let out = b.or(vec![both, nb]);
        let c = b.build(out).unwrap();
        let d = validate_ddbc(&c, &opts()).unwrap();
        assert_eq!(d.evidence(), &[(4, OrEvidence::TruthTable { rows: 4 })]);
        assert_eq!(model_count(&d), BigUint::from(4u32));
        let tight = ValidateOptions { budget: 2, trust_determinism: false };
        assert_eq!(
            validate_ddbc(&c, &tight).unwrap_err(),
            CircuitError::DeterminismCheckTooLarge { gate: "4".into(), vars: 2 }
        );
        let trusted = ValidateOptions { budget: 2, trust_determinism: true };
        assert_eq!(validate_ddbc(&c, &trusted).unwrap().evidence(), &[(4, OrEvidence::Trusted)]);
    }

    #[test]
    fn constant_zero_counts_zero() {
        let mut b = CircuitBuilder::new(["x1", "x2", "x3"]).unwrap();
        let z = b.constant(false);
        let d = validate_ddbc(&b.build(z).unwrap(), &opts()).unwrap();
        assert!(model_count(&d).is_zero());
    }
}
