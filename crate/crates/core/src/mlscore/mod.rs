//! Scores for individual classifier decisions: the Shap score and the
//! generalized responsibility score.
//!
//! An entity `e` is explained with respect to a distribution over the
//! feature space. The game `G_e(S)` is the expected label of a random
//! entity that agrees with `e` on the features in `S`.

mod ddbc;
mod resp;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::circuit::{
    brute_force_count, model_count, validate_ddbc, Circuit, CircuitError, DecisionTree, ValidateOptions,
};
use crate::config::Caps;
use crate::rational::{int, shapley_weight, Rational};

pub use ddbc::shap_ddbc;
pub use resp::{resp_global, resp_local, Contingency, RespGlobal};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScoreError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("feature `{0}` declared twice")]
    DuplicateFeature(String),
    #[error("feature `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("value `{value}` is not in the domain of `{feature}`")]
    UnknownValue { feature: String, value: String },
    #[error("entity has {found} values, the feature space has {expected} features")]
    EntityArity { expected: usize, found: usize },
    #[error("no value given for feature `{0}`")]
    MissingValue(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("conditioning on {{{}}} has probability zero", .subset.join(", "))]
    ZeroProbability { subset: Vec<String> },
    #[error("{found} features exceed the brute-force cap of {cap}")]
    TooManyFeatures { found: usize, cap: usize },
    #[error("feature space of size {size} exceeds the enumeration cap of {cap}")]
    SpaceTooLarge { size: String, cap: u64 },
    #[error("{0} is not supported for this computation")]
    UnsupportedDistribution(&'static str),
    #[error("feature `{0}` is not Boolean")]
    NotBoolean(String),
    #[error("the entity's label is 0; responsibility explains label 1")]
    LabelNotOne,
    #[error("feature `{0}` appears in its own contingency set")]
    FeatureInContingency(String),
    #[error("feature `{0}` appears twice in the contingency set")]
    RepeatedContingencyFeature(String),
    #[error("contingency value for `{0}` equals the entity's value")]
    ValueNotChanged(String),
    #[error("the contingency alone changes the label")]
    ContingencyFlipsLabel,
    #[error("contingency search exceeded {cap} candidates; best score so far {best_so_far}")]
    SearchCapExceeded { cap: u64, best_so_far: Rational },
}

impl ScoreError {
    pub fn kind(&self) -> &'static str {
        match self {
            ScoreError::Circuit(e) => e.kind(),
            ScoreError::UnknownFeature(_) => "unknown_feature",
            ScoreError::DuplicateFeature(_) => "duplicate_feature",
            ScoreError::EmptyDomain(_) => "empty_domain",
            ScoreError::UnknownValue { .. } => "unknown_value",
            ScoreError::EntityArity { .. } => "entity_arity",
            ScoreError::MissingValue(_) => "missing_value",
            ScoreError::InvalidDistribution(_) => "invalid_distribution",
            ScoreError::ZeroProbability { .. } => "zero_probability",
            ScoreError::TooManyFeatures { .. } => "too_many_features",
            ScoreError::SpaceTooLarge { .. } => "space_too_large",
            ScoreError::UnsupportedDistribution(_) => "unsupported_distribution",
            ScoreError::NotBoolean(_) => "not_boolean",
            ScoreError::LabelNotOne => "label_not_one",
            ScoreError::FeatureInContingency(_) => "feature_in_contingency",
            ScoreError::RepeatedContingencyFeature(_) => "repeated_contingency_feature",
            ScoreError::ValueNotChanged(_) => "value_not_changed",
            ScoreError::ContingencyFlipsLabel => "contingency_flips_label",
            ScoreError::SearchCapExceeded { .. } => "search_cap_exceeded",
        }
    }
}

/// Named features with finite domains. Values are referred to by their
/// index in the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSpace {
    names: Vec<String>,
    domains: Vec<Vec<String>>,
}

impl FeatureSpace {
    pub fn new(features: Vec<(String, Vec<String>)>) -> Result<Self, ScoreError> {
        for (i, (f, dom)) in features.iter().enumerate() {
            if features[..i].iter().any(|(g, _)| g == f) {
                return Err(ScoreError::DuplicateFeature(f.clone()));
            }
            if dom.is_empty() {
                return Err(ScoreError::EmptyDomain(f.clone()));
            }
        }
        let (names, domains) = features.into_iter().unzip();
        Ok(FeatureSpace { names, domains })
    }

    /// Features with domain `["0", "1"]`.
    pub fn boolean<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, ScoreError> {
        Self::new(names.into_iter().map(|n| (n.into(), vec!["0".to_string(), "1".to_string()])).collect())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, f: usize) -> &str {
        &self.names[f]
    }

    pub fn domain(&self, f: usize) -> &[String] {
        &self.domains[f]
    }

    pub fn index(&self, name: &str) -> Result<usize, ScoreError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ScoreError::UnknownFeature(name.to_string()))
    }

    pub fn value_index(&self, f: usize, value: &str) -> Result<usize, ScoreError> {
        self.domains[f].iter().position(|v| v == value).ok_or_else(|| ScoreError::UnknownValue {
            feature: self.names[f].clone(),
            value: value.to_string(),
        })
    }

    /// Number of entities, if it fits in a `u64`.
    pub fn size(&self) -> Option<u64> {
        self.domains.iter().try_fold(1u64, |acc, d| acc.checked_mul(d.len() as u64))
    }

    fn checked_size(&self, cap: u64) -> Result<u64, ScoreError> {
        match self.size() {
            Some(s) if s <= cap => Ok(s),
            s => Err(ScoreError::SpaceTooLarge {
                size: s.map_or_else(|| "more than 2^64".to_string(), |s| s.to_string()),
                cap,
            }),
        }
    }

    /// Position of `e` in the enumeration order of [`FeatureSpace::entities`].
    pub fn rank(&self, e: &Entity) -> u64 {
        e.0.iter().zip(&self.domains).fold(0u64, |acc, (&v, d)| acc * d.len() as u64 + v as u64)
    }

    /// All entities, last feature varying fastest.
    pub fn entities(&self) -> impl Iterator<Item = Entity> + '_ {
        let radix: Vec<usize> = self.domains.iter().map(Vec::len).collect();
        let mut cur = Some(vec![0usize; radix.len()]);
        std::iter::from_fn(move || {
            let out = cur.clone()?;
            let mut next = out.clone();
            let mut i = radix.len();
            cur = loop {
                if i == 0 {
                    break None;
                }
                i -= 1;
                next[i] += 1;
                if next[i] < radix[i] {
                    break Some(next);
                }
                next[i] = 0;
            };
            Some(Entity(out))
        })
    }

    /// Entity from `name -> value` pairs covering every feature.
    pub fn entity<'a>(&self, values: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Entity, ScoreError> {
        let mut out = vec![None; self.len()];
        for (name, value) in values {
            let f = self.index(name)?;
            out[f] = Some(self.value_index(f, value)?);
        }
        out.iter()
            .enumerate()
            .map(|(f, v)| v.ok_or_else(|| ScoreError::MissingValue(self.names[f].clone())))
            .collect::<Result<Vec<_>, _>>()
            .map(Entity)
    }

    pub fn check(&self, e: &Entity) -> Result<(), ScoreError> {
        if e.0.len() != self.len() {
            return Err(ScoreError::EntityArity { expected: self.len(), found: e.0.len() });
        }
        for (f, &v) in e.0.iter().enumerate() {
            if v >= self.domains[f].len() {
                return Err(ScoreError::UnknownValue { feature: self.names[f].clone(), value: format!("#{v}") });
            }
        }
        Ok(())
    }

    fn subset_names(&self, subset: &[usize]) -> Vec<String> {
        subset.iter().map(|&f| self.names[f].clone()).collect()
    }
}

/// Domain index of each feature's value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Entity(pub Vec<usize>);

impl Entity {
    pub fn values(&self) -> &[usize] {
        &self.0
    }

    /// For Boolean spaces: index 1 of `["0","1"]` is true.
    pub fn from_bools(bits: &[bool]) -> Entity {
        Entity(bits.iter().map(|&b| usize::from(b)).collect())
    }

    pub fn display<'a>(&'a self, space: &'a FeatureSpace) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Entity, &'a FeatureSpace);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                for (i, &v) in self.0 .0.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}={}", self.1.name(i), self.1.domain(i)[v])?;
                }
                Ok(())
            }
        }
        D(self, space)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Distribution {
    Uniform,
    /// Independent features; `marginals[f][v]` is the probability of value `v`.
    Product(Vec<Vec<Rational>>),
    /// Finite weighted sample; weights positive and summing to one.
    Empirical(Vec<(Entity, Rational)>),
}

impl Distribution {
    pub fn product(space: &FeatureSpace, marginals: Vec<Vec<Rational>>) -> Result<Self, ScoreError> {
        if marginals.len() != space.len() {
            return Err(ScoreError::InvalidDistribution(format!(
                "{} marginals for {} features",
                marginals.len(),
                space.len()
            )));
        }
        for (f, m) in marginals.iter().enumerate() {
            if m.len() != space.domain(f).len() {
                return Err(ScoreError::InvalidDistribution(format!("marginal of `{}` has the wrong length", space.name(f))));
            }
            if m.iter().any(Signed::is_negative) {
                return Err(ScoreError::InvalidDistribution(format!("negative probability for `{}`", space.name(f))));
            }
            if m.iter().sum::<Rational>() != Rational::one() {
                return Err(ScoreError::InvalidDistribution(format!("marginal of `{}` does not sum to 1", space.name(f))));
            }
        }
        Ok(Distribution::Product(marginals))
    }

    /// Duplicate entities are merged.
    pub fn empirical(space: &FeatureSpace, sample: Vec<(Entity, Rational)>) -> Result<Self, ScoreError> {
        let mut merged: BTreeMap<Entity, Rational> = BTreeMap::new();
        for (e, w) in sample {
            space.check(&e)?;
            if !w.is_positive() {
                return Err(ScoreError::InvalidDistribution("sample weights must be positive".into()));
            }
            *merged.entry(e).or_insert_with(Rational::zero) += w;
        }
        if merged.is_empty() {
            return Err(ScoreError::InvalidDistribution("empty sample".into()));
        }
        if merged.values().sum::<Rational>() != Rational::one() {
            return Err(ScoreError::InvalidDistribution("sample weights do not sum to 1".into()));
        }
        Ok(Distribution::Empirical(merged.into_iter().collect()))
    }

    /// Equal weights on the given entities (repeats count).
    pub fn empirical_uniform(space: &FeatureSpace, sample: Vec<Entity>) -> Result<Self, ScoreError> {
        let n = sample.len() as i64;
        if n == 0 {
            return Err(ScoreError::InvalidDistribution("empty sample".into()));
        }
        Self::empirical(space, sample.into_iter().map(|e| (e, Rational::new(1.into(), n.into()))).collect())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Distribution::Uniform => "uniform",
            Distribution::Product(_) => "product",
            Distribution::Empirical(_) => "empirical",
        }
    }

    /// Marginal law of one feature.
    pub fn marginal(&self, space: &FeatureSpace, f: usize) -> Vec<Rational> {
        let k = space.domain(f).len();
        match self {
            Distribution::Uniform => vec![Rational::new(1.into(), BigInt::from(k)); k],
            Distribution::Product(m) => m[f].clone(),
            Distribution::Empirical(sample) => {
                let mut m = vec![Rational::zero(); k];
                for (e, w) in sample {
                    m[e.0[f]] += w;
                }
                m
            }
        }
    }

    /// Integer weights proportional to the probability of each value of
    /// each feature (product and uniform only).
    fn integer_marginals(&self, space: &FeatureSpace) -> Vec<Vec<BigUint>> {
        (0..space.len())
            .map(|f| {
                let m = self.marginal(space, f);
                let lcm = m.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
                m.iter()
                    .map(|r| (r.numer() * (&lcm / r.denom())).to_biguint().expect("nonnegative"))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Model {
    Tree(DecisionTree),
    Circuit(Circuit),
    Table(Vec<bool>),
}

/// A binary classifier over a feature space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classifier {
    space: FeatureSpace,
    model: Model,
}

impl Classifier {
    pub fn tree(t: DecisionTree) -> Self {
        let space = FeatureSpace {
            names: t.features().to_vec(),
            domains: t.domains().to_vec(),
        };
        Classifier { space, model: Model::Tree(t) }
    }

    /// Features of a circuit range over `["0", "1"]`.
    pub fn circuit(c: Circuit) -> Self {
        let space = FeatureSpace::boolean(c.features().iter().cloned()).expect("circuit features are unique");
        Classifier { space, model: Model::Circuit(c) }
    }

    /// Labels listed in the order of [`FeatureSpace::entities`].
    pub fn table(space: FeatureSpace, labels: Vec<bool>) -> Result<Self, ScoreError> {
        let size = space.checked_size(u64::MAX)?;
        if labels.len() as u64 != size {
            return Err(ScoreError::InvalidDistribution(format!(
                "table has {} labels for {} entities",
                labels.len(),
                size
            )));
        }
        Ok(Classifier { space, model: Model::Table(labels) })
    }

    /// Tabulates `f` over the whole space.
    pub fn from_fn(space: FeatureSpace, cap: u64, f: impl Fn(&Entity) -> bool) -> Result<Self, ScoreError> {
        space.checked_size(cap)?;
        let labels = space.entities().map(|e| f(&e)).collect();
        Self::table(space, labels)
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    pub fn as_circuit(&self) -> Option<&Circuit> {
        match &self.model {
            Model::Circuit(c) => Some(c),
            _ => None,
        }
    }

    pub fn label(&self, e: &Entity) -> bool {
        match &self.model {
            Model::Tree(t) => t.evaluate(&e.0),
            Model::Circuit(c) => {
                let bits: Vec<bool> = e.0.iter().map(|&v| v == 1).collect();
                c.evaluate(&bits)
            }
            Model::Table(labels) => labels[self.space.rank(e) as usize],
        }
    }
}

fn label_rational(b: bool) -> Rational {
    int(i64::from(b))
}

/// `G_e(S)`: expected label over entities agreeing with `e` on `subset`,
/// by direct enumeration of the completions.
pub fn game_value(
    cl: &Classifier,
    dist: &Distribution,
    e: &Entity,
    subset: &[usize],
    caps: &Caps,
) -> Result<Rational, ScoreError> {
    let space = cl.space();
    space.check(e)?;
    let mut fixed = vec![false; space.len()];
    for &f in subset {
        fixed[f] = true;
    }
    let zero = || ScoreError::ZeroProbability { subset: space.subset_names(subset) };
    match dist {
        Distribution::Empirical(sample) => {
            let (mut num, mut den) = (Rational::zero(), Rational::zero());
            for (x, w) in sample {
                if (0..space.len()).all(|f| !fixed[f] || x.0[f] == e.0[f]) {
                    den += w;
                    if cl.label(x) {
                        num += w;
                    }
                }
            }
            if den.is_zero() {
                return Err(zero());
            }
            Ok(num / den)
        }
        _ => {
            let free: Vec<usize> = (0..space.len()).filter(|&f| !fixed[f]).collect();
            let sub = FeatureSpace {
                names: free.iter().map(|&f| space.names[f].clone()).collect(),
                domains: free.iter().map(|&f| space.domains[f].clone()).collect(),
            };
            sub.checked_size(caps.product_space)?;
            let marg: Vec<Vec<Rational>> = free.iter().map(|&f| dist.marginal(space, f)).collect();
            let (mut num, mut den) = (Rational::zero(), Rational::zero());
            let mut x = e.clone();
            for c in sub.entities() {
                let mut p = Rational::one();
                for (i, &f) in free.iter().enumerate() {
                    x.0[f] = c.0[i];
                    p *= &marg[i][c.0[i]];
                }
                if p.is_zero() {
                    continue;
                }
                if cl.label(&x) {
                    num += &p;
                }
                den += p;
            }
            // Only reachable with a zero-probability value of `e` under `subset`.
            if den.is_zero() {
                return Err(zero());
            }
            Ok(num / den)
        }
    }
}

/// `G_e(S)` for every subset mask `S` of at most `brute_force_features`
/// features.
#[derive(Debug, Clone)]
pub struct GameTable {
    n: usize,
    num: Vec<BigUint>,
    den: Vec<BigUint>,
    names: Vec<String>,
}

impl GameTable {
    /// One pass over the support accumulates, per agreement pattern with
    /// `e`, the weight and the weight of label 1; a superset-sum transform
    /// then gives the conditional numerator and denominator of every `S`.
    pub fn build(cl: &Classifier, dist: &Distribution, e: &Entity, caps: &Caps) -> Result<Self, ScoreError> {
        let space = cl.space();
        space.check(e)?;
        let n = space.len();
        if n > caps.brute_force_features || n >= 32 {
            return Err(ScoreError::TooManyFeatures { found: n, cap: caps.brute_force_features });
        }
        let size = 1usize << n;
        let mut num = vec![BigUint::zero(); size];
        let mut den = vec![BigUint::zero(); size];
        let agree = |x: &Entity| {
            (0..n).filter(|&f| x.0[f] == e.0[f]).fold(0usize, |m, f| m | 1 << f)
        };
        match dist {
            Distribution::Empirical(sample) => {
                let lcm = sample.iter().fold(BigInt::one(), |acc, (_, w)| acc.lcm(w.denom()));
                for (x, w) in sample {
                    let w = (w.numer() * (&lcm / w.denom())).to_biguint().expect("positive weight");
                    let m = agree(x);
                    if cl.label(x) {
                        num[m] += &w;
                    }
                    den[m] += w;
                }
            }
            _ => {
                space.checked_size(caps.product_space)?;
                let weights = dist.integer_marginals(space);
                for x in space.entities() {
                    let w: BigUint = (0..n).map(|f| &weights[f][x.0[f]]).product();
                    if w.is_zero() {
                        continue;
                    }
                    let m = agree(&x);
                    if cl.label(&x) {
                        num[m] += &w;
                    }
                    den[m] += w;
                }
            }
        }
        for f in 0..n {
            for s in 0..size {
                if s & (1 << f) == 0 {
                    let (lo, hi) = (s, s | 1 << f);
                    let add = num[hi].clone();
                    num[lo] += add;
                    let add = den[hi].clone();
                    den[lo] += add;
                }
            }
        }
        Ok(GameTable { n, num, den, names: space.names.clone() })
    }

    pub fn players(&self) -> usize {
        self.n
    }

    pub fn value(&self, mask: usize) -> Result<Rational, ScoreError> {
        if self.den[mask].is_zero() {
            let subset = (0..self.n).filter(|f| mask >> f & 1 == 1).map(|f| self.names[f].clone()).collect();
            return Err(ScoreError::ZeroProbability { subset });
        }
        Ok(Rational::new(BigInt::from(self.num[mask].clone()), BigInt::from(self.den[mask].clone())))
    }
}

/// Shapley value of player `p` in an `n`-player game given on subset masks.
pub fn shapley<F>(n: usize, p: usize, cap: usize, mut game: F) -> Result<Rational, ScoreError>
where
    F: FnMut(u64) -> Result<Rational, ScoreError>,
{
    if n > cap || n >= 64 {
        return Err(ScoreError::TooManyFeatures { found: n, cap });
    }
    assert!(p < n, "player out of range");
    let weights: Vec<Rational> = (0..n).map(|k| shapley_weight(n, k)).collect();
    let bit = 1u64 << p;
    let mut total = Rational::zero();
    for s in 0..(1u64 << n) {
        if s & bit != 0 {
            continue;
        }
        let diff = game(s | bit)? - game(s)?;
        if !diff.is_zero() {
            total += diff * &weights[s.count_ones() as usize];
        }
    }
    Ok(total)
}

/// Shapley values of all players; each coalition value is computed once.
pub fn shapley_all<F>(n: usize, cap: usize, mut game: F) -> Result<Vec<Rational>, ScoreError>
where
    F: FnMut(u64) -> Result<Rational, ScoreError>,
{
    if n > cap || n >= 32 {
        return Err(ScoreError::TooManyFeatures { found: n, cap });
    }
    let values = (0..1u64 << n).map(&mut game).collect::<Result<Vec<_>, _>>()?;
    let weights: Vec<Rational> = (0..n).map(|k| shapley_weight(n, k)).collect();
    Ok((0..n)
        .map(|p| {
            let bit = 1usize << p;
            let mut total = Rational::zero();
            for s in (0..values.len()).filter(|s| s & bit == 0) {
                let diff = &values[s | bit] - &values[s];
                if !diff.is_zero() {
                    total += diff * &weights[s.count_ones() as usize];
                }
            }
            total
        })
        .collect())
}

/// Shap score of feature `f` by summing over all subsets.
pub fn shap_bruteforce(
    cl: &Classifier,
    dist: &Distribution,
    e: &Entity,
    f: usize,
    caps: &Caps,
) -> Result<Rational, ScoreError> {
    let n = cl.space().len();
    if f >= n {
        return Err(ScoreError::UnknownFeature(format!("#{f}")));
    }
    let table = GameTable::build(cl, dist, e, caps)?;
    shapley(n, f, caps.brute_force_features, |s| table.value(s as usize))
}

/// Shap scores of every feature, in feature order.
pub fn shap_bruteforce_all(
    cl: &Classifier,
    dist: &Distribution,
    e: &Entity,
    caps: &Caps,
) -> Result<Vec<Rational>, ScoreError> {
    let table = GameTable::build(cl, dist, e, caps)?;
    shapley_all(cl.space().len(), caps.brute_force_features, |s| table.value(s as usize))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountIdentity {
    /// Number of satisfying assignments.
    pub lhs: BigUint,
    /// `2^n (L(e) - Σ Shap)` under the uniform distribution.
    pub rhs: Rational,
    pub equal: bool,
    /// `true` when the circuit validated as a dDBC and the polynomial
    /// algorithms were used.
    pub used_ddbc: bool,
    pub shap: Vec<Rational>,
}

/// Checks `#SAT(L) = 2^n (L(e) - Σ_i Shap_i)` under the uniform distribution.
pub fn sat_count_identity(c: &Circuit, e: &Entity, caps: &Caps) -> Result<CountIdentity, ScoreError> {
    let opts = ValidateOptions { budget: caps.determinism_budget, trust_determinism: false };
    let (lhs, shap, used_ddbc) = match validate_ddbc(c, &opts) {
        Ok(d) => (model_count(&d), shap_ddbc(&d, &Distribution::Uniform, e)?, true),
        Err(_) => {
            let cl = Classifier::circuit(c.clone());
            let lhs = brute_force_count(c, caps.brute_force_features)?;
            (lhs, shap_bruteforce_all(&cl, &Distribution::Uniform, e, caps)?, false)
        }
    };
    let label = Classifier::circuit(c.clone()).label(e);
    let total: Rational = shap.iter().sum();
    let scale = Rational::from_integer(BigInt::one() << c.feature_count());
    let rhs = scale * (label_rational(label) - total);
    let equal = rhs == Rational::from_integer(BigInt::from(lhs.clone()));
    Ok(CountIdentity { lhs, rhs, equal, used_ddbc, shap })
}
