//! Shap scores on deterministic decomposable circuits in polynomial time.
//!
//! For a gate `g` over variables `V` and `k ≤ |V|`, let
//! `γ_g[k] = Σ_{S ⊆ V, |S| = k} Pr[g = 1 | x_S = e_S]` under a product
//! distribution. Independence across AND children turns AND into a
//! convolution of these vectors; mutual exclusion of OR children turns OR
//! into a sum, each child padded with the binomial count of the variables
//! it does not mention; NOT complements against `C(|V|, k)`.
//!
//! For feature `x`, the sums of `G(S ∪ {x})` and `G(S)` over `|S| = k`
//! come from two passes in which `x` is not counted: once fixed to `e_x`,
//! once left random. Only gates whose varset contains `x` are recomputed.
//!
//! All vectors are kept as integers by scaling with `B^{|V| - k}`, where
//! `B` is the common denominator of the marginals.

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{Distribution, Entity, ScoreError};
use crate::circuit::{Ddbc, Gate};
use crate::rational::{binomial_table, shapley_weight, Rational};

struct Ctx<'a> {
    gates: &'a [Gate],
    /// `q[y] = Pr[y = 1] * B`
    q: Vec<BigInt>,
    e: Vec<bool>,
    binom: Vec<Vec<BigInt>>,
    /// `pow[i] = B^i`
    pow: Vec<BigInt>,
    /// per gate: varset size and varset
    varsets: Vec<(usize, FixedBitSet)>,
}

/// Vector of one gate with its counted size `m` and scale exponent `s`.
#[derive(Clone)]
struct Vecs {
    gamma: Vec<BigInt>,
    m: usize,
    s: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Special {
    None,
    /// `x` fixed to `e_x` and not counted
    Fixed(usize),
    /// `x` random and not counted
    Random(usize),
}

impl Ctx<'_> {
    fn binom(&self, n: usize, k: usize) -> BigInt {
        if k > n {
            BigInt::zero()
        } else {
            self.binom[n][k].clone()
        }
    }

    fn gate(&self, g: usize, v: &[Vecs], special: Special) -> Vecs {
        let from = |gamma: Vec<BigInt>, m: usize, s: usize| Vecs { gamma, m, s };
        match &self.gates[g] {
            Gate::Var(y) => match special {
                Special::Fixed(x) if x == *y => from(vec![BigInt::from(u8::from(self.e[x]))], 0, 0),
                Special::Random(x) if x == *y => from(vec![self.q[x].clone()], 0, 1),
                _ => from(vec![self.q[*y].clone(), BigInt::from(u8::from(self.e[*y]))], 1, 1),
            },
            Gate::Const(c) => from(vec![BigInt::from(u8::from(*c))], 0, 0),
            Gate::Not(ch) => {
                let c = &v[*ch];
                let gamma = (0..=c.m).map(|k| self.binom(c.m, k) * &self.pow[c.s - k] - &c.gamma[k]).collect();
                from(gamma, c.m, c.s)
            }
            Gate::And(cs) => {
                let mut acc = from(vec![BigInt::one()], 0, 0);
                for &ch in cs {
                    let c = &v[ch];
                    let mut out = vec![BigInt::zero(); acc.m + c.m + 1];
                    for (i, a) in acc.gamma.iter().enumerate() {
                        if a.is_zero() {
                            continue;
                        }
                        for (j, b) in c.gamma.iter().enumerate() {
                            out[i + j] += a * b;
                        }
                    }
                    acc = from(out, acc.m + c.m, acc.s + c.s);
                }
                acc
            }
            Gate::Or(cs) => {
                // m and s of an OR gate are those of its whole varset.
                let m = self.size(g, special, false);
                let s = self.size(g, special, true);
                let mut out = vec![BigInt::zero(); m + 1];
                for &ch in cs {
                    let c = &v[ch];
                    let (dm, ds) = (m - c.m, s - c.s);
                    for (j, a) in c.gamma.iter().enumerate() {
                        if a.is_zero() {
                            continue;
                        }
                        for t in 0..=dm {
                            out[j + t] += a * &self.binom[dm][t] * &self.pow[ds - t];
                        }
                    }
                }
                from(out, m, s)
            }
        }
    }

    fn size(&self, g: usize, special: Special, scale: bool) -> usize {
        self.varsets[g].0 - usize::from(match special {
            Special::None => false,
            Special::Fixed(x) => self.varsets[g].1.contains(x),
            Special::Random(x) => !scale && self.varsets[g].1.contains(x),
        })
    }
}

/// Shap score of every feature (in circuit feature order) under the
/// uniform or a product distribution.
pub fn shap_ddbc(d: &Ddbc, dist: &Distribution, e: &Entity) -> Result<Vec<Rational>, ScoreError> {
    let n = d.feature_count();
    if e.0.len() != n {
        return Err(ScoreError::EntityArity { expected: n, found: e.0.len() });
    }
    if let Some(f) = e.0.iter().position(|&v| v > 1) {
        return Err(ScoreError::UnknownValue { feature: d.features()[f].clone(), value: format!("#{}", e.0[f]) });
    }
    let p: Vec<Rational> = match dist {
        Distribution::Uniform => vec![Rational::new(1.into(), 2.into()); n],
        Distribution::Product(m) => {
            if m.len() != n {
                return Err(ScoreError::InvalidDistribution(format!("{} marginals for {} features", m.len(), n)));
            }
            m.iter()
                .enumerate()
                .map(|(f, m)| match &m[..] {
                    [_, one] => Ok(one.clone()),
                    _ => Err(ScoreError::NotBoolean(d.features()[f].clone())),
                })
                .collect::<Result<_, _>>()?
        }
        Distribution::Empirical(_) => return Err(ScoreError::UnsupportedDistribution("an empirical distribution")),
    };
    // Conditioning on a value of probability zero is undefined.
    if let Some(f) = (0..n).find(|&f| if e.0[f] == 1 { p[f].is_zero() } else { p[f].is_one() }) {
        return Err(ScoreError::ZeroProbability { subset: vec![d.features()[f].clone()] });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let b = p.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let q = p.iter().map(|r| r.numer() * (&b / r.denom())).collect();
    let mut pow = vec![BigInt::one()];
    for i in 1..=n + 1 {
        let next = &pow[i - 1] * &b;
        pow.push(next);
    }
    let varsets = (0..d.gates().len())
        .map(|g| (d.varset(g).count_ones(..), d.varset(g).clone()))
        .collect();
    let ctx = Ctx {
        gates: d.gates(),
        q,
        e: e.0.iter().map(|&v| v == 1).collect(),
        binom: binomial_table(n + 1),
        pow,
        varsets,
    };

    let mut base: Vec<Vecs> = Vec::with_capacity(d.gates().len());
    for g in 0..d.gates().len() {
        let v = ctx.gate(g, &base, Special::None);
        base.push(v);
    }

    let out = d.output();
    let weights: Vec<Rational> = (0..n).map(|k| shapley_weight(n, k)).collect();
    let mut scores = Vec::with_capacity(n);
    for x in 0..n {
        if !d.varset(out).contains(x) {
            scores.push(Rational::zero());
            continue;
        }
        let cone: Vec<usize> = (0..=out).filter(|&g| d.varset(g).contains(x)).collect();
        let run = |special: Special| {
            let mut v = base.clone();
            for &g in &cone {
                v[g] = ctx.gate(g, &v, special);
            }
            v.swap_remove(out)
        };
        let a = run(Special::Fixed(x));
        let r = run(Special::Random(x));
        debug_assert_eq!(a.m, r.m);
        debug_assert_eq!(a.s + 1, r.s);
        // Features outside the output's varset pad each j-term to every
        // k >= j, C(rest, k - j) ways.
        let rest = (n - 1) - a.m;
        let mut total = Rational::zero();
        for j in 0..=a.m {
            let diff = &a.gamma[j] * &ctx.pow[1] - &r.gamma[j];
            if diff.is_zero() {
                continue;
            }
            let coef: Rational = (j..=j + rest)
                .map(|k| &weights[k] * Rational::from_integer(ctx.binom(rest, k - j)))
                .sum();
            total += coef * Rational::new(diff, ctx.pow[r.s - j].clone());
        }
        scores.push(total);
    }
    Ok(scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{compile_dt, validate_ddbc, CircuitBuilder, TreeBuilder, ValidateOptions};
    use crate::mlscore::tests::caps;
    use crate::mlscore::{shap_bruteforce_all, Classifier, FeatureSpace};
    use crate::rational::{int, ratio};

    fn check(d: &Ddbc, dist: &Distribution) {
        let cl = Classifier::circuit(d.circuit().clone());
        for e in cl.space().entities() {
            let fast = shap_ddbc(d, dist, &e).unwrap();
            let slow = shap_bruteforce_all(&cl, dist, &e, &caps()).unwrap();
            assert_eq!(fast, slow, "entity {:?}", e);
        }
    }

    /// `x1 ∧ (x2 ∨ (¬x2 ∧ x3))`, with an unused `x4`.
    fn guarded() -> Ddbc {
        let mut b = CircuitBuilder::new(["x1", "x2", "x3", "x4"]).unwrap();
        let (x1, x2, x3) = (b.var("x1").unwrap(), b.var("x2").unwrap(), b.var("x3").unwrap());
        let n2 = b.not(x2);
        let right = b.and(vec![n2, x3]);
        let or = b.or(vec![x2, right]);
        let out = b.and(vec![x1, or]);
        validate_ddbc(&b.build(out).unwrap(), &ValidateOptions::default()).unwrap()
    }

    #[test]
    fn matches_brute_force_uniform() {
        check(&guarded(), &Distribution::Uniform);
        let neg = validate_ddbc(&guarded().negated(), &ValidateOptions::default()).unwrap();
        check(&neg, &Distribution::Uniform);
    }

    #[test]
    fn matches_brute_force_product() {
        let d = guarded();
        let space = FeatureSpace::boolean(d.features().iter().cloned()).unwrap();
        let marg = |p: Rational| vec![int(1) - &p, p];
        let dist = Distribution::product(
            &space,
            vec![marg(ratio(1, 3)), marg(ratio(3, 4)), marg(ratio(2, 5)), marg(ratio(1, 7))],
        )
        .unwrap();
        check(&d, &dist);
    }

    #[test]
    fn constant_classifier_scores_zero() {
        let mut b = CircuitBuilder::new(["x1", "x2"]).unwrap();
        let one = b.constant(true);
        let d = validate_ddbc(&b.build(one).unwrap(), &ValidateOptions::default()).unwrap();
        let s = shap_ddbc(&d, &Distribution::Uniform, &Entity(vec![1, 0])).unwrap();
        assert_eq!(s, vec![int(0), int(0)]);
    }

    #[test]
    fn compiled_tree() {
        let mut b = TreeBuilder::boolean(["a", "b", "c"]);
        let (f, t) = (b.leaf(false), b.leaf(true));
        let c = b.split("c", vec![f, t]).unwrap();
        let bb = b.split("b", vec![c, t]).unwrap();
        let root = b.split("a", vec![c, bb]).unwrap();
        let d = compile_dt(&b.build(root).unwrap()).unwrap();
        check(&d, &Distribution::Uniform);
    }

    #[test]
    fn degenerate_marginal() {
        let d = guarded();
        let space = FeatureSpace::boolean(d.features().iter().cloned()).unwrap();
        let marg = |p: Rational| vec![int(1) - &p, p];
        let dist = Distribution::product(&space, vec![marg(int(1)), marg(ratio(1, 2)), marg(ratio(1, 2)), marg(ratio(1, 2))])
            .unwrap();
        let e = Entity(vec![0, 1, 1, 1]);
        let err = shap_ddbc(&d, &dist, &e).unwrap_err();
        assert_eq!(err, ScoreError::ZeroProbability { subset: vec!["x1".into()] });
        let cl = Classifier::circuit(d.circuit().clone());
        assert!(shap_bruteforce_all(&cl, &dist, &e, &caps()).is_err());
        let ok = Entity(vec![1, 0, 1, 0]);
        assert_eq!(shap_ddbc(&d, &dist, &ok).unwrap(), shap_bruteforce_all(&cl, &dist, &ok, &caps()).unwrap());
    }

    #[test]
    fn empirical_is_unsupported() {
        let d = guarded();
        let space = FeatureSpace::boolean(d.features().iter().cloned()).unwrap();
        let dist = Distribution::empirical_uniform(&space, vec![Entity(vec![1, 1, 1, 1])]).unwrap();
        assert!(matches!(
            shap_ddbc(&d, &dist, &Entity(vec![1, 1, 1, 1])),
            Err(ScoreError::UnsupportedDistribution(_))
        ));
    }
}
