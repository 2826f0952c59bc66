//! Random generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use attriscore::circuit::{compile_dt, validate_ddbc, CircuitBuilder, Ddbc, DecisionTree, TreeBuilder, ValidateOptions};
use attriscore::mlscore::{Classifier, Distribution, Entity};
use attriscore::relcore::{
    eval_bcq, Atom, BooleanQuery, DenialConstraint, InstanceBuilder, RelationalInstance, Schema, Term, TupleId,
};
use attriscore::{Caps, Rational};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    Rng8::seed_from_u64(seed)
}

pub fn feature_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Random deterministic decomposable circuit over `n` features. Not every
/// feature need occur. OR gates are either guarded by a literal or of the
/// form `OR(g, NOT g)`, which only the truth-table check certifies.
pub fn random_ddbc(rng: &mut Rng8, n: usize) -> Ddbc {
    let mut b = CircuitBuilder::new(feature_names(n)).unwrap();
    let mut vars: Vec<usize> = (0..n).collect();
    vars.shuffle(rng);
    let keep = rng.gen_range(0..=n);
    vars.truncate(keep.max(1).min(n));
    let out = gen_gate(rng, &mut b, &vars, 5);
    let c = b.build(out).unwrap();
    validate_ddbc(&c, &ValidateOptions::default()).expect("generator yields dDBCs")
}

fn gen_gate(rng: &mut Rng8, b: &mut CircuitBuilder, vars: &[usize], depth: usize) -> usize {
    let name = |v: usize| format!("x{}", v + 1);
    if vars.is_empty() {
        b.constant(rng.gen_bool(0.5))
    } else if vars.len() == 1 || depth == 0 || rng.gen_bool(0.15) {
        // Literal, or a small guarded leaf over the remaining variables.
        let v = b.var(&name(vars[0])).unwrap();
        if vars.len() == 1 || depth == 0 {
            if rng.gen_bool(0.5) {
                b.not(v)
            } else {
                v
            }
        } else {
            let rest = gen_gate(rng, b, &vars[1..], 0);
            b.and(vec![v, rest])
        }
    } else {
        match rng.gen_range(0..10) {
            // Decomposable AND over a random split.
            0..=3 => {
                let cut = rng.gen_range(1..vars.len());
                let l = gen_gate(rng, b, &vars[..cut], depth - 1);
                let r = gen_gate(rng, b, &vars[cut..], depth - 1);
                b.and(vec![l, r])
            }
            // Decision on vars[0].
            4..=7 => {
                let v = b.var(&name(vars[0])).unwrap();
                let nv = b.not(v);
                let rest = &vars[1..];
                let hi = gen_gate(rng, b, rest, depth - 1);
                let lo = gen_gate(rng, b, rest, depth - 1);
                let a = b.and(vec![v, hi]);
                let c = b.and(vec![nv, lo]);
                b.or(vec![a, c])
            }
            // g ∨ ¬g' with g' = g restricted: OR(AND(g, h), NOT g).
            8 => {
                let small = &vars[..vars.len().min(3)];
                let g = gen_gate(rng, b, small, 1);
                let ng = b.not(g);
                let h = gen_gate(rng, b, &vars[small.len()..], depth - 1);
                let gh = b.and(vec![g, h]);
                b.or(vec![gh, ng])
            }
            _ => {
                let g = gen_gate(rng, b, vars, depth - 1);
                b.not(g)
            }
        }
    }
}

/// Random Boolean decision tree over `n` features; no feature repeats on a
/// path. Depth at most `depth`.
pub fn random_tree(rng: &mut Rng8, n: usize, depth: usize) -> DecisionTree {
    let mut b = TreeBuilder::boolean(feature_names(n));
    let free: Vec<usize> = (0..n).collect();
    let root = gen_node(rng, &mut b, free, depth);
    b.build(root).unwrap()
}

fn gen_node(rng: &mut Rng8, b: &mut TreeBuilder, mut free: Vec<usize>, depth: usize) -> usize {
    if free.is_empty() || depth == 0 || rng.gen_bool(0.2) {
        return b.leaf(rng.gen_bool(0.5));
    }
    let i = rng.gen_range(0..free.len());
    let f = free.swap_remove(i);
    let lo = gen_node(rng, b, free.clone(), depth - 1);
    let hi = gen_node(rng, b, free, depth - 1);
    b.split(&format!("x{}", f + 1), vec![lo, hi]).unwrap()
}

pub fn random_compiled_tree(rng: &mut Rng8, n: usize) -> (DecisionTree, Ddbc) {
    let t = random_tree(rng, n, n.min(8));
    let d = compile_dt(&t).unwrap();
    (t, d)
}

pub fn random_bools(rng: &mut Rng8, n: usize) -> Entity {
    Entity((0..n).map(|_| rng.gen_range(0..2)).collect())
}

/// Product distribution over Boolean features with small random marginals.
pub fn random_product(rng: &mut Rng8, cl: &Classifier) -> Distribution {
    let marg = (0..cl.space().len())
        .map(|_| {
            let den = rng.gen_range(2..7i64);
            let num = rng.gen_range(1..den);
            let p = Rational::new(num.into(), den.into());
            vec![Rational::one() - &p, p]
        })
        .collect();
    Distribution::product(cl.space(), marg).unwrap()
}

pub fn caps() -> Caps {
    Caps::default()
}

// ---------------------------------------------------------------- relational

pub const CONSTS: [&str; 3] = ["a", "b", "c"];

/// Random instance over `R/2`, `S/1`, `T/2` with at most `max` tuples.
pub fn random_instance(rng: &mut Rng8, max: usize) -> RelationalInstance {
    let schema = Schema::from_arities([("R", 2), ("S", 1), ("T", 2)]).unwrap();
    let mut seen = BTreeSet::new();
    let mut b = InstanceBuilder::with_schema(schema);
    let n = rng.gen_range(1..=max);
    for _ in 0..n * 3 {
        if seen.len() == n {
            break;
        }
        let (p, arity) = [("R", 2), ("S", 1), ("T", 2)][rng.gen_range(0..3)];
        let vals: Vec<&str> = (0..arity).map(|_| CONSTS[rng.gen_range(0..CONSTS.len())]).collect();
        if seen.insert((p, vals.clone())) {
            b.fact(p, &vals);
        }
    }
    b.build().unwrap()
}

/// Random 1–3 atom query with variables `x`, `y`, `z` and occasional constants.
pub fn random_query(rng: &mut Rng8, schema: &Schema) -> BooleanQuery {
    let atoms = (0..rng.gen_range(1..=3))
        .map(|_| {
            let (p, arity) = [("R", 2), ("S", 1), ("T", 2)][rng.gen_range(0..3)];
            let terms = (0..arity)
                .map(|_| {
                    if rng.gen_bool(0.15) {
                        Term::Const(CONSTS[rng.gen_range(0..CONSTS.len())].to_string())
                    } else {
                        Term::Var(["x", "y", "z"][rng.gen_range(0..3)].to_string())
                    }
                })
                .collect();
            Atom::new(p, terms)
        })
        .collect();
    BooleanQuery::new(atoms, schema).unwrap()
}

pub fn random_dcs(rng: &mut Rng8, schema: &Schema) -> Vec<DenialConstraint> {
    (0..rng.gen_range(1..=3))
        .map(|_| DenialConstraint::new(random_query(rng, schema).atoms, schema).unwrap())
        .collect()
}

/// Tuple indices sorted by id.
pub fn id_order(d: &RelationalInstance) -> Vec<usize> {
    d.sorted_by_id(0..d.len())
}

fn holds_without(d: &RelationalInstance, q: &BooleanQuery, removed: u32) -> bool {
    let keep: Vec<usize> = (0..d.len()).filter(|i| removed >> i & 1 == 0).collect();
    eval_bcq(&d.restrict(&keep), q)
}

/// Definition-level responsibility: the smallest `Γ` (and, among those, the
/// first in lexicographic id order) with `D∖Γ ⊨ Q` and `D∖(Γ∪{τ}) ⊭ Q`.
pub fn brute_contingency(d: &RelationalInstance, q: &BooleanQuery, tau: usize) -> Option<Vec<TupleId>> {
    let order = id_order(d);
    let others: Vec<usize> = order.iter().copied().filter(|&t| t != tau).collect();
    for k in 0..=others.len() {
        let mut best: Option<Vec<usize>> = None;
        for mask in 0u32..(1 << others.len()) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let gamma: Vec<usize> = (0..others.len()).filter(|i| mask >> i & 1 == 1).collect();
            let removed = gamma.iter().fold(0u32, |m, &i| m | 1 << others[i]);
            if holds_without(d, q, removed) && !holds_without(d, q, removed | 1 << tau) {
                // positions in id order compare like ids
                if best.as_ref().is_none_or(|b| gamma < *b) {
                    best = Some(gamma);
                }
            }
        }
        if let Some(b) = best {
            return Some(b.iter().map(|&i| d.id(others[i]).clone()).collect());
        }
    }
    None
}

pub fn consistent(d: &RelationalInstance, dcs: &[DenialConstraint], kept: u32) -> bool {
    let keep: Vec<usize> = (0..d.len()).filter(|i| kept >> i & 1 == 1).collect();
    let sub = d.restrict(&keep);
    dcs.iter().all(|dc| !eval_bcq(&sub, &dc.violation_query()))
}

/// S-repairs by subset enumeration, as sorted id lists, sorted.
pub fn brute_s_repairs(d: &RelationalInstance, dcs: &[DenialConstraint]) -> Vec<Vec<TupleId>> {
    let n = d.len();
    let ok: Vec<u32> = (0u32..(1 << n)).filter(|&m| consistent(d, dcs, m)).collect();
    let okset: BTreeSet<u32> = ok.iter().copied().collect();
    let mut out: Vec<Vec<TupleId>> = ok
        .iter()
        .filter(|&&m| (0..n).all(|i| m >> i & 1 == 1 || !okset.contains(&(m | 1 << i))))
        .map(|&m| {
            let mut ids: Vec<TupleId> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| d.id(i).clone()).collect();
            ids.sort();
            ids
        })
        .collect();
    out.sort();
    out
}

// --------------------------------------------------------------------- games

/// Generalized responsibility straight from its definition: every
/// `(Γ, w̄)` of every size, smallest size with a positive local score wins.
pub fn brute_resp_global(cl: &Classifier, e: &Entity, feature: usize) -> Rational {
    let space = cl.space();
    let n = space.len();
    let dom = |f: usize| space.domain(f).len();
    let mut by_size: Vec<Rational> = vec![Rational::zero(); n];
    // Every entity is some e^{Γ,w̄}: Γ is where it differs from e.
    for x in space.entities() {
        if x.0[feature] != e.0[feature] || !cl.label(&x) {
            continue;
        }
        let size = (0..n).filter(|&f| x.0[f] != e.0[f]).count();
        let mut exp = Rational::zero();
        for v in 0..dom(feature) {
            let mut y = x.clone();
            y.0[feature] = v;
            if cl.label(&y) {
                exp += Rational::new(1.into(), (dom(feature) as i64).into());
            }
        }
        let local = (Rational::one() - exp) / Rational::from_integer((size as i64 + 1).into());
        if local > by_size[size] {
            by_size[size] = local;
        }
    }
    by_size.into_iter().find(|r| !r.is_zero()).unwrap_or_else(Rational::zero)
}
