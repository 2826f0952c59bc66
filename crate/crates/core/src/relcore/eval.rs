use std::collections::{BTreeSet, HashMap, HashSet};
use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;

use super::{BooleanQuery, RelError, RelationalInstance, Term, TupleId, Value};

pub type MatchVisit = ControlFlow<()>;

#[derive(Debug, Clone, Copy)]
enum Slot<'q> {
    Const(&'q str),
    /// Variable occurring at least twice in the query.
    Join(usize),
    /// Variable occurring once: matches anything, NULL included.
    Free,
}

struct Compiled<'q> {
    atoms: Vec<(&'q str, Vec<Slot<'q>>)>,
    nvars: usize,
}

fn compile(query: &BooleanQuery) -> Compiled<'_> {
    let mut occurrences: HashMap<&str, usize> = HashMap::new();
    for t in query.atoms.iter().flat_map(|a| &a.terms) {
        if let Term::Var(v) = t {
            *occurrences.entry(v).or_default() += 1;
        }
    }
    let mut var_index: HashMap<&str, usize> = HashMap::new();
    let atoms = query
        .atoms
        .iter()
        .map(|a| {
            let slots = a
                .terms
                .iter()
                .map(|t| match t {
                    Term::Const(c) => Slot::Const(c),
                    Term::Var(v) if occurrences[v.as_str()] == 1 => Slot::Free,
                    Term::Var(v) => {
                        let n = var_index.len();
                        Slot::Join(*var_index.entry(v).or_insert(n))
                    }
                })
                .collect();
            (a.pred.as_str(), slots)
        })
        .collect();
    Compiled { atoms, nvars: var_index.len() }
}

/// Positions of atom `atom` of `query` whose value must be a non-NULL
/// constant for a match: constants and repeated variables.
pub(crate) fn effective_positions(query: &BooleanQuery) -> Vec<Vec<usize>> {
    compile(query)
        .atoms
        .iter()
        .map(|(_, slots)| {
            slots
                .iter()
                .enumerate()
                .filter(|(_, s)| !matches!(s, Slot::Free))
                .map(|(j, _)| j)
                .collect()
        })
        .collect()
}

/// Calls `visit` once per satisfying assignment with the tuple index matched
/// by each atom (indexed like `query.atoms`). Only tuples set in `active`
/// take part; `None` means the whole instance.
pub fn for_each_match<F>(
    instance: &RelationalInstance,
    query: &BooleanQuery,
    active: Option<&FixedBitSet>,
    mut visit: F,
) -> MatchVisit
where
    F: FnMut(&[usize]) -> MatchVisit,
{
    let compiled = compile(query);
    let mut order: Vec<usize> = (0..compiled.atoms.len()).collect();
    order.sort_by_key(|&i| instance.relation(compiled.atoms[i].0).len());
    let mut bindings: Vec<Option<&str>> = vec![None; compiled.nvars];
    let mut images = vec![usize::MAX; compiled.atoms.len()];
    search(instance, &compiled, &order, 0, active, &mut bindings, &mut images, &mut visit)
}

#[allow(clippy::too_many_arguments)]
fn search<'a, F>(
    instance: &'a RelationalInstance,
    q: &Compiled<'_>,
    order: &[usize],
    depth: usize,
    active: Option<&FixedBitSet>,
    bindings: &mut Vec<Option<&'a str>>,
    images: &mut Vec<usize>,
    visit: &mut F,
) -> MatchVisit
where
    F: FnMut(&[usize]) -> MatchVisit,
{
    if depth == order.len() {
        return visit(images);
    }
    let ai = order[depth];
    let (pred, slots) = &q.atoms[ai];
    let mut newly = Vec::with_capacity(slots.len());
    'tuples: for &t in instance.relation(pred) {
        if active.is_some_and(|m| !m.contains(t)) {
            continue;
        }
        for v in newly.drain(..) {
            bindings[v] = None;
        }
        let values = &instance.tuple(t).values;
        for (slot, value) in slots.iter().zip(values) {
            match (slot, value) {
                (Slot::Free, _) => {}
                (_, Value::Null) => continue 'tuples,
                (Slot::Const(c), Value::Const(v)) => {
                    if c != v {
                        continue 'tuples;
                    }
                }
                (Slot::Join(x), Value::Const(v)) => match bindings[*x] {
                    Some(b) if b != v => continue 'tuples,
                    Some(_) => {}
                    None => {
                        bindings[*x] = Some(v.as_str());
                        newly.push(*x);
                    }
                },
            }
        }
        images[ai] = t;
        search(instance, q, order, depth + 1, active, bindings, images, visit)?;
    }
    for v in newly.drain(..) {
        bindings[v] = None;
    }
    ControlFlow::Continue(())
}

/// `D ⊨ Q`.
pub fn eval_bcq(instance: &RelationalInstance, query: &BooleanQuery) -> bool {
    eval_bcq_masked(instance, query, None)
}

/// Evaluation over the sub-instance selected by `active`.
pub fn eval_bcq_masked(instance: &RelationalInstance, query: &BooleanQuery, active: Option<&FixedBitSet>) -> bool {
    for_each_match(instance, query, active, |_| ControlFlow::Break(())).is_break()
}

/// Subset-minimal witnesses as sorted tuple-index sets, ordered by size and
/// then by sorted tuple id.
pub fn witness_family(
    instance: &RelationalInstance,
    query: &BooleanQuery,
    cap: usize,
) -> Result<Vec<Vec<usize>>, RelError> {
    let mut images: HashSet<Vec<usize>> = HashSet::new();
    let mut visited = 0usize;
    let flow = for_each_match(instance, query, None, |img| {
        visited += 1;
        if visited > cap {
            return ControlFlow::Break(());
        }
        let mut w = img.to_vec();
        w.sort_unstable();
        w.dedup();
        images.insert(w);
        ControlFlow::Continue(())
    });
    if flow.is_break() {
        return Err(RelError::WitnessCapExceeded(cap));
    }
    Ok(minimize_family(instance, images))
}

pub(crate) fn minimize_family(
    instance: &RelationalInstance,
    sets: impl IntoIterator<Item = Vec<usize>>,
) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = sets.into_iter().collect();
    all.sort_by_key(|w| w.len());
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for w in all {
        if !kept.iter().any(|k| is_subset(k, &w)) {
            kept.push(w);
        }
    }
    kept.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| instance.ids_of(a.iter().copied()).cmp(&instance.ids_of(b.iter().copied())))
    });
    kept
}

/// Both slices sorted ascending.
pub(crate) fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.by_ref().any(|y| y == x))
}

/// Subset-minimal sets of tuples that satisfy `query` on their own.
pub fn minimal_witnesses(
    instance: &RelationalInstance,
    query: &BooleanQuery,
    cap: usize,
) -> Result<Vec<BTreeSet<TupleId>>, RelError> {
    Ok(witness_family(instance, query, cap)?
        .into_iter()
        .map(|w| w.into_iter().map(|i| instance.id(i).clone()).collect())
        .collect())
}
