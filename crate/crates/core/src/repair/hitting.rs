//! Hitting sets over set systems with vertices `0..n`.
//!
//! Callers number vertices so that index order is the reporting order;
//! "lexicographically smallest" below means smallest as a sorted index list.

use fixedbitset::FixedBitSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Abort {
    Nodes(u64),
    Results(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct SetSystem {
    pub n: usize,
    /// Each edge sorted ascending, nonempty.
    pub edges: Vec<Vec<usize>>,
}

struct Budget {
    nodes: u64,
    cap: u64,
}

impl Budget {
    fn tick(&mut self) -> Result<(), Abort> {
        self.nodes += 1;
        if self.nodes > self.cap {
            Err(Abort::Nodes(self.cap))
        } else {
            Ok(())
        }
    }
}

impl SetSystem {
    fn uncovered<'a>(&'a self, chosen: &'a FixedBitSet) -> impl Iterator<Item = &'a Vec<usize>> + 'a {
        self.edges.iter().filter(move |e| !e.iter().any(|&v| chosen.contains(v)))
    }

    /// Size of a greedily packed family of uncovered edges whose allowed
    /// parts are pairwise disjoint. Each needs its own vertex.
    fn disjoint_lower_bound(&self, chosen: &FixedBitSet, allowed: &FixedBitSet) -> usize {
        let mut used = FixedBitSet::with_capacity(self.n);
        let mut uncovered: Vec<&Vec<usize>> = self.uncovered(chosen).collect();
        uncovered.sort_by_key(|e| e.iter().filter(|&&v| allowed.contains(v)).count());
        let mut count = 0;
        for e in uncovered {
            if e.iter().filter(|&&v| allowed.contains(v)).all(|&v| !used.contains(v)) {
                for &v in e {
                    if allowed.contains(v) {
                        used.insert(v);
                    }
                }
                count += 1;
            }
        }
        count
    }
}

/// Greedy hitting set: repeatedly take the vertex hitting most uncovered
/// edges, lowest index on ties.
pub(crate) fn greedy(sys: &SetSystem, forced: Option<usize>) -> Vec<usize> {
    let mut chosen = FixedBitSet::with_capacity(sys.n);
    if let Some(f) = forced {
        chosen.insert(f);
    }
    loop {
        let mut counts = vec![0usize; sys.n];
        let mut any = false;
        for e in sys.uncovered(&chosen) {
            any = true;
            for &v in e {
                counts[v] += 1;
            }
        }
        if !any {
            break;
        }
        let best = (0..sys.n).max_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a))).unwrap();
        chosen.insert(best);
    }
    chosen.ones().collect()
}

/// Exact minimum hitting set containing `forced`, by branch and bound.
///
/// Among all minimum-size sets the lexicographically smallest is returned.
pub(crate) fn minimum(sys: &SetSystem, forced: Option<usize>, node_cap: u64) -> Result<Vec<usize>, Abort> {
    let mut budget = Budget { nodes: 0, cap: node_cap };
    let pre: Vec<usize> = forced.into_iter().collect();
    let greedy_size = greedy(sys, forced).len();
    let opt = optimize(sys, &pre, &full(sys.n), greedy_size + 1, &mut budget)?
        .expect("greedy solution bounds the optimum");
    let k = opt.len();

    // Build the lexicographically smallest optimum element by element: the
    // next element is the lowest `v` for which some size-k solution extends
    // the current prefix with `v` and uses nothing else below `v`.
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut lower = 0usize;
    while chosen.len() < k {
        let mut picked = None;
        for v in lower..sys.n {
            let mut pre = chosen.clone();
            pre.push(v);
            if let Some(f) = forced {
                if f > v {
                    pre.push(f);
                }
            }
            if pre.len() > k {
                continue;
            }
            let mut above = FixedBitSet::with_capacity(sys.n);
            above.insert_range(v + 1..);
            if optimize(sys, &pre, &above, k + 1, &mut budget)?.is_some() {
                picked = Some(v);
                break;
            }
        }
        // Some size-k solution always extends the prefix, so a pick exists.
        let v = picked.expect("prefix of an optimum is extendable");
        chosen.push(v);
        lower = v + 1;
    }
    debug_assert!(opt.len() == k && opt >= chosen);
    Ok(chosen)
}

fn full(n: usize) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(n);
    b.insert_range(..);
    b
}

/// Smallest hitting set that contains `pre`, uses only `allowed` vertices
/// besides `pre`, and has fewer than `upper` elements.
fn optimize(
    sys: &SetSystem,
    pre: &[usize],
    allowed: &FixedBitSet,
    upper: usize,
    budget: &mut Budget,
) -> Result<Option<Vec<usize>>, Abort> {
    let mut chosen = FixedBitSet::with_capacity(sys.n);
    chosen.extend(pre.iter().copied());
    let mut allowed = allowed.clone();
    let mut best: Option<Vec<usize>> = None;
    let mut bound = upper;
    let mut stack: Vec<usize> = pre.to_vec();
    branch(sys, &mut chosen, &mut stack, &mut allowed, &mut bound, &mut best, budget)?;
    Ok(best)
}

fn branch(
    sys: &SetSystem,
    chosen: &mut FixedBitSet,
    stack: &mut Vec<usize>,
    allowed: &mut FixedBitSet,
    bound: &mut usize,
    best: &mut Option<Vec<usize>>,
    budget: &mut Budget,
) -> Result<(), Abort> {
    budget.tick()?;
    if stack.len() + sys.disjoint_lower_bound(chosen, allowed) >= *bound {
        return Ok(());
    }
    // Branch on the uncovered edge with the fewest allowed vertices.
    let mut pick: Option<Vec<usize>> = None;
    for e in sys.uncovered(chosen) {
        let cand: Vec<usize> = e.iter().copied().filter(|&v| allowed.contains(v)).collect();
        if cand.is_empty() {
            return Ok(());
        }
        if pick.as_ref().is_none_or(|p| cand.len() < p.len()) {
            pick = Some(cand);
        }
    }
    let Some(cand) = pick else {
        let mut sol = stack.clone();
        sol.sort_unstable();
        *bound = sol.len();
        *best = Some(sol);
        return Ok(());
    };
    let mut excluded = Vec::new();
    for v in cand {
        chosen.insert(v);
        stack.push(v);
        let r = branch(sys, chosen, stack, allowed, bound, best, budget);
        stack.pop();
        chosen.set(v, false);
        if let Err(e) = r {
            for x in excluded {
                allowed.insert(x);
            }
            return Err(e);
        }
        // Later branches never use `v`: sets containing it were covered above.
        allowed.set(v, false);
        excluded.push(v);
    }
    for x in excluded {
        allowed.insert(x);
    }
    Ok(())
}

/// All inclusion-minimal hitting sets, each sorted, in generation order.
pub(crate) fn all_minimal(sys: &SetSystem, result_cap: usize, node_cap: u64) -> Result<Vec<Vec<usize>>, Abort> {
    let mut out = Vec::new();
    let mut chosen = FixedBitSet::with_capacity(sys.n);
    let mut stack = Vec::new();
    let mut allowed = full(sys.n);
    let mut budget = Budget { nodes: 0, cap: node_cap };
    enumerate(sys, &mut chosen, &mut stack, &mut allowed, &mut out, result_cap, &mut budget)?;
    Ok(out)
}

fn has_private_edges(sys: &SetSystem, chosen: &FixedBitSet, stack: &[usize]) -> bool {
    stack.iter().all(|&u| {
        sys.edges
            .iter()
            .any(|e| e.contains(&u) && e.iter().all(|&w| w == u || !chosen.contains(w)))
    })
}

fn enumerate(
    sys: &SetSystem,
    chosen: &mut FixedBitSet,
    stack: &mut Vec<usize>,
    allowed: &mut FixedBitSet,
    out: &mut Vec<Vec<usize>>,
    result_cap: usize,
    budget: &mut Budget,
) -> Result<(), Abort> {
    budget.tick()?;
    if !has_private_edges(sys, chosen, stack) {
        return Ok(());
    }
    let Some(edge) = sys.uncovered(chosen).next() else {
        if out.len() >= result_cap {
            return Err(Abort::Results(result_cap));
        }
        let mut sol = stack.clone();
        sol.sort_unstable();
        out.push(sol);
        return Ok(());
    };
    let cand: Vec<usize> = edge.iter().copied().filter(|&v| allowed.contains(v)).collect();
    let mut excluded = Vec::new();
    let mut result = Ok(());
    for v in cand {
        chosen.insert(v);
        stack.push(v);
        result = enumerate(sys, chosen, stack, allowed, out, result_cap, budget);
        stack.pop();
        chosen.set(v, false);
        if result.is_err() {
            break;
        }
        allowed.set(v, false);
        excluded.push(v);
    }
    for x in excluded {
        allowed.insert(x);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force: every subset, smallest first, lexicographic within a size.
    fn brute_minimum(sys: &SetSystem, forced: Option<usize>) -> Vec<usize> {
        let mut best: Option<Vec<usize>> = None;
        for mask in 0u32..(1 << sys.n) {
            let set: Vec<usize> = (0..sys.n).filter(|&i| mask & (1 << i) != 0).collect();
            if forced.is_some_and(|f| !set.contains(&f)) {
                continue;
            }
            if !sys.edges.iter().all(|e| e.iter().any(|v| set.contains(v))) {
                continue;
            }
            let better = match &best {
                None => true,
                Some(b) => set.len() < b.len() || (set.len() == b.len() && set < *b),
            };
            if better {
                best = Some(set);
            }
        }
        best.unwrap()
    }

    fn brute_minimal(sys: &SetSystem) -> Vec<Vec<usize>> {
        let hits = |set: &[usize]| sys.edges.iter().all(|e| e.iter().any(|v| set.contains(v)));
        let mut out = Vec::new();
        for mask in 0u32..(1 << sys.n) {
            let set: Vec<usize> = (0..sys.n).filter(|&i| mask & (1 << i) != 0).collect();
            if hits(&set)
                && set.iter().all(|x| {
                    let smaller: Vec<usize> = set.iter().copied().filter(|y| y != x).collect();
                    !hits(&smaller)
                })
            {
                out.push(set);
            }
        }
        out.sort();
        out
    }

    fn five_tuple_example() -> SetSystem {
        // A=0 B=1 C=2 D=3 E=4
        SetSystem { n: 5, edges: vec![vec![1, 4], vec![1, 2, 3], vec![0, 2]] }
    }

    #[test]
    fn five_tuple_minimum() {
        let sys = five_tuple_example();
        assert_eq!(minimum(&sys, None, 1000).unwrap(), vec![0, 1]);
        assert_eq!(brute_minimum(&sys, None), vec![0, 1]);
        assert_eq!(minimum(&sys, Some(4), 1000).unwrap(), brute_minimum(&sys, Some(4)));
    }

    #[test]
    fn five_tuple_minimal_sets() {
        let sys = five_tuple_example();
        let mut got = all_minimal(&sys, 100, 10_000).unwrap();
        got.sort();
        assert_eq!(got, brute_minimal(&sys));
        assert_eq!(got, vec![vec![0, 1], vec![0, 3, 4], vec![1, 2], vec![2, 4]]);
    }

    #[test]
    fn empty_system() {
        let sys = SetSystem { n: 3, edges: vec![] };
        assert!(minimum(&sys, None, 10).unwrap().is_empty());
        assert_eq!(minimum(&sys, Some(2), 10).unwrap(), vec![2]);
        assert_eq!(all_minimal(&sys, 10, 10).unwrap(), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn node_cap_aborts() {
        let edges = (0..10).map(|i| vec![2 * i, 2 * i + 1]).collect();
        let sys = SetSystem { n: 20, edges };
        assert_eq!(minimum(&sys, None, 3), Err(Abort::Nodes(3)));
        assert_eq!(all_minimal(&sys, 5, 1_000_000), Err(Abort::Results(5)));
    }

    #[test]
    fn greedy_breaks_ties_low() {
        let sys = five_tuple_example();
        assert_eq!(greedy(&sys, None), vec![0, 1]);
    }

    #[test]
    fn random_systems_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.gen_range(1..=9);
            let m = rng.gen_range(0..=7);
            let mut edges: Vec<Vec<usize>> = (0..m)
                .map(|_| {
                    let k = rng.gen_range(1..=3.min(n));
                    let mut e: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n)).collect();
                    e.sort();
                    e.dedup();
                    e
                })
                .collect();
            edges.dedup();
            let sys = SetSystem { n, edges };
            let forced = if rng.gen_bool(0.5) { Some(rng.gen_range(0..n)) } else { None };
            assert_eq!(minimum(&sys, forced, 1_000_000).unwrap(), brute_minimum(&sys, forced), "{sys:?} {forced:?}");
            let mut all = all_minimal(&sys, 10_000, 1_000_000).unwrap();
            all.sort();
            assert_eq!(all, brute_minimal(&sys), "{sys:?}");
        }
    }
}
