use std::collections::HashSet;

use serde::Serialize;

use super::ddbc::{validate_ddbc, Ddbc, ValidateOptions};
use super::{CircuitBuilder, CircuitError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DtNode {
    Leaf(bool),
    /// `children[i]` is taken when the feature has its `i`-th domain value.
    Split { feature: usize, children: Vec<usize> },
}

/// Decision tree over finite-domain features; nodes may be shared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTree {
    features: Vec<String>,
    domains: Vec<Vec<String>>,
    nodes: Vec<DtNode>,
    labels: Vec<String>,
    root: usize,
}

impl DecisionTree {
    /// Checks totality of every split, acyclicity and that no feature
    /// repeats on a root-to-leaf path.
    pub fn new(
        features: Vec<(String, Vec<String>)>,
        nodes: Vec<(String, DtNode)>,
        root: usize,
    ) -> Result<Self, CircuitError> {
        for (i, (f, dom)) in features.iter().enumerate() {
            if features[..i].iter().any(|(g, _)| g == f) {
                return Err(CircuitError::DuplicateFeature(f.clone()));
            }
            if dom.is_empty() {
                return Err(CircuitError::EmptyDomain(f.clone()));
            }
            for (j, v) in dom.iter().enumerate() {
                if dom[..j].contains(v) {
                    return Err(CircuitError::MalformedTree(format!("value `{v}` repeats in the domain of `{f}`")));
                }
            }
        }
        let (features, domains): (Vec<String>, Vec<Vec<String>>) = features.into_iter().unzip();
        let (labels, nodes): (Vec<String>, Vec<DtNode>) = nodes.into_iter().unzip();
        if root >= nodes.len() {
            return Err(CircuitError::MalformedTree(format!("root #{root} does not exist")));
        }
        for (i, n) in nodes.iter().enumerate() {
            if let DtNode::Split { feature, children } = n {
                let dom = domains
                    .get(*feature)
                    .ok_or_else(|| CircuitError::UnknownFeature(format!("#{feature}")))?;
                if children.len() != dom.len() {
                    return Err(CircuitError::PartialSplit {
                        node: labels[i].clone(),
                        feature: features[*feature].clone(),
                        value: dom[children.len().min(dom.len() - 1)].clone(),
                    });
                }
                if let Some(&c) = children.iter().find(|&&c| c >= nodes.len()) {
                    return Err(CircuitError::MalformedTree(format!("node `{}` points to missing #{c}", labels[i])));
                }
            }
        }
        let t = DecisionTree { features, domains, nodes, labels, root };
        t.check_paths()?;
        Ok(t)
    }

    fn check_paths(&self) -> Result<(), CircuitError> {
        // DFS from the root; `on_path[f]` marks features tested above.
        // Revisits of a node are only pruned once its subtree is known to be
        // fine under the same set of path features.
        enum Step {
            Enter(usize),
            Leave(usize),
        }
        let mut on_path = vec![false; self.features.len()];
        let mut on_stack = vec![false; self.nodes.len()];
        let mut done: HashSet<(usize, Vec<bool>)> = HashSet::new();
        let mut stack = vec![Step::Enter(self.root)];
        while let Some(step) = stack.pop() {
            match step {
                Step::Enter(n) => {
                    if on_stack[n] {
                        return Err(CircuitError::Cycle(self.labels[n].clone()));
                    }
                    if done.contains(&(n, on_path.clone())) {
                        continue;
                    }
                    if let DtNode::Split { feature, children } = &self.nodes[n] {
                        if on_path[*feature] {
                            return Err(CircuitError::RepeatedFeature {
                                node: self.labels[n].clone(),
                                feature: self.features[*feature].clone(),
                            });
                        }
                        on_stack[n] = true;
                        on_path[*feature] = true;
                        stack.push(Step::Leave(n));
                        stack.extend(children.iter().rev().map(|&c| Step::Enter(c)));
                    }
                }
                Step::Leave(n) => {
                    on_stack[n] = false;
                    if let DtNode::Split { feature, .. } = &self.nodes[n] {
                        on_path[*feature] = false;
                    }
                    done.insert((n, on_path.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn domain(&self, feature: usize) -> &[String] {
        &self.domains[feature]
    }

    pub fn domains(&self) -> &[Vec<String>] {
        &self.domains
    }

    pub fn nodes(&self) -> &[DtNode] {
        &self.nodes
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f == name)
    }

    /// Label of the entity whose `i`-th feature takes domain value `values[i]`.
    pub fn evaluate(&self, values: &[usize]) -> bool {
        let mut n = self.root;
        loop {
            match &self.nodes[n] {
                DtNode::Leaf(b) => return *b,
                DtNode::Split { feature, children } => n = children[values[*feature]],
            }
        }
    }

    /// Index of the value `1` in a `{0,1}` domain, `None` if not Boolean.
    fn true_index(&self, feature: usize) -> Option<usize> {
        match self.domains[feature].iter().map(String::as_str).collect::<Vec<_>>()[..] {
            ["0", "1"] => Some(1),
            ["1", "0"] => Some(0),
            _ => None,
        }
    }

    pub fn is_boolean(&self) -> bool {
        (0..self.features.len()).all(|f| self.true_index(f).is_some())
    }
}

/// Appends nodes bottom-up.
#[derive(Debug, Clone)]
pub struct TreeBuilder {
    features: Vec<(String, Vec<String>)>,
    nodes: Vec<(String, DtNode)>,
}

impl TreeBuilder {
    pub fn new(features: Vec<(String, Vec<String>)>) -> Self {
        TreeBuilder { features, nodes: Vec::new() }
    }

    /// All features Boolean with domain `["0", "1"]`.
    pub fn boolean<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Self::new(names.into_iter().map(|n| (n.into(), vec!["0".to_string(), "1".to_string()])).collect())
    }

    pub fn leaf(&mut self, label: bool) -> usize {
        self.nodes.push((format!("n{}", self.nodes.len()), DtNode::Leaf(label)));
        self.nodes.len() - 1
    }

    pub fn split(&mut self, feature: &str, children: Vec<usize>) -> Result<usize, CircuitError> {
        let f = self
            .features
            .iter()
            .position(|(g, _)| g == feature)
            .ok_or_else(|| CircuitError::UnknownFeature(feature.to_string()))?;
        self.nodes.push((format!("n{}", self.nodes.len()), DtNode::Split { feature: f, children }));
        Ok(self.nodes.len() - 1)
    }

    pub fn build(self, root: usize) -> Result<DecisionTree, CircuitError> {
        DecisionTree::new(self.features, self.nodes, root)
    }
}

/// Indicator features standing for one original feature; exactly one is 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactlyOne {
    pub feature: String,
    pub indicators: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinarizedTree {
    pub tree: DecisionTree,
    pub exactly_one: Vec<ExactlyOne>,
    /// Per binary feature: (original feature, value index it tests), or
    /// `None` for a Boolean feature kept as it was.
    source: Vec<(usize, Option<usize>)>,
    /// Per original Boolean feature kept as is, the index of value `1`.
    true_index: Vec<Option<usize>>,
}

impl BinarizedTree {
    /// Binary values (`0`/`1` as domain indices of `["0","1"]`) of an
    /// original entity.
    pub fn encode(&self, values: &[usize]) -> Vec<usize> {
        self.source
            .iter()
            .map(|&(f, v)| match v {
                Some(v) => usize::from(values[f] == v),
                None => usize::from(Some(values[f]) == self.true_index[f]),
            })
            .collect()
    }
}

/// Replaces every non-Boolean feature `F` with indicators `F=v`, one per
/// domain value. A split on `F` becomes a chain of tests on the indicators
/// of its first `k-1` values; the last value is the fall-through.
pub fn binarize_dt(t: &DecisionTree) -> Result<BinarizedTree, CircuitError> {
    let mut features: Vec<(String, Vec<String>)> = Vec::new();
    let mut source = Vec::new();
    let mut exactly_one = Vec::new();
    // original feature -> first binary feature
    let mut first = Vec::with_capacity(t.features.len());
    let bin = || vec!["0".to_string(), "1".to_string()];
    for (f, name) in t.features.iter().enumerate() {
        first.push(features.len());
        if t.true_index(f).is_some() {
            features.push((name.clone(), bin()));
            source.push((f, None));
        } else {
            let mut group = Vec::new();
            for (v, value) in t.domains[f].iter().enumerate() {
                let ind = format!("{name}={value}");
                if t.features.contains(&ind) {
                    return Err(CircuitError::DuplicateFeature(ind));
                }
                features.push((ind.clone(), bin()));
                source.push((f, Some(v)));
                group.push(ind);
            }
            exactly_one.push(ExactlyOne { feature: name.clone(), indicators: group });
        }
    }

    let mut nodes: Vec<(String, DtNode)> = Vec::new();
    let mut map = vec![usize::MAX; t.nodes.len()];
    for n in topo_order(t) {
        let node = match &t.nodes[n] {
            DtNode::Leaf(b) => DtNode::Leaf(*b),
            DtNode::Split { feature, children } => match t.true_index(*feature) {
                Some(one) => {
                    let (c0, c1) = (map[children[1 - one]], map[children[one]]);
                    DtNode::Split { feature: first[*feature], children: vec![c0, c1] }
                }
                None if children.len() == 1 => {
                    // A one-value domain never discriminates.
                    map[n] = map[children[0]];
                    continue;
                }
                None => {
                    let k = children.len();
                    let mut next = map[children[k - 1]];
                    for v in (1..k - 1).rev() {
                        nodes.push((
                            format!("{}/{}", t.labels[n], t.domains[*feature][v]),
                            DtNode::Split { feature: first[*feature] + v, children: vec![next, map[children[v]]] },
                        ));
                        next = nodes.len() - 1;
                    }
                    DtNode::Split { feature: first[*feature], children: vec![next, map[children[0]]] }
                }
            },
        };
        nodes.push((t.labels[n].clone(), node));
        map[n] = nodes.len() - 1;
    }
    let true_index = (0..t.features.len()).map(|f| t.true_index(f)).collect();
    let tree = DecisionTree::new(features, nodes, map[t.root])?;
    Ok(BinarizedTree { tree, exactly_one, source, true_index })
}

/// Nodes reachable from the root, children before parents.
fn topo_order(t: &DecisionTree) -> Vec<usize> {
    let mut seen = vec![false; t.nodes.len()];
    let mut order = Vec::new();
    let mut stack = vec![(t.root, false)];
    while let Some((n, expanded)) = stack.pop() {
        if expanded {
            order.push(n);
            continue;
        }
        if seen[n] {
            continue;
        }
        seen[n] = true;
        stack.push((n, true));
        if let DtNode::Split { children, .. } = &t.nodes[n] {
            stack.extend(children.iter().filter(|&&c| !seen[c]).map(|&c| (c, false)));
        }
    }
    order
}

/// Compiles a Boolean-feature tree into a dDBC with the same truth table.
/// Node `n` testing `F` becomes `OR(AND(NOT F, c(n₀)), AND(F, c(n₁)))`.
pub fn compile_dt(t: &DecisionTree) -> Result<Ddbc, CircuitError> {
    if let Some(f) = (0..t.features.len()).find(|&f| t.true_index(f).is_none()) {
        return Err(CircuitError::NotBinary(t.features[f].clone()));
    }
    let mut b = CircuitBuilder::new(t.features.iter().cloned())?;
    let mut gate = vec![usize::MAX; t.nodes.len()];
    for n in topo_order(t) {
        gate[n] = match &t.nodes[n] {
            DtNode::Leaf(v) => b.constant(*v),
            DtNode::Split { feature, children } => {
                let one = t.true_index(*feature).expect("checked above");
                let x = b.var(&t.features[*feature])?;
                let nx = b.not(x);
                let lo = b.and(vec![nx, gate[children[1 - one]]]);
                let hi = b.and(vec![x, gate[children[one]]]);
                b.or(vec![lo, hi])
            }
        };
    }
    let c = b.build(gate[t.root])?;
    validate_ddbc(&c, &ValidateOptions::default())
}
