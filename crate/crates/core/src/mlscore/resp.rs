//! Generalized responsibility of a feature value for label 1.
//!
//! A contingency `(Γ, w̄)` changes the features in `Γ` to the values `w̄`
//! without changing the label. Its local score for `F*` is
//! `(1 - E_v[L(e^{Γ,w̄}[F* := v])]) / (1 + |Γ|)` with `v` drawn from the
//! marginal of `F*`. The global score takes the best local score among
//! contingencies of the smallest size that gives a positive one.

use num_traits::{One, Zero};

use super::{Classifier, Distribution, Entity, ScoreError};
use crate::config::Caps;
use crate::rational::Rational;

/// `(feature, new value)` pairs.
pub type Contingency = Vec<(usize, usize)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RespGlobal {
    pub score: Rational,
    /// A best contingency, first in enumeration order; `None` when the score is 0.
    pub contingency: Option<Contingency>,
    /// Largest contingency size examined.
    pub searched_up_to: usize,
    /// Whether every contingency size was examined.
    pub exhausted: bool,
}

fn expected_label(cl: &Classifier, marginal: &[Rational], x: &mut Entity, f: usize) -> Rational {
    let keep = x.0[f];
    let mut total = Rational::zero();
    for (v, p) in marginal.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        x.0[f] = v;
        if cl.label(x) {
            total += p;
        }
    }
    x.0[f] = keep;
    total
}

fn local(cl: &Classifier, marginal: &[Rational], x: &mut Entity, f: usize, size: usize) -> Rational {
    (Rational::one() - expected_label(cl, marginal, x, f)) / Rational::from_integer((size as i64 + 1).into())
}

/// Local responsibility of `feature` under the contingency `gamma`.
pub fn resp_local(
    cl: &Classifier,
    dist: &Distribution,
    e: &Entity,
    feature: usize,
    gamma: &[(usize, usize)],
) -> Result<Rational, ScoreError> {
    let space = cl.space();
    space.check(e)?;
    if feature >= space.len() {
        return Err(ScoreError::UnknownFeature(format!("#{feature}")));
    }
    if !cl.label(e) {
        return Err(ScoreError::LabelNotOne);
    }
    let mut x = e.clone();
    let mut seen = vec![false; space.len()];
    for &(f, v) in gamma {
        if f >= space.len() {
            return Err(ScoreError::UnknownFeature(format!("#{f}")));
        }
        let name = space.name(f).to_string();
        if f == feature {
            return Err(ScoreError::FeatureInContingency(name));
        }
        if std::mem::replace(&mut seen[f], true) {
            return Err(ScoreError::RepeatedContingencyFeature(name));
        }
        if v >= space.domain(f).len() {
            return Err(ScoreError::UnknownValue { feature: name, value: format!("#{v}") });
        }
        if v == e.0[f] {
            return Err(ScoreError::ValueNotChanged(name));
        }
        x.0[f] = v;
    }
    if !cl.label(&x) {
        return Err(ScoreError::ContingencyFlipsLabel);
    }
    let marginal = dist.marginal(space, feature);
    Ok(local(cl, &marginal, &mut x, feature, gamma.len()))
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order; stops
/// when `f` returns an error.
fn for_each_subset<E>(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> Result<(), E>) -> Result<(), E> {
    if k > n {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx)?;
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return Ok(());
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Global responsibility of `feature` by iterative deepening on `|Γ|`.
pub fn resp_global(
    cl: &Classifier,
    dist: &Distribution,
    e: &Entity,
    feature: usize,
    caps: &Caps,
) -> Result<RespGlobal, ScoreError> {
    let space = cl.space();
    space.check(e)?;
    if feature >= space.len() {
        return Err(ScoreError::UnknownFeature(format!("#{feature}")));
    }
    if !cl.label(e) {
        return Err(ScoreError::LabelNotOne);
    }
    let marginal = dist.marginal(space, feature);
    let others: Vec<usize> = (0..space.len()).filter(|&f| f != feature).collect();
    let max_size = caps.max_contingency.min(others.len());
    let mut visited = 0u64;

    for size in 0..=max_size {
        let mut best: Option<(Rational, Contingency)> = None;
        for_each_subset(others.len(), size, |pick| {
            let feats: Vec<usize> = pick.iter().map(|&i| others[i]).collect();
            // Alternatives for each chosen feature: every value but e's.
            let alts: Vec<Vec<usize>> = feats
                .iter()
                .map(|&f| (0..space.domain(f).len()).filter(|&v| v != e.0[f]).collect())
                .collect();
            if alts.iter().any(Vec::is_empty) {
                return Ok(());
            }
            let mut choice = vec![0usize; size];
            let mut x = e.clone();
            loop {
                visited += 1;
                if visited > caps.contingency_candidates {
                    // Smaller sizes scored 0, so the best so far is this level's.
                    return Err(ScoreError::SearchCapExceeded {
                        cap: caps.contingency_candidates,
                        best_so_far: best.as_ref().map_or(Rational::zero(), |b| b.0.clone()),
                    });
                }
                for (i, &f) in feats.iter().enumerate() {
                    x.0[f] = alts[i][choice[i]];
                }
                if cl.label(&x) {
                    let v = local(cl, &marginal, &mut x, feature, size);
                    if v > Rational::zero() && best.as_ref().is_none_or(|b| v > b.0) {
                        let gamma = feats.iter().map(|&f| (f, x.0[f])).collect();
                        best = Some((v, gamma));
                    }
                }
                // Odometer over the alternatives, last feature fastest.
                let Some(i) = (0..size).rev().find(|&i| choice[i] + 1 < alts[i].len()) else {
                    break;
                };
                choice[i] += 1;
                for c in &mut choice[i + 1..] {
                    *c = 0;
                }
            }
            Ok(())
        })?;
        if let Some((score, gamma)) = best {
            return Ok(RespGlobal { score, contingency: Some(gamma), searched_up_to: size, exhausted: false });
        }
    }
    Ok(RespGlobal {
        score: Rational::zero(),
        contingency: None,
        searched_up_to: max_size,
        exhausted: max_size == others.len(),
    })
}
