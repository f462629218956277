//! Information content, entropy, information gain and gain ratio.

use crate::dataset::{AttrKind, Relation};
use crate::error::{Error, Result};
use crate::num::Scalar;

/// `-Σ p·log2(p)` in bits, with `0·log2(0) = 0`.
pub fn information_content<T: Scalar>(probs: &[T]) -> Result<T> {
    let tol = T::from_f64_lossy(1e-9).max(T::epsilon() * T::from_count(16));
    let mut sum = T::zero();
    for &p in probs {
        if !p.is_finite() || p < -tol || p > T::one() + tol {
            return Err(Error::InvalidArgument(format!("probability {p} outside [0,1]")));
        }
        sum += p;
    }
    if (sum - T::one()).abs() > tol {
        return Err(Error::InvalidArgument(format!("probabilities sum to {sum}, not 1")));
    }
    let bits = probs
        .iter()
        .filter(|&&p| p > T::zero())
        .map(|&p| -p * p.log2())
        .sum::<T>();
    Ok(bits.max(T::zero()))
}

/// Entropy of a count vector, in bits. Empty vectors have zero entropy.
pub(crate) fn counts_entropy<T: Scalar>(counts: &[usize]) -> T {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return T::zero();
    }
    let total = T::from_count(total);
    let bits = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = T::from_count(c) / total;
            -p * p.log2()
        })
        .sum::<T>();
    bits.max(T::zero())
}

/// Gain of a partition given per-branch class counts: `E(S) - Σ |S_v|/|S| E(S_v)`.
pub(crate) fn partition_gain<T: Scalar>(parent: &[usize], branches: &[Vec<usize>]) -> T {
    let total: usize = parent.iter().sum();
    if total == 0 {
        return T::zero();
    }
    let total_t = T::from_count(total);
    let remainder = branches
        .iter()
        .map(|b| {
            let size: usize = b.iter().sum();
            T::from_count(size) / total_t * counts_entropy::<T>(b)
        })
        .sum::<T>();
    (counts_entropy::<T>(parent) - remainder).max(T::zero())
}

pub(crate) fn split_information<T: Scalar>(branches: &[Vec<usize>]) -> T {
    let sizes: Vec<usize> = branches.iter().map(|b| b.iter().sum()).collect();
    counts_entropy(&sizes)
}

fn class_column(rel: &Relation, class_attr: &str) -> Result<(Vec<usize>, usize)> {
    let attr = rel.attribute(class_attr)?;
    let levels = match &attr.kind {
        AttrKind::Categorical(levels) => levels.len(),
        kind => {
            return Err(Error::KindMismatch {
                attr: class_attr.to_string(),
                expected: "categorical",
                found: kind.name(),
            })
        }
    };
    Ok((rel.category_column(class_attr)?, levels))
}

fn tally(classes: &[usize], n_classes: usize) -> Vec<usize> {
    let mut counts = vec![0; n_classes];
    for &c in classes {
        counts[c] += 1;
    }
    counts
}

/// Empirical class entropy of a relation.
pub fn entropy<T: Scalar>(rel: &Relation, class_attr: &str) -> Result<T> {
    let (classes, n) = class_column(rel, class_attr)?;
    Ok(counts_entropy(&tally(&classes, n)))
}

fn categorical_branches(rel: &Relation, class_attr: &str, attr: &str) -> Result<(Vec<usize>, Vec<Vec<usize>>)> {
    if attr == class_attr {
        return Err(Error::InvalidArgument(format!(
            "predictor {attr} is the class attribute"
        )));
    }
    let (classes, n) = class_column(rel, class_attr)?;
    let schema_attr = rel.attribute(attr)?;
    let levels = schema_attr.levels().ok_or_else(|| Error::KindMismatch {
        attr: attr.to_string(),
        expected: "categorical",
        found: schema_attr.kind.name(),
    })?;
    let values = rel.category_column(attr)?;
    let mut branches = vec![vec![0usize; n]; levels.len()];
    for (&v, &c) in values.iter().zip(&classes) {
        branches[v][c] += 1;
    }
    branches.retain(|b| b.iter().any(|&x| x > 0));
    Ok((tally(&classes, n), branches))
}

/// Information gain of splitting on a categorical attribute.
pub fn info_gain<T: Scalar>(rel: &Relation, class_attr: &str, attr: &str) -> Result<T> {
    let (parent, branches) = categorical_branches(rel, class_attr, attr)?;
    Ok(partition_gain(&parent, &branches))
}

/// Information gain divided by the split information of the branch sizes.
pub fn gain_ratio<T: Scalar>(rel: &Relation, class_attr: &str, attr: &str) -> Result<T> {
    let (parent, branches) = categorical_branches(rel, class_attr, attr)?;
    let split = split_information::<T>(&branches);
    if split <= T::zero() {
        return Err(Error::ZeroSplitInfo(attr.to_string()));
    }
    Ok(partition_gain::<T>(&parent, &branches) / split)
}

/// Result of scanning the midpoints of one continuous attribute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ThresholdScan<T> {
    pub cut: f64,
    pub gain: T,
    pub split_info: T,
}

/// Scans every midpoint between consecutive distinct values of `values`
/// (paired with `classes`) and keeps the highest-gain cut; ties keep the
/// smaller cut. Returns `None` when fewer than two distinct values exist.
pub(crate) fn scan_thresholds<T: Scalar>(
    values: &[f64],
    classes: &[usize],
    n_classes: usize,
) -> Option<ThresholdScan<T>> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let parent = tally(classes, n_classes);
    let mut below = vec![0usize; n_classes];
    let mut best: Option<ThresholdScan<T>> = None;
    for w in 0..order.len().saturating_sub(1) {
        below[classes[order[w]]] += 1;
        let (lo, hi) = (values[order[w]], values[order[w + 1]]);
        if lo == hi {
            continue;
        }
        let above: Vec<usize> = parent.iter().zip(&below).map(|(p, b)| p - b).collect();
        let branches = [below.clone(), above];
        let gain = partition_gain::<T>(&parent, &branches);
        if best.is_none_or(|b| gain > b.gain + T::TIE_EPS) {
            best = Some(ThresholdScan {
                cut: lo + (hi - lo) / 2.0,
                gain,
                split_info: split_information(&branches),
            });
        }
    }
    best
}

/// Best midpoint cut for a continuous attribute and its information gain.
pub fn best_threshold<T: Scalar>(rel: &Relation, class_attr: &str, attr: &str) -> Result<(f64, T)> {
    if attr == class_attr {
        return Err(Error::InvalidArgument(format!(
            "predictor {attr} is the class attribute"
        )));
    }
    let (classes, n) = class_column(rel, class_attr)?;
    let values = rel.numeric_column(attr)?;
    scan_thresholds::<T>(&values, &classes, n)
        .map(|s| (s.cut, s.gain))
        .ok_or_else(|| Error::InvalidArgument(format!("{attr} has fewer than two distinct values")))
}
