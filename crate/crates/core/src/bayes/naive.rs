use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::net::{align, BayesNet, Cpt, Dag, Variable};
use crate::dataset::{AttrKind, Relation};
use crate::error::{Error, Result};
use crate::num::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct NbFeature<T> {
    pub name: String,
    pub levels: Vec<String>,
    /// `table[class][level]` = P(level | class).
    pub table: Vec<Vec<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct NaiveBayesModel<T> {
    pub class_attr: String,
    pub classes: Vec<String>,
    pub priors: Vec<T>,
    pub features: Vec<NbFeature<T>>,
    pub smoothing: f64,
}

fn levels_of<'a>(rel: &'a Relation, name: &str) -> Result<&'a [String]> {
    let attr = rel.attribute(name)?;
    match &attr.kind {
        AttrKind::Categorical(levels) => Ok(levels),
        kind => Err(Error::KindMismatch {
            attr: name.to_string(),
            expected: "categorical",
            found: kind.name(),
        }),
    }
}

/// Relative frequencies with additive smoothing `α`:
/// `(count + α) / (total + α·levels)`.
pub fn fit_naive_bayes<T: Scalar>(
    rel: &Relation,
    class_attr: &str,
    features: &[&str],
    smoothing: f64,
) -> Result<NaiveBayesModel<T>> {
    if !(smoothing >= 0.0 && smoothing.is_finite()) {
        return Err(Error::InvalidArgument(format!("smoothing {smoothing} must be >= 0")));
    }
    if rel.is_empty() {
        return Err(Error::InvalidArgument("cannot fit on an empty relation".into()));
    }
    let classes = levels_of(rel, class_attr)?;
    let class_col = rel.category_column(class_attr)?;
    let mut class_counts = vec![0usize; classes.len()];
    for &c in &class_col {
        class_counts[c] += 1;
    }
    if smoothing == 0.0 {
        if let Some(c) = class_counts.iter().position(|&n| n == 0) {
            return Err(Error::InvalidArgument(format!(
                "class level {} of {class_attr} never occurs; use smoothing > 0",
                classes[c]
            )));
        }
    }
    let alpha = T::from_f64_lossy(smoothing);
    let ratio = |count: usize, total: usize, k: usize| {
        (T::from_count(count) + alpha) / (T::from_count(total) + alpha * T::from_count(k))
    };
    let priors = class_counts
        .iter()
        .map(|&n| ratio(n, rel.len(), classes.len()))
        .collect();

    let mut fitted = Vec::with_capacity(features.len());
    for &f in features {
        if f == class_attr {
            return Err(Error::InvalidArgument(format!("feature {f} is the class attribute")));
        }
        let levels = levels_of(rel, f)?;
        let col = rel.category_column(f)?;
        let mut counts = vec![vec![0usize; levels.len()]; classes.len()];
        for (&c, &v) in class_col.iter().zip(&col) {
            counts[c][v] += 1;
        }
        let table = counts
            .iter()
            .zip(&class_counts)
            .map(|(row, &total)| row.iter().map(|&n| ratio(n, total, levels.len())).collect())
            .collect();
        fitted.push(NbFeature {
            name: f.to_string(),
            levels: levels.to_vec(),
            table,
        });
    }
    Ok(NaiveBayesModel {
        class_attr: class_attr.to_string(),
        classes: classes.to_vec(),
        priors,
        features: fitted,
        smoothing,
    })
}

fn is_flag(levels: &[String]) -> bool {
    levels.len() == 2 && levels.iter().any(|l| l == "SI") && levels.iter().any(|l| l == "NO")
}

impl<T: Scalar> NaiveBayesModel<T> {
    /// Normalized `prior × Π P(feature | class)`.
    pub fn posterior(&self, record: &BTreeMap<String, String>) -> Result<Vec<T>> {
        let mut picks = Vec::with_capacity(self.features.len());
        for f in &self.features {
            let state = record
                .get(&f.name)
                .ok_or_else(|| Error::InvalidArgument(format!("record lacks feature {}", f.name)))?;
            let idx = f
                .levels
                .iter()
                .position(|l| l == state)
                .ok_or_else(|| Error::InvalidArgument(format!("feature {} has no level {state}", f.name)))?;
            picks.push(idx);
        }
        let scores: Vec<T> = (0..self.classes.len())
            .map(|c| {
                self.features
                    .iter()
                    .zip(&picks)
                    .fold(self.priors[c], |acc, (f, &l)| acc * f.table[c][l])
            })
            .collect();
        let total: T = scores.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(Error::ZeroProbability);
        }
        Ok(scores.into_iter().map(|s| s / total).collect())
    }

    /// Columns as printed by [`report`](Self::report): `(feature, level)`.
    pub fn report_columns(&self) -> Vec<(usize, usize)> {
        let mut cols = Vec::new();
        for (i, f) in self.features.iter().enumerate() {
            if is_flag(&f.levels) {
                cols.push((i, f.levels.iter().position(|l| l == "SI").unwrap()));
            } else {
                cols.extend((0..f.levels.len()).map(|l| (i, l)));
            }
        }
        cols
    }

    /// One row per class state, three decimals. SI/NO features show only
    /// the SI column.
    pub fn report(&self) -> String {
        let cols = self.report_columns();
        let mut header = vec![format!("attribute {}", self.class_attr)];
        for &(i, l) in &cols {
            let f = &self.features[i];
            header.push(if is_flag(&f.levels) {
                f.name.clone()
            } else {
                format!("{}={}", f.name, f.levels[l])
            });
        }
        let mut rows = vec![header];
        for (c, class) in self.classes.iter().enumerate() {
            let mut row = vec![format!("P({class}|X)")];
            row.extend(
                cols.iter()
                    .map(|&(i, l)| format!("{:.3}", self.features[i].table[c][l].as_f64())),
            );
            rows.push(row);
        }
        align(&rows)
    }

    /// Star network: the class is the only root and every feature hangs
    /// off it, in model order.
    pub fn to_bayes_net(&self) -> Result<BayesNet<T>> {
        let mut nodes = vec![Variable::new(self.class_attr.clone(), self.classes.clone())];
        nodes.extend(
            self.features
                .iter()
                .map(|f| Variable::new(f.name.clone(), f.levels.clone())),
        );
        let arcs: Vec<(&str, &str)> = self
            .features
            .iter()
            .map(|f| (self.class_attr.as_str(), f.name.as_str()))
            .collect();
        let dag = Dag::new(nodes, &arcs)?;
        let mut cpts = vec![Cpt {
            node: self.class_attr.clone(),
            parents: vec![],
            rows: vec![self.priors.clone()],
        }];
        cpts.extend(self.features.iter().map(|f| Cpt {
            node: f.name.clone(),
            parents: vec![self.class_attr.clone()],
            rows: f.table.clone(),
        }));
        BayesNet::new(dag, cpts)
    }
}

pub fn nb_report<T: Scalar>(model: &NaiveBayesModel<T>) -> String {
    model.report()
}

pub fn nb_posterior<T: Scalar>(model: &NaiveBayesModel<T>, record: &BTreeMap<String, String>) -> Result<Vec<T>> {
    model.posterior(record)
}
