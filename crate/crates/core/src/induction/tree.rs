use std::fmt;

use serde::{Deserialize, Serialize};

use super::criteria::{counts_entropy, partition_gain, scan_thresholds, split_information};
use crate::dataset::{AttrKind, AttributeSchema, Relation, Value};
use crate::dot::DotWriter;
use crate::error::{Error, Result};
use crate::num::{format_sig12, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Categorical predictors only, plain information gain.
    Id3,
    /// Mixed predictors; continuous ones split at the best midpoint.
    #[default]
    C45,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    #[default]
    GainRatio,
    Gain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct InduceConfig {
    pub variant: Variant,
    /// Selection criterion for C4.5; ID3 always uses plain gain.
    pub criterion: Criterion,
    pub min_support: usize,
    pub max_depth: Option<usize>,
    /// Predictor columns; `None` means every mining-relevant column except
    /// the class (categorical ones only for ID3).
    pub predictors: Option<Vec<String>>,
}

impl Default for InduceConfig {
    fn default() -> Self {
        InduceConfig {
            variant: Variant::C45,
            criterion: Criterion::GainRatio,
            min_support: 2,
            max_depth: None,
            predictors: None,
        }
    }
}

impl InduceConfig {
    pub fn id3() -> Self {
        InduceConfig {
            variant: Variant::Id3,
            criterion: Criterion::Gain,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SplitTest {
    Categorical { attr: String },
    Threshold { attr: String, cut: f64 },
}

impl SplitTest {
    pub fn attr(&self) -> &str {
        match self {
            SplitTest::Categorical { attr } | SplitTest::Threshold { attr, .. } => attr,
        }
    }
}

/// One literal of a root-to-leaf path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum BranchTest {
    Below { attr: String, cut: f64 },
    AtLeast { attr: String, cut: f64 },
    Equals { attr: String, level: String },
}

impl BranchTest {
    pub fn attr(&self) -> &str {
        match self {
            BranchTest::Below { attr, .. } | BranchTest::AtLeast { attr, .. } | BranchTest::Equals { attr, .. } => attr,
        }
    }

    /// The branch label without the attribute name, e.g. `< 1972.5`.
    pub fn edge_label(&self) -> String {
        match self {
            BranchTest::Below { cut, .. } => format!("< {}", format_sig12(*cut)),
            BranchTest::AtLeast { cut, .. } => format!(">= {}", format_sig12(*cut)),
            BranchTest::Equals { level, .. } => format!("= {level}"),
        }
    }
}

impl fmt::Display for BranchTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.attr(), self.edge_label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Branch<T> {
    pub test: BranchTest,
    pub node: Node<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", bound = "T: Scalar")]
pub enum Node<T> {
    Leaf {
        class: String,
        support: usize,
        purity: T,
        distribution: Vec<usize>,
    },
    Internal {
        split: SplitTest,
        /// Information gain of the split, in bits.
        gain: T,
        /// Value of the selection criterion (gain or gain ratio).
        score: T,
        /// Majority class, used for category levels never seen in training.
        class: String,
        support: usize,
        distribution: Vec<usize>,
        branches: Vec<Branch<T>>,
    },
}

impl<T: Scalar> Node<T> {
    pub fn support(&self) -> usize {
        match self {
            Node::Leaf { support, .. } | Node::Internal { support, .. } => *support,
        }
    }

    pub fn distribution(&self) -> &[usize] {
        match self {
            Node::Leaf { distribution, .. } | Node::Internal { distribution, .. } => distribution,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DecisionTree<T> {
    pub class_attr: String,
    pub classes: Vec<String>,
    pub config: InduceConfig,
    pub root: Node<T>,
}

enum Column<'a> {
    Categorical { levels: &'a [String], data: Vec<usize> },
    Continuous(Vec<f64>),
}

struct Predictor<'a> {
    name: &'a str,
    column: Column<'a>,
}

struct Grower<'a, T> {
    predictors: Vec<Predictor<'a>>,
    classes: Vec<usize>,
    class_names: &'a [String],
    config: &'a InduceConfig,
    _scalar: std::marker::PhantomData<T>,
}

enum Candidate {
    Categorical(usize),
    Threshold(usize, f64),
}

impl<T: Scalar> Grower<'_, T> {
    fn tally(&self, rows: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.class_names.len()];
        for &r in rows {
            counts[self.classes[r]] += 1;
        }
        counts
    }

    fn criterion(&self, gain: T, split_info: T) -> T {
        match (self.config.variant, self.config.criterion) {
            (Variant::C45, Criterion::GainRatio) if split_info > T::zero() => gain / split_info,
            (Variant::C45, Criterion::GainRatio) => T::zero(),
            _ => gain,
        }
    }

    fn grow(&self, rows: &[usize], available: &[bool], depth: usize) -> Node<T> {
        let distribution = self.tally(rows);
        let majority = majority(&distribution);
        let support = rows.len();
        let class = self.class_names[majority].clone();
        let leaf = |distribution: Vec<usize>| Node::Leaf {
            purity: T::from_count(distribution[majority]) / T::from_count(support.max(1)),
            class: class.clone(),
            support,
            distribution,
        };

        let pure = distribution[majority] == support;
        let depth_reached = self.config.max_depth.is_some_and(|d| depth >= d);
        if pure || support < self.config.min_support || depth_reached {
            return leaf(distribution);
        }

        let mut best: Option<(T, T, Candidate)> = None;
        for (p, pred) in self.predictors.iter().enumerate() {
            if !available[p] {
                continue;
            }
            let scored = match &pred.column {
                Column::Categorical { levels, data } => {
                    let mut branches = vec![vec![0usize; self.class_names.len()]; levels.len()];
                    for &r in rows {
                        branches[data[r]][self.classes[r]] += 1;
                    }
                    branches.retain(|b| b.iter().any(|&c| c > 0));
                    if branches.len() < 2 {
                        continue;
                    }
                    let gain = partition_gain::<T>(&distribution, &branches);
                    let score = self.criterion(gain, split_information(&branches));
                    (score, gain, Candidate::Categorical(p))
                }
                Column::Continuous(values) => {
                    let vals: Vec<f64> = rows.iter().map(|&r| values[r]).collect();
                    let cls: Vec<usize> = rows.iter().map(|&r| self.classes[r]).collect();
                    let Some(scan) = scan_thresholds::<T>(&vals, &cls, self.class_names.len()) else {
                        continue;
                    };
                    let score = self.criterion(scan.gain, scan.split_info);
                    (score, scan.gain, Candidate::Threshold(p, scan.cut))
                }
            };
            if best.as_ref().is_none_or(|b| scored.0 > b.0 + T::TIE_EPS) {
                best = Some(scored);
            }
        }

        let Some((score, gain, candidate)) = best else {
            return leaf(distribution);
        };
        if gain <= T::TIE_EPS {
            return leaf(distribution);
        }

        let (split, parts): (SplitTest, Vec<(BranchTest, Vec<usize>)>) = match candidate {
            Candidate::Categorical(p) => {
                let pred = &self.predictors[p];
                let Column::Categorical { levels, data } = &pred.column else {
                    unreachable!()
                };
                let mut groups = vec![Vec::new(); levels.len()];
                for &r in rows {
                    groups[data[r]].push(r);
                }
                let parts = groups
                    .into_iter()
                    .enumerate()
                    .filter(|(_, g)| !g.is_empty())
                    .map(|(lvl, g)| {
                        let test = BranchTest::Equals {
                            attr: pred.name.to_string(),
                            level: levels[lvl].clone(),
                        };
                        (test, g)
                    })
                    .collect();
                (
                    SplitTest::Categorical {
                        attr: pred.name.to_string(),
                    },
                    parts,
                )
            }
            Candidate::Threshold(p, cut) => {
                let pred = &self.predictors[p];
                let Column::Continuous(values) = &pred.column else {
                    unreachable!()
                };
                let (below, above): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&r| values[r] < cut);
                let attr = pred.name.to_string();
                let parts = vec![
                    (
                        BranchTest::Below {
                            attr: attr.clone(),
                            cut,
                        },
                        below,
                    ),
                    (
                        BranchTest::AtLeast {
                            attr: attr.clone(),
                            cut,
                        },
                        above,
                    ),
                ];
                (SplitTest::Threshold { attr, cut }, parts)
            }
        };

        let mut child_available = available.to_vec();
        if let Candidate::Categorical(p) = candidate {
            child_available[p] = false;
        }
        let branches = parts
            .into_iter()
            .map(|(test, sub)| Branch {
                test,
                node: self.grow(&sub, &child_available, depth + 1),
            })
            .collect();
        Node::Internal {
            split,
            gain,
            score,
            class,
            support,
            distribution,
            branches,
        }
    }
}

// ties go to the earliest class level
fn majority(counts: &[usize]) -> usize {
    counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map_or(0, |(i, _)| i)
}

fn resolve_predictors<'a>(
    rel: &'a Relation,
    class_attr: &str,
    config: &InduceConfig,
) -> Result<Vec<&'a AttributeSchema>> {
    let schema = rel.schema();
    let chosen: Vec<&AttributeSchema> = match &config.predictors {
        Some(names) => {
            let mut picked = Vec::with_capacity(names.len());
            for name in names {
                if name == class_attr {
                    return Err(Error::InvalidArgument(format!(
                        "predictor {name} is the class attribute"
                    )));
                }
                let attr = rel.attribute(name)?;
                if !attr.is_mining_relevant() {
                    return Err(Error::KindMismatch {
                        attr: name.clone(),
                        expected: "continuous or categorical",
                        found: attr.kind.name(),
                    });
                }
                picked.push(attr);
            }
            // schema order drives tie-breaking
            let mut ordered: Vec<&AttributeSchema> = schema
                .iter()
                .filter(|a| picked.iter().any(|p| p.name == a.name))
                .collect();
            ordered.dedup_by(|a, b| a.name == b.name);
            ordered
        }
        None => schema
            .iter()
            .filter(|a| a.name != class_attr && a.is_mining_relevant())
            .filter(|a| config.variant == Variant::C45 || !a.is_continuous())
            .collect(),
    };
    if config.variant == Variant::Id3 {
        if let Some(a) = chosen.iter().find(|a| a.is_continuous()) {
            return Err(Error::KindMismatch {
                attr: a.name.clone(),
                expected: "categorical (ID3 requires discretized predictors)",
                found: "continuous",
            });
        }
    }
    Ok(chosen)
}

/// Grows a decision tree depth-first on `class_attr`.
pub fn induce<T: Scalar>(rel: &Relation, class_attr: &str, config: &InduceConfig) -> Result<DecisionTree<T>> {
    let class_schema = rel.attribute(class_attr)?;
    let class_names = match &class_schema.kind {
        AttrKind::Categorical(levels) => levels,
        kind => {
            return Err(Error::KindMismatch {
                attr: class_attr.to_string(),
                expected: "categorical",
                found: kind.name(),
            })
        }
    };
    if rel.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot induce a tree from an empty relation".into(),
        ));
    }
    let classes = rel.category_column(class_attr)?;
    let mut predictors = Vec::new();
    for attr in resolve_predictors(rel, class_attr, config)? {
        let column = match &attr.kind {
            AttrKind::Categorical(levels) => Column::Categorical {
                levels,
                data: rel.category_column(&attr.name)?,
            },
            AttrKind::Continuous => Column::Continuous(rel.numeric_column(&attr.name)?),
            _ => unreachable!("filtered by resolve_predictors"),
        };
        predictors.push(Predictor {
            name: &attr.name,
            column,
        });
    }
    let grower = Grower::<T> {
        predictors,
        classes,
        class_names,
        config,
        _scalar: std::marker::PhantomData,
    };
    let rows: Vec<usize> = (0..rel.len()).collect();
    let available = vec![true; grower.predictors.len()];
    let root = grower.grow(&rows, &available, 0);
    Ok(DecisionTree {
        class_attr: class_attr.to_string(),
        classes: class_names.clone(),
        config: config.clone(),
        root,
    })
}

impl<T: Scalar> DecisionTree<T> {
    /// Label of the leaf reached by `record`, whose layout follows `schema`.
    pub fn classify(&self, schema: &[AttributeSchema], record: &[Value]) -> Result<&str> {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { class, .. } => return Ok(class),
                Node::Internal {
                    split, branches, class, ..
                } => {
                    let attr = split.attr();
                    let col = schema
                        .iter()
                        .position(|a| a.name == attr)
                        .ok_or_else(|| Error::UnknownAttribute(attr.to_string()))?;
                    let value = record.get(col).ok_or(Error::Dimension {
                        expected: schema.len(),
                        found: record.len(),
                    })?;
                    let next = match (split, value) {
                        (_, Value::Null) => {
                            return Err(Error::NullValue {
                                attr: attr.to_string(),
                                row: 0,
                            })
                        }
                        (SplitTest::Threshold { cut, .. }, Value::Number(x)) => {
                            let idx = if x < cut { 0 } else { 1 };
                            Some(&branches[idx].node)
                        }
                        (SplitTest::Categorical { .. }, Value::Category(c)) => {
                            let label = schema[col].levels().map(|l| l[*c].as_str());
                            branches
                                .iter()
                                .find(|b| matches!(&b.test, BranchTest::Equals { level, .. } if Some(level.as_str()) == label))
                                .map(|b| &b.node)
                        }
                        _ => {
                            return Err(Error::KindMismatch {
                                attr: attr.to_string(),
                                expected: if matches!(split, SplitTest::Threshold { .. }) {
                                    "continuous"
                                } else {
                                    "categorical"
                                },
                                found: schema[col].kind.name(),
                            })
                        }
                    };
                    match next {
                        Some(n) => node = n,
                        None => return Ok(class),
                    }
                }
            }
        }
    }

    /// Classifies every record of `rel`.
    pub fn predict(&self, rel: &Relation) -> Result<Vec<String>> {
        rel.records()
            .iter()
            .enumerate()
            .map(|(i, row)| {
                self.classify(rel.schema(), row)
                    .map(str::to_string)
                    .map_err(|e| match e {
                        Error::NullValue { attr, .. } => Error::NullValue { attr, row: i + 1 },
                        other => other,
                    })
            })
            .collect()
    }

    pub fn leaf_count(&self) -> usize {
        fn count<T>(n: &Node<T>) -> usize {
            match n {
                Node::Leaf { .. } => 1,
                Node::Internal { branches, .. } => branches.iter().map(|b| count(&b.node)).sum(),
            }
        }
        count(&self.root)
    }

    pub fn node_count(&self) -> usize {
        fn count<T>(n: &Node<T>) -> usize {
            match n {
                Node::Leaf { .. } => 1,
                Node::Internal { branches, .. } => 1 + branches.iter().map(|b| count(&b.node)).sum::<usize>(),
            }
        }
        count(&self.root)
    }

    pub fn depth(&self) -> usize {
        fn depth<T>(n: &Node<T>) -> usize {
            match n {
                Node::Leaf { .. } => 0,
                Node::Internal { branches, .. } => 1 + branches.iter().map(|b| depth(&b.node)).max().unwrap_or(0),
            }
        }
        depth(&self.root)
    }

    /// Entropy of the class distribution at the root, in bits.
    pub fn root_entropy(&self) -> T {
        counts_entropy(self.root.distribution())
    }

    /// Graphviz rendering: internal nodes show their split and gain, leaves
    /// their class, support and purity.
    pub fn to_dot(&self) -> String {
        let mut w = DotWriter::new("tree", &[("shape", "box")]);
        let mut next = 0usize;
        emit_dot(&self.root, &mut w, &mut next);
        w.finish()
    }
}

fn emit_dot<T: Scalar>(node: &Node<T>, w: &mut DotWriter, next: &mut usize) -> String {
    let id = format!("n{}", *next);
    *next += 1;
    match node {
        Node::Leaf {
            class, support, purity, ..
        } => {
            let label = format!("{class}\nn={support} purity={:.3}", purity.as_f64());
            w.node(&id, &label, &[("shape", "ellipse")]);
        }
        Node::Internal {
            split,
            gain,
            support,
            branches,
            ..
        } => {
            let label = format!("{}\nGI={:.4} bits\nn={support}", split.attr(), gain.as_f64());
            w.node(&id, &label, &[]);
            for b in branches {
                let child = emit_dot(&b.node, w, next);
                w.edge(&id, &child, Some(&b.test.edge_label()));
            }
        }
    }
    id
}

/// DOT export of a tree.
pub fn export_tree_dot<T: Scalar>(tree: &DecisionTree<T>) -> String {
    tree.to_dot()
}

/// Classifies one record against a tree.
pub fn classify<'t, T: Scalar>(
    tree: &'t DecisionTree<T>,
    schema: &[AttributeSchema],
    record: &[Value],
) -> Result<&'t str> {
    tree.classify(schema, record)
}
