use serde::{Deserialize, Serialize};

use super::tree::{BranchTest, DecisionTree, Node};
use crate::num::Scalar;

/// A root-to-leaf path read as an implication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub conditions: Vec<BranchTest>,
    pub consequent: String,
    pub support: usize,
    pub confidence: f64,
}

impl Rule {
    /// Conjunction of the conditions, or `true` for an unconditional rule.
    pub fn antecedent(&self) -> String {
        if self.conditions.is_empty() {
            return "true".to_string();
        }
        self.conditions
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" AND ")
    }
}

/// One rule per leaf, most supported first; equal supports keep
/// depth-first leaf order.
pub fn extract_rules<T: Scalar>(tree: &DecisionTree<T>) -> Vec<Rule> {
    fn walk<T: Scalar>(node: &Node<T>, path: &mut Vec<BranchTest>, out: &mut Vec<Rule>) {
        match node {
            Node::Leaf {
                class, support, purity, ..
            } => out.push(Rule {
                conditions: path.clone(),
                consequent: class.clone(),
                support: *support,
                confidence: purity.as_f64(),
            }),
            Node::Internal { branches, .. } => {
                for b in branches {
                    path.push(b.test.clone());
                    walk(&b.node, path, out);
                    path.pop();
                }
            }
        }
    }
    let mut rules = Vec::new();
    walk(&tree.root, &mut Vec::new(), &mut rules);
    rules.sort_by_key(|r| std::cmp::Reverse(r.support));
    rules
}

/// Aligned plain-text table: one row per rule with the membership
/// percentage and the number of supporting records.
pub fn rules_table(rules: &[Rule]) -> String {
    let header = ["#", "conditions", "class", "confidence", "support"];
    let rows: Vec<[String; 5]> = rules
        .iter()
        .enumerate()
        .map(|(i, r)| {
            [
                (i + 1).to_string(),
                r.antecedent(),
                r.consequent.clone(),
                format!("{:.0} %", r.confidence * 100.0),
                format!("{} obs.", r.support),
            ]
        })
        .collect();
    let mut widths = header.map(|h| h.chars().count());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: [&str; 5]| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            let pad = w - cell.chars().count();
            // numbers right-aligned, text left-aligned
            if i == 0 || i >= 3 {
                s.push_str(&" ".repeat(pad));
                s.push_str(cell);
            } else {
                s.push_str(cell);
                s.push_str(&" ".repeat(pad));
            }
        }
        s.trim_end().to_string()
    };
    let mut out = line(header);
    out.push('\n');
    for row in &rows {
        out.push_str(&line([&row[0], &row[1], &row[2], &row[3], &row[4]]));
        out.push('\n');
    }
    out
}
