//! Entropy-driven top-down induction of decision trees.

mod criteria;
mod rules;
mod tree;

pub use criteria::{best_threshold, entropy, gain_ratio, info_gain, information_content};
pub use rules::{extract_rules, rules_table, Rule};
pub use tree::{
    classify, export_tree_dot, induce, Branch, BranchTest, Criterion, DecisionTree, InduceConfig, Node, SplitTest,
    Variant,
};
