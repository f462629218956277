//! Information-exploitation engine for tabular taxpayer data.
//!
//! Three algorithm families (top-down decision-tree induction, Kohonen
//! self-organizing maps and Bayesian networks) share one typed [`Relation`]
//! and are chained by the strategy runner in [`pipeline`].
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

// NaN-rejecting `!(x > 0)` checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bayes;
pub mod dataset;
mod dot;
pub mod error;
pub mod induction;
pub mod num;
pub mod pipeline;
pub mod som;

pub use dataset::{AttrKind, AttributeSchema, Relation, Value};
pub use error::{Error, Result};
pub use num::Scalar;

/// Decision tree over `f64`.
pub type Tree = induction::DecisionTree<f64>;

/// Self-organizing map over `f64`.
pub type Som = som::SomGrid<f64>;

/// Bayesian network over `f64`.
pub type Net = bayes::BayesNet<f64>;

/// Naive Bayes model over `f64`.
pub type NaiveBayes = bayes::NaiveBayesModel<f64>;
