//! Bayesian networks with exact inference, and naive Bayes classifiers.

mod naive;
mod net;

pub use naive::{fit_naive_bayes, nb_posterior, nb_report, NaiveBayesModel, NbFeature};
pub use net::{
    check_acyclic, conditionally_independent, export_net_dot, factorization, infer, joint_probability, BayesNet, Cpt,
    Dag, NetSpec, Variable, MAX_ENUMERATION, MAX_INDEPENDENCE_STATES,
};
