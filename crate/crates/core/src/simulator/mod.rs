//! Generators and exact oracles for finite joint Markov chains, and the
//! ensemble machinery that checks the estimator against its asymptotic law.

mod chain;
mod ensemble;
mod toy;

pub use chain::{exact_te, exact_te_with_budget, ChainSpec, DEFAULT_ENUMERATION_BUDGET};
pub use ensemble::{
    calibration_ensemble, ensemble_statistics, EcdfReport, ReferenceDistribution, MIN_REPLICATIONS,
};
pub use toy::{
    simulate_toy, simulate_toy_realization, simulate_toy_with, toy_chain_kernel,
    toy_te_closed_form, ToyChainParams,
};
