//! Transfer entropy estimation as a log-likelihood ratio.
//!
//! Two model families are provided: finite-alphabet Markov chains, where the
//! plug-in estimator is the maximum-likelihood ratio, and Gaussian linear VAR
//! models, where the estimator is half the Granger causality. In both cases
//! 2(n−k)·T̂ is asymptotically χ²(d) under zero transfer entropy and
//! non-central χ²(d; 2(n−k)·T) otherwise, which [`inference`] turns into
//! p-values and confidence intervals.

pub mod discrete;
pub mod error;
pub mod inference;
pub mod model;
pub mod simulator;
pub mod var;

pub use discrete::{
    count_cells, count_cells_conditional, dof, plugin_conditional_te, plugin_te, DofSpec,
    PluginDistribution,
};
pub use error::{Error, Result};
pub use inference::{
    chi2_cdf, chi2_quantile, noncentral_chi2_cdf, te_test, te_test_with_alpha, TeTestResult,
};
pub use model::{
    embed, information_criteria, select_order, CategoricalSeries, ContinuousSeries, Criterion,
    LagEmbedding, LogLikelihoodSummary,
};
pub use var::{fit_var, var_te, GrangerResult, VarFit};
