//! Gaussian linear VAR estimator: transfer entropy as half the log ratio of
//! restricted to unrestricted residual generalized variances.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    ContinuousSeries, LagEmbedding, LogLikelihoodSummary, PredictiveModel, TimeSeries,
};

/// Smallest admissible eigenvalue of the column-normalised Gram matrix.
const RANK_TOLERANCE: f64 = 1e-10;
/// Generalized variance below this fraction of the product of target variances is degenerate.
const DEGENERACY_TOLERANCE: f64 = 1e-12;
/// Slack allowed below zero before a negative estimate is reported as an error.
const NEGATIVE_SLACK: f64 = 1e-10;

/// Least-squares fit of x_t on k lags of x (and of y, when present).
#[derive(Debug, Clone)]
pub struct VarFit {
    /// A_1..A_k, each dim(X)×dim(X).
    pub lag_coefficients: Vec<DMatrix<f64>>,
    /// B_1..B_k, each dim(X)×dim(Y); empty for the restricted model.
    pub cross_coefficients: Vec<DMatrix<f64>>,
    /// ML residual covariance, divisor n − k.
    pub residual_covariance: DMatrix<f64>,
    pub generalized_variance: f64,
    pub log_generalized_variance: f64,
    pub effective_samples: usize,
    residuals: DMatrix<f64>,
}

impl VarFit {
    /// Residuals, one row per target.
    pub fn residuals(&self) -> &DMatrix<f64> {
        &self.residuals
    }

    pub fn dimension(&self) -> usize {
        self.residual_covariance.nrows()
    }

    /// Maximised Gaussian log-likelihood per effective sample.
    pub fn average_log_likelihood(&self) -> f64 {
        let d = self.dimension() as f64;
        -0.5 * (d * (2.0 * PI).ln() + self.log_generalized_variance + d)
    }
}

fn regressors(
    x: &ContinuousSeries,
    y: Option<&ContinuousSeries>,
    embedding: &LagEmbedding,
) -> DMatrix<f64> {
    let k = embedding.order();
    let dx = x.dimension();
    let dy = y.map_or(0, |y| y.dimension());
    let start = embedding.targets().start;
    DMatrix::from_fn(embedding.effective_length(), k * (dx + dy), |row, col| {
        let t = start + row;
        if col < k * dx {
            x.row(t - 1 - col / dx)[col % dx]
        } else {
            let col = col - k * dx;
            y.expect("cross columns only exist with y")
                .row(t - 1 - col / dy)[col % dy]
        }
    })
}

fn target_variances(targets: &DMatrix<f64>) -> Vec<f64> {
    let n = targets.nrows() as f64;
    targets
        .column_iter()
        .map(|c| {
            let mean = c.sum() / n;
            c.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
        })
        .collect()
}

/// Fits on the target range of `embedding`.
pub fn fit_var_on(
    x: &ContinuousSeries,
    y: Option<&ContinuousSeries>,
    embedding: &LagEmbedding,
) -> Result<VarFit> {
    let k = embedding.order();
    let dx = x.dimension();
    let dy = y.map_or(0, |y| y.dimension());
    if let Some(y) = y {
        if y.len() != x.len() {
            return Err(Error::LengthMismatch(x.len(), y.len()));
        }
    }
    let p = k * (dx + dy);
    if x.len() <= p + 1 || embedding.effective_length() <= p {
        return Err(Error::TooShort { n: x.len(), k });
    }

    let z = regressors(x, y, embedding);
    let start = embedding.targets().start;
    let targets = DMatrix::from_fn(embedding.effective_length(), dx, |row, col| {
        x.row(start + row)[col]
    });

    let gram = z.tr_mul(&z);
    let scale: Vec<f64> = (0..p).map(|j| gram[(j, j)].sqrt()).collect();
    if scale.iter().any(|&s| s.is_nan() || s <= 0.0) {
        return Err(Error::RankDeficient);
    }
    let normalised = DMatrix::from_fn(p, p, |i, j| gram[(i, j)] / (scale[i] * scale[j]));
    let smallest = SymmetricEigen::new(normalised.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if smallest < RANK_TOLERANCE {
        return Err(Error::RankDeficient);
    }
    let cholesky = normalised.cholesky().ok_or(Error::RankDeficient)?;
    let mut rhs = z.tr_mul(&targets);
    for (i, mut row) in rhs.row_iter_mut().enumerate() {
        row /= scale[i];
    }
    let mut beta = cholesky.solve(&rhs);
    for (i, mut row) in beta.row_iter_mut().enumerate() {
        row /= scale[i];
    }

    let residuals = &targets - &z * &beta;
    let n_eff = embedding.effective_length();
    let covariance = residuals.tr_mul(&residuals) / n_eff as f64;
    let covariance = (&covariance + covariance.transpose()) * 0.5;

    let floor = DEGENERACY_TOLERANCE * target_variances(&targets).iter().product::<f64>();
    let log_det = match covariance.clone().cholesky() {
        Some(c) => 2.0 * c.l().diagonal().iter().map(|v| v.ln()).sum::<f64>(),
        None => return Err(Error::DegenerateVariance(covariance.determinant())),
    };
    let det = log_det.exp();
    if det.is_nan() || det <= floor {
        return Err(Error::DegenerateVariance(det));
    }

    let lag_coefficients = (0..k)
        .map(|l| DMatrix::from_fn(dx, dx, |i, j| beta[(l * dx + j, i)]))
        .collect();
    let cross_coefficients = (0..if dy > 0 { k } else { 0 })
        .map(|l| DMatrix::from_fn(dx, dy, |i, j| beta[(k * dx + l * dy + j, i)]))
        .collect();

    Ok(VarFit {
        lag_coefficients,
        cross_coefficients,
        residual_covariance: covariance,
        generalized_variance: det,
        log_generalized_variance: log_det,
        effective_samples: n_eff,
        residuals,
    })
}

/// Fits the order-`k` regression of x_t on the lags of x (and y when given)
/// over targets k..n.
pub fn fit_var(x: &ContinuousSeries, y: Option<&ContinuousSeries>, k: usize) -> Result<VarFit> {
    let embedding = LagEmbedding::new(x.len(), y.map_or(x.len(), |y| y.len()), k)?;
    fit_var_on(x, y, &embedding)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrangerResult {
    /// Nats; half the Granger causality from Y to X.
    pub te_hat: f64,
    /// 2(n − k)·te_hat.
    pub statistic: f64,
    /// k·dim(X)·dim(Y): the coefficients zeroed by the null.
    pub dof: u64,
    pub effective_samples: usize,
}

/// Transfer entropy from `y` to `x` under a Gaussian VAR(k) model.
pub fn var_te(x: &ContinuousSeries, y: &ContinuousSeries, k: usize) -> Result<GrangerResult> {
    let embedding = LagEmbedding::new(x.len(), y.len(), k)?;
    let full = fit_var_on(x, Some(y), &embedding)?;
    let null = fit_var_on(x, None, &embedding)?;
    let te = 0.5 * (null.log_generalized_variance - full.log_generalized_variance);
    if te < -NEGATIVE_SLACK {
        return Err(Error::InconsistentFit(te));
    }
    let te_hat = te.max(0.0);
    let n_eff = embedding.effective_length();
    Ok(GrangerResult {
        te_hat,
        statistic: 2.0 * n_eff as f64 * te_hat,
        dof: (k * x.dimension() * y.dimension()) as u64,
        effective_samples: n_eff,
    })
}

/// Gaussian VAR model family, for order selection.
pub struct GaussianVar;

impl PredictiveModel for GaussianVar {
    type Series = ContinuousSeries;

    fn full_model_summary(
        x: &ContinuousSeries,
        y: &ContinuousSeries,
        embedding: &LagEmbedding,
    ) -> Result<LogLikelihoodSummary> {
        let fit = fit_var_on(x, Some(y), embedding)?;
        let (k, dx, dy) = (embedding.order(), x.dimension(), y.dimension());
        Ok(LogLikelihoodSummary {
            average_log_likelihood: fit.average_log_likelihood(),
            effective_samples: fit.effective_samples,
            parameter_count: k * dx * (dx + dy) + dx * (dx + 1) / 2,
        })
    }
}
