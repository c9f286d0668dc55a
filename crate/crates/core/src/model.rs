//! Time-series containers, lag embedding and the likelihood bookkeeping shared
//! by the discrete and Gaussian estimators.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Common length accessor for the series kinds handled here.
pub trait TimeSeries {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A finite-alphabet series of 0-based symbol indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoricalSeries {
    values: Vec<usize>,
    alphabet_size: usize,
}

impl CategoricalSeries {
    pub fn new(values: Vec<usize>, alphabet_size: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        if alphabet_size == 0 {
            return Err(Error::AlphabetTooSmall { got: 0, min: 1 });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| v >= alphabet_size)
        {
            return Err(Error::SymbolOutOfRange {
                index,
                value,
                alphabet: alphabet_size,
            });
        }
        Ok(Self {
            values,
            alphabet_size,
        })
    }

    /// Builds a series whose alphabet is `max symbol + 1`.
    pub fn with_inferred_alphabet(values: Vec<usize>) -> Result<Self> {
        let alphabet = values.iter().max().map_or(0, |m| m + 1);
        Self::new(values, alphabet)
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }
}

impl TimeSeries for CategoricalSeries {
    fn len(&self) -> usize {
        self.values.len()
    }
}

/// A real vector-valued series stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousSeries {
    data: Vec<f64>,
    dimension: usize,
}

impl ContinuousSeries {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dimension = rows.first().ok_or(Error::Empty)?.len();
        let mut data = Vec::with_capacity(rows.len() * dimension);
        for (index, row) in rows.iter().enumerate() {
            if row.len() != dimension {
                return Err(Error::DimensionMismatch {
                    index,
                    got: row.len(),
                    expected: dimension,
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(data, dimension)
    }

    pub fn from_scalars(values: Vec<f64>) -> Result<Self> {
        Self::from_flat(values, 1)
    }

    /// `data` holds `n * dimension` values, one observation after another.
    pub fn from_flat(data: Vec<f64>, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if data.is_empty() {
            return Err(Error::Empty);
        }
        if !data.len().is_multiple_of(dimension) {
            return Err(Error::DimensionMismatch {
                index: data.len() / dimension,
                got: data.len() % dimension,
                expected: dimension,
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos / dimension));
        }
        Ok(Self { data, dimension })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.dimension..(t + 1) * self.dimension]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dimension)
    }

    /// Copy with each component's sample mean subtracted.
    pub fn demeaned(&self) -> Self {
        let n = self.len() as f64;
        let mut means = vec![0.0; self.dimension];
        for row in self.rows() {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v / n;
            }
        }
        let data = self
            .rows()
            .flat_map(|row| row.iter().zip(&means).map(|(v, m)| v - m))
            .collect();
        Self {
            data,
            dimension: self.dimension,
        }
    }

    /// Copy with every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            data: self.data.iter().map(|v| v * factor).collect(),
            dimension: self.dimension,
        }
    }
}

impl TimeSeries for ContinuousSeries {
    fn len(&self) -> usize {
        self.data.len() / self.dimension
    }
}

/// The index bookkeeping of a k-lag embedding of a pair of series.
///
/// Targets are the 0-based indices `start..n`; the history of target `t` is
/// `t-k..t` in both series. Ordinarily `start == k`; order selection raises
/// `start` to the largest candidate order so all candidates see the same
/// targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LagEmbedding {
    k: usize,
    start: usize,
    n: usize,
}

/// One embedded observation: the target and both k-lag histories, oldest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window<'a, T> {
    pub target: &'a T,
    pub x_history: &'a [T],
    pub y_history: &'a [T],
}

impl LagEmbedding {
    pub fn new(n_x: usize, n_y: usize, k: usize) -> Result<Self> {
        Self::with_start(n_x, n_y, k, k)
    }

    pub fn with_start(n_x: usize, n_y: usize, k: usize, start: usize) -> Result<Self> {
        if n_x != n_y {
            return Err(Error::LengthMismatch(n_x, n_y));
        }
        if k == 0 {
            return Err(Error::ZeroOrder);
        }
        if start < k {
            return Err(Error::InvalidArgument(format!(
                "embedding start {start} precedes order {k}"
            )));
        }
        if n_x <= start {
            return Err(Error::TooShort { n: n_x, k: start });
        }
        Ok(Self { k, start, n: n_x })
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn series_length(&self) -> usize {
        self.n
    }

    /// Number of embedded observations, n − k for the default start.
    pub fn effective_length(&self) -> usize {
        self.n - self.start
    }

    pub fn targets(&self) -> Range<usize> {
        self.start..self.n
    }

    pub fn history(&self, t: usize) -> Range<usize> {
        t - self.k..t
    }

    pub fn windows<'a, T>(
        &self,
        x: &'a [T],
        y: &'a [T],
    ) -> impl Iterator<Item = Window<'a, T>> + 'a {
        assert!(
            x.len() == self.n && y.len() == self.n,
            "series do not match embedding"
        );
        let k = self.k;
        (self.start..self.n).map(move |t| Window {
            target: &x[t],
            x_history: &x[t - k..t],
            y_history: &y[t - k..t],
        })
    }
}

/// Validates `x`, `y` against order `k` and returns their embedding.
pub fn embed<S: TimeSeries>(x: &S, y: &S, k: usize) -> Result<LagEmbedding> {
    LagEmbedding::new(x.len(), y.len(), k)
}

/// Maximised average log-likelihood of a fitted predictive model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLikelihoodSummary {
    /// Nats per effective sample.
    pub average_log_likelihood: f64,
    pub effective_samples: usize,
    pub parameter_count: usize,
}

impl LogLikelihoodSummary {
    pub fn log_likelihood(&self) -> f64 {
        self.average_log_likelihood * self.effective_samples as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InformationCriteria {
    pub aic: f64,
    pub bic: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Aic,
    Bic,
}

impl InformationCriteria {
    pub fn get(&self, criterion: Criterion) -> f64 {
        match criterion {
            Criterion::Aic => self.aic,
            Criterion::Bic => self.bic,
        }
    }
}

pub fn information_criteria(summary: &LogLikelihoodSummary) -> Result<InformationCriteria> {
    if summary.effective_samples == 0 {
        return Err(Error::InvalidArgument("no effective samples".into()));
    }
    let deviance = -2.0 * summary.log_likelihood();
    let m = summary.parameter_count as f64;
    Ok(InformationCriteria {
        aic: deviance + 2.0 * m,
        bic: deviance + m * (summary.effective_samples as f64).ln(),
    })
}

/// A predictive model family whose unrestricted member can be fitted at any
/// order on a chosen target range.
pub trait PredictiveModel {
    type Series: TimeSeries;

    /// Fits the unrestricted (full) order-`k` model to the targets of
    /// `embedding` and reports its maximised likelihood.
    fn full_model_summary(
        x: &Self::Series,
        y: &Self::Series,
        embedding: &LagEmbedding,
    ) -> Result<LogLikelihoodSummary>;
}

/// Chooses the order in `1..=k_max` minimising `criterion`, scoring every
/// candidate on the targets `k_max..n`.
pub fn select_order<M: PredictiveModel>(
    x: &M::Series,
    y: &M::Series,
    k_max: usize,
    criterion: Criterion,
) -> Result<usize> {
    if k_max == 0 {
        return Err(Error::ZeroOrder);
    }
    if k_max >= x.len() {
        return Err(Error::TooShort {
            n: x.len(),
            k: k_max,
        });
    }
    let mut best: Option<(usize, f64)> = None;
    for k in 1..=k_max {
        let embedding = LagEmbedding::with_start(x.len(), y.len(), k, k_max)?;
        let summary = M::full_model_summary(x, y, &embedding)?;
        let score = information_criteria(&summary)?.get(criterion);
        if best.is_none_or(|(_, b)| score < b) {
            best = Some((k, score));
        }
    }
    Ok(best.map(|(k, _)| k).expect("k_max >= 1"))
}
