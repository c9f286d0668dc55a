//! Plug-in estimation for finite-alphabet series.
//!
//! The transition frequencies of the embedded windows are the maximum
//! likelihood estimates of a finite Markov model, so the plug-in transfer
//! entropy computed here is the model log-likelihood ratio divided by the
//! number of effective samples.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CategoricalSeries, LagEmbedding, LogLikelihoodSummary, PredictiveModel};

/// Dense tables are used while counting when the cell space is at most this big.
const DENSE_CELL_LIMIT: u64 = 1 << 16;

/// One cell of the joint frequency table. Histories are packed base-alphabet
/// integers, oldest symbol most significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub target: usize,
    pub x_history: u64,
    pub y_history: u64,
    /// Always 0 when there is no conditioning series.
    pub z_history: u64,
}

/// Joint frequency table over `(x_t, x-history, y-history[, z-history])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PluginDistribution {
    counts: BTreeMap<Cell, u64>,
    total: u64,
    alphabet_x: usize,
    alphabet_y: usize,
    alphabet_z: Option<usize>,
    order: usize,
}

fn history_span(alphabet: usize, k: usize) -> Result<u64> {
    u32::try_from(k)
        .ok()
        .and_then(|k| (alphabet.max(1) as u64).checked_pow(k))
        .ok_or(Error::EncodingOverflow { alphabet, k })
}

/// Encodes a history slice the same way the counter does.
pub fn encode_history(history: &[usize], alphabet: usize) -> u64 {
    history
        .iter()
        .fold(0u64, |code, &s| code * alphabet as u64 + s as u64)
}

/// Decodes a packed history of length `k`, oldest symbol first.
pub fn decode_history(mut code: u64, alphabet: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = (code % alphabet as u64) as usize;
        code /= alphabet as u64;
    }
    out
}

/// Rolling base-`alphabet` codes of the length-`k` windows ending before each target.
fn rolling_codes(values: &[usize], alphabet: usize, k: usize, span: u64) -> Vec<u64> {
    let a = alphabet.max(1) as u64;
    let mut codes = Vec::with_capacity(values.len() - k);
    let mut code = encode_history(&values[..k], alphabet);
    codes.push(code);
    for &v in &values[k..values.len() - 1] {
        code = (code * a + v as u64) % span;
        codes.push(code);
    }
    codes
}

impl PluginDistribution {
    fn tally(
        x: &CategoricalSeries,
        y: &CategoricalSeries,
        z: Option<&CategoricalSeries>,
        k: usize,
    ) -> Result<Self> {
        let embedding = LagEmbedding::new(x.values().len(), y.values().len(), k)?;
        if let Some(z) = z {
            LagEmbedding::new(x.values().len(), z.values().len(), k)?;
        }
        let a = x.alphabet_size();
        let b = y.alphabet_size();
        let c = z.map(|z| z.alphabet_size());
        let span_x = history_span(a, k)?;
        let span_y = history_span(b, k)?;
        let span_z = c.map(|c| history_span(c, k)).transpose()?.unwrap_or(1);

        let xs = rolling_codes(x.values(), a, k, span_x);
        let ys = rolling_codes(y.values(), b, k, span_y);
        let zs = z.map(|z| rolling_codes(z.values(), z.alphabet_size(), k, span_z));
        let targets = &x.values()[k..];

        let cell_at = |i: usize| Cell {
            target: targets[i],
            x_history: xs[i],
            y_history: ys[i],
            z_history: zs.as_ref().map_or(0, |zs| zs[i]),
        };

        let dense_size = (a as u64)
            .checked_mul(span_x)
            .and_then(|v| v.checked_mul(span_y))
            .and_then(|v| v.checked_mul(span_z))
            .filter(|&v| v <= DENSE_CELL_LIMIT);

        let mut counts = BTreeMap::new();
        if let Some(size) = dense_size {
            let index = |cell: &Cell| {
                (((cell.target as u64 * span_x + cell.x_history) * span_y + cell.y_history)
                    * span_z
                    + cell.z_history) as usize
            };
            let mut dense = vec![0u64; size as usize];
            for i in 0..targets.len() {
                dense[index(&cell_at(i))] += 1;
            }
            for i in 0..targets.len() {
                let cell = cell_at(i);
                let slot = &mut dense[index(&cell)];
                if *slot > 0 {
                    counts.insert(cell, *slot);
                    *slot = 0;
                }
            }
        } else {
            for i in 0..targets.len() {
                *counts.entry(cell_at(i)).or_insert(0) += 1;
            }
        }

        Ok(Self {
            counts,
            total: embedding.effective_length() as u64,
            alphabet_x: a,
            alphabet_y: b,
            alphabet_z: c,
            order: k,
        })
    }

    pub fn counts(&self) -> &BTreeMap<Cell, u64> {
        &self.counts
    }

    pub fn count(&self, cell: &Cell) -> u64 {
        self.counts.get(cell).copied().unwrap_or(0)
    }

    pub fn probability(&self, cell: &Cell) -> f64 {
        self.count(cell) as f64 / self.total as f64
    }

    /// n − k.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn alphabet_x(&self) -> usize {
        self.alphabet_x
    }

    pub fn alphabet_y(&self) -> usize {
        self.alphabet_y
    }

    pub fn alphabet_z(&self) -> Option<usize> {
        self.alphabet_z
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_conditional(&self) -> bool {
        self.alphabet_z.is_some()
    }

    /// Counts of `(x_t, x-history, z-history)`, summed over y-histories.
    pub fn target_x_history_counts(&self) -> BTreeMap<(usize, u64, u64), u64> {
        marginal(&self.counts, |c| (c.target, c.x_history, c.z_history))
    }

    /// Counts of `(x-history, y-history, z-history)`, summed over targets.
    pub fn context_counts(&self) -> BTreeMap<(u64, u64, u64), u64> {
        marginal(&self.counts, |c| (c.x_history, c.y_history, c.z_history))
    }

    /// Number of distinct full conditioning contexts a model of this shape has.
    pub fn possible_contexts(&self) -> Option<u64> {
        let k = self.order;
        let span = history_span(self.alphabet_x, k).ok()?;
        let span = span.checked_mul(history_span(self.alphabet_y, k).ok()?)?;
        match self.alphabet_z {
            Some(c) => span.checked_mul(history_span(c, k).ok()?),
            None => Some(span),
        }
    }

    /// True when some conditioning context of the declared model never occurs.
    pub fn has_unobserved_contexts(&self) -> bool {
        let observed = self.context_counts().len() as u64;
        self.possible_contexts().is_none_or(|p| observed < p)
    }

    /// Σ p̂(cell)·log f(cell): the average log-likelihood of an arbitrary
    /// transition law `f(x_t | histories)` on this sample.
    pub fn average_log_likelihood_with<F>(&self, transition: F) -> f64
    where
        F: Fn(&Cell) -> f64,
    {
        let n = self.total as f64;
        self.counts
            .iter()
            .map(|(cell, &c)| c as f64 / n * transition(cell).ln())
            .sum()
    }

    /// Maximised likelihood of the unrestricted model (transition law depends
    /// on all histories).
    pub fn full_model_summary(&self) -> LogLikelihoodSummary {
        let contexts = self.context_counts();
        LogLikelihoodSummary {
            average_log_likelihood: -conditional_entropy(
                self.counts
                    .iter()
                    .map(|(c, &n)| (n, contexts[&(c.x_history, c.y_history, c.z_history)])),
                self.total,
            ),
            effective_samples: self.total as usize,
            parameter_count: self.parameter_counts().0 as usize,
        }
    }

    /// Maximised likelihood of the null model (transition law ignores the y-history).
    pub fn null_model_summary(&self) -> LogLikelihoodSummary {
        let joint = self.target_x_history_counts();
        let contexts = marginal(&joint, |&(_, xh, zh)| (xh, zh));
        LogLikelihoodSummary {
            average_log_likelihood: -conditional_entropy(
                joint
                    .iter()
                    .map(|(&(_, xh, zh), &n)| (n, contexts[&(xh, zh)])),
                self.total,
            ),
            effective_samples: self.total as usize,
            parameter_count: self.parameter_counts().1 as usize,
        }
    }

    fn parameter_counts(&self) -> (u64, u64) {
        let a = self.alphabet_x.max(1) as u64 - 1;
        let k = self.order;
        let ctx_x = history_span(self.alphabet_x, k).unwrap_or(u64::MAX);
        let ctx_y = history_span(self.alphabet_y, k).unwrap_or(u64::MAX);
        let ctx_z = self
            .alphabet_z
            .map_or(1, |c| history_span(c, k).unwrap_or(u64::MAX));
        let null = a.saturating_mul(ctx_x).saturating_mul(ctx_z);
        (null.saturating_mul(ctx_y), null)
    }
}

fn marginal<K, J, F>(counts: &BTreeMap<K, u64>, key: F) -> BTreeMap<J, u64>
where
    J: Ord,
    F: Fn(&K) -> J,
{
    let mut out = BTreeMap::new();
    for (cell, &c) in counts {
        *out.entry(key(cell)).or_insert(0) += c;
    }
    out
}

/// −Σ (n_cell/N)·log(n_cell/n_context) over `(n_cell, n_context)` pairs.
fn conditional_entropy(pairs: impl Iterator<Item = (u64, u64)>, total: u64) -> f64 {
    let n = total as f64;
    -pairs
        .filter(|&(c, _)| c > 0)
        .map(|(c, ctx)| c as f64 / n * (c as f64 / ctx as f64).ln())
        .sum::<f64>()
}

/// Tallies every k-lag window of `(x, y)` into a frequency table.
pub fn count_cells(
    x: &CategoricalSeries,
    y: &CategoricalSeries,
    k: usize,
) -> Result<PluginDistribution> {
    PluginDistribution::tally(x, y, None, k)
}

/// As [`count_cells`], with the z-history added to every conditioning context.
pub fn count_cells_conditional(
    x: &CategoricalSeries,
    y: &CategoricalSeries,
    z: &CategoricalSeries,
    k: usize,
) -> Result<PluginDistribution> {
    PluginDistribution::tally(x, y, Some(z), k)
}

/// Plug-in transfer entropy Ĥ(X_t | X-hist[, Z-hist]) − Ĥ(X_t | X-hist, Y-hist[, Z-hist]) in nats.
pub fn plugin_te(dist: &PluginDistribution) -> f64 {
    let full = dist.full_model_summary().average_log_likelihood;
    let null = dist.null_model_summary().average_log_likelihood;
    (full - null).max(0.0)
}

pub fn plugin_conditional_te(
    x: &CategoricalSeries,
    y: &CategoricalSeries,
    z: &CategoricalSeries,
    k: usize,
) -> Result<f64> {
    Ok(plugin_te(&count_cells_conditional(x, y, z, k)?))
}

/// Parameter counts of the full and null finite Markov models and their difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DofSpec {
    pub full_params: u64,
    pub null_params: u64,
    pub dof: u64,
}

/// Degrees of freedom of the likelihood-ratio statistic for alphabets `a`
/// (target), `b` (source) and optionally `c` (conditioning) at order `k`.
pub fn dof(a: usize, b: usize, k: usize, conditional_alphabet: Option<usize>) -> Result<DofSpec> {
    for alphabet in [Some(a), Some(b), conditional_alphabet]
        .into_iter()
        .flatten()
    {
        if alphabet < 2 {
            return Err(Error::AlphabetTooSmall {
                got: alphabet,
                min: 2,
            });
        }
    }
    if k == 0 {
        return Err(Error::ZeroOrder);
    }
    let overflow = |alphabet| Error::EncodingOverflow { alphabet, k };
    let ctx_z = conditional_alphabet
        .map(|c| history_span(c, k))
        .transpose()?
        .unwrap_or(1);
    let null_params = ((a - 1) as u64)
        .checked_mul(history_span(a, k)?)
        .and_then(|v| v.checked_mul(ctx_z))
        .ok_or(overflow(a))?;
    let full_params = null_params
        .checked_mul(history_span(b, k)?)
        .ok_or(overflow(b))?;
    Ok(DofSpec {
        full_params,
        null_params,
        dof: full_params - null_params,
    })
}

/// Finite-alphabet Markov model family, for order selection.
pub struct DiscreteMarkov;

impl PredictiveModel for DiscreteMarkov {
    type Series = CategoricalSeries;

    fn full_model_summary(
        x: &CategoricalSeries,
        y: &CategoricalSeries,
        embedding: &LagEmbedding,
    ) -> Result<LogLikelihoodSummary> {
        let skip = embedding.targets().start - embedding.order();
        let trim = |s: &CategoricalSeries| {
            CategoricalSeries::new(s.values()[skip..].to_vec(), s.alphabet_size())
        };
        let dist = count_cells(&trim(x)?, &trim(y)?, embedding.order())?;
        Ok(dist.full_model_summary())
    }
}
