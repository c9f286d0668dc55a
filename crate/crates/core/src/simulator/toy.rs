//! Binary coupled Markov chain used to calibrate the plug-in estimator:
//!
//! ```text
//! x_t = u_t·y_{t−1} + (1 − u_t)·ε_t,   u_t ~ B(θ), ε_t ~ B(½)
//! y_t = v_t·x_{t−1} + (1 − v_t)·η_t,   v_t ~ B(φ), η_t ~ B(½)
//! ```
//!
//! Its stationary law is uniform on `{0,1}²`, and the transfer entropy from y
//! to x depends on θ alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::model::CategoricalSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyChainParams {
    /// Coupling y → x, in [0, 1).
    pub theta: f64,
    /// Coupling x → y, in [0, 1).
    pub phi: f64,
    pub seed: u64,
}

impl ToyChainParams {
    pub fn new(theta: f64, phi: f64, seed: u64) -> Result<Self> {
        let params = Self { theta, phi, seed };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("theta", self.theta), ("phi", self.phi)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "{name} = {v} outside [0, 1); the chain is not ergodic"
                )));
            }
        }
        Ok(())
    }

    /// Generator for realization `index` of an ensemble: one ChaCha stream per index.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

/// P(x_t, y_t | x_{t−1}, y_{t−1}) of the toy chain.
pub fn toy_chain_kernel(params: &ToyChainParams) -> Result<ChainSpec> {
    params.validate()?;
    let (theta, phi) = (params.theta, params.phi);
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    ChainSpec::from_fn(2, 2, |xp, yp, x, y| {
        (theta * delta(x, yp) + 0.5 * (1.0 - theta)) * (phi * delta(y, xp) + 0.5 * (1.0 - phi))
    })
}

/// ½(1+θ)·ln(1+θ) + ½(1−θ)·ln(1−θ), in nats.
pub fn toy_te_closed_form(theta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::InvalidArgument(format!(
            "theta = {theta} outside [0, 1)"
        )));
    }
    let half = |v: f64| if v > 0.0 { 0.5 * v * v.ln() } else { 0.0 };
    Ok(half(1.0 + theta) + half(1.0 - theta))
}

/// Draws a length-`n` realization from `rng`, starting from the uniform
/// stationary law.
pub fn simulate_toy_with<R: Rng>(
    theta: f64,
    phi: f64,
    n: usize,
    rng: &mut R,
) -> (Vec<usize>, Vec<usize>) {
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    x.push(rng.random_range(0..2usize));
    y.push(rng.random_range(0..2usize));
    for t in 1..n {
        let copy_y = rng.random_bool(theta);
        let eps = rng.random_range(0..2usize);
        let copy_x = rng.random_bool(phi);
        let eta = rng.random_range(0..2usize);
        x.push(if copy_y { y[t - 1] } else { eps });
        y.push(if copy_x { x[t - 1] } else { eta });
    }
    (x, y)
}

/// Realization `index` of the ensemble defined by `params`.
pub fn simulate_toy_realization(
    params: &ToyChainParams,
    n: usize,
    index: u64,
) -> Result<(CategoricalSeries, CategoricalSeries)> {
    params.validate()?;
    if n < 2 {
        return Err(Error::TooShort { n, k: 1 });
    }
    let (x, y) = simulate_toy_with(params.theta, params.phi, n, &mut params.rng(index));
    Ok((CategoricalSeries::new(x, 2)?, CategoricalSeries::new(y, 2)?))
}

/// A single reproducible realization (stream 0 of `params.seed`).
pub fn simulate_toy(
    params: &ToyChainParams,
    n: usize,
) -> Result<(CategoricalSeries, CategoricalSeries)> {
    simulate_toy_realization(params, n, 0)
}
