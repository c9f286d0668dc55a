use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ROW_SUM_TOLERANCE: f64 = 1e-12;
const STATIONARY_TOLERANCE: f64 = 1e-12;
const MAX_POWER_ITERATIONS: usize = 1_000_000;
const STATIONARY_RESTARTS: usize = 4;
/// Default cap on the (a·b)^(k+1) path cells enumerated by [`exact_te`].
pub const DEFAULT_ENUMERATION_BUDGET: usize = 1 << 22;

/// Exact order-1 transition kernel of a joint chain on `{0..a} × {0..b}`.
///
/// Joint states are indexed `x * b + y`; `kernel[from * a * b + to]` is
/// P(state_t = to | state_{t−1} = from).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    alphabet: (usize, usize),
    kernel: Vec<f64>,
}

impl ChainSpec {
    pub fn new(alphabet_x: usize, alphabet_y: usize, kernel: Vec<f64>) -> Result<Self> {
        let states = alphabet_x * alphabet_y;
        if states == 0 {
            return Err(Error::AlphabetTooSmall { got: 0, min: 1 });
        }
        if kernel.len() != states * states {
            return Err(Error::InvalidArgument(format!(
                "kernel has {} entries, expected {}",
                kernel.len(),
                states * states
            )));
        }
        for (from, row) in kernel.chunks_exact(states).enumerate() {
            if row.iter().any(|p| p.is_nan() || *p < 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "negative or non-finite transition probability from state {from}"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::InvalidArgument(format!(
                    "transition row {from} sums to {sum}"
                )));
            }
        }
        Ok(Self {
            alphabet: (alphabet_x, alphabet_y),
            kernel,
        })
    }

    /// Builds the kernel from a function of `(x_prev, y_prev, x, y)`.
    pub fn from_fn<F>(alphabet_x: usize, alphabet_y: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize, usize, usize) -> f64,
    {
        let (a, b) = (alphabet_x, alphabet_y);
        let mut kernel = Vec::with_capacity((a * b).pow(2));
        for xp in 0..a {
            for yp in 0..b {
                for x in 0..a {
                    for y in 0..b {
                        kernel.push(f(xp, yp, x, y));
                    }
                }
            }
        }
        Self::new(a, b, kernel)
    }

    pub fn alphabet(&self) -> (usize, usize) {
        self.alphabet
    }

    pub fn states(&self) -> usize {
        self.alphabet.0 * self.alphabet.1
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    pub fn probability(&self, x_prev: usize, y_prev: usize, x: usize, y: usize) -> f64 {
        let b = self.alphabet.1;
        self.kernel[(x_prev * b + y_prev) * self.states() + x * b + y]
    }

    /// The same chain with the roles of x and y exchanged.
    pub fn swapped(&self) -> Self {
        let (a, b) = self.alphabet;
        Self::from_fn(b, a, |yp, xp, y, x| self.probability(xp, yp, x, y))
            .expect("a permuted kernel stays stochastic")
    }

    fn step(&self, dist: &[f64]) -> Vec<f64> {
        let s = self.states();
        let mut next = vec![0.0; s];
        for (from, &p) in dist.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (to, q) in self.kernel[from * s..(from + 1) * s].iter().enumerate() {
                next[to] += p * q;
            }
        }
        next
    }

    fn power_iterate(&self, mut dist: Vec<f64>) -> Result<Vec<f64>> {
        for _ in 0..MAX_POWER_ITERATIONS {
            let next = self.step(&dist);
            let change: f64 = next.iter().zip(&dist).map(|(a, b)| (a - b).abs()).sum();
            dist = next;
            if change < STATIONARY_TOLERANCE {
                return Ok(dist);
            }
        }
        Err(Error::NonErgodic(
            "power iteration did not converge (periodic chain?)".into(),
        ))
    }

    /// Stationary law of the joint chain, by power iteration from the
    /// uniform law and from random simplex points; disagreement between the
    /// restarts means the fixed point is not unique.
    pub fn stationary_distribution(&self) -> Result<Vec<f64>> {
        let s = self.states();
        let reference = self.power_iterate(vec![1.0 / s as f64; s])?;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..STATIONARY_RESTARTS {
            // Exponential spacings give a uniform point on the simplex.
            let raw: Vec<f64> = (0..s)
                .map(|_| -rng.random::<f64>().max(1e-300).ln())
                .collect();
            let total: f64 = raw.iter().sum();
            let start = raw.into_iter().map(|v| v / total).collect();
            let other = self.power_iterate(start)?;
            let gap: f64 = other
                .iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).abs())
                .sum();
            if gap > 1e-9 {
                return Err(Error::NonErgodic(format!(
                    "stationary law is not unique (restarts differ by {gap:e})"
                )));
            }
        }
        Ok(reference)
    }
}

/// Exact k-lag transfer entropy from y to x of a stationary joint chain, in nats.
pub fn exact_te(spec: &ChainSpec, k: usize) -> Result<f64> {
    exact_te_with_budget(spec, k, DEFAULT_ENUMERATION_BUDGET)
}

/// Enumerates every length-(k+1) path of the stationary chain and evaluates
/// H(X_t | X-hist) − H(X_t | X-hist, Y-hist) by direct summation.
pub fn exact_te_with_budget(spec: &ChainSpec, k: usize, budget: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::ZeroOrder);
    }
    let (a, b) = spec.alphabet();
    let s = spec.states();
    let cells = u32::try_from(k + 1)
        .ok()
        .and_then(|p| s.checked_pow(p))
        .filter(|&c| c <= budget)
        .ok_or(Error::BudgetExceeded {
            cells: s.saturating_pow((k + 1) as u32),
            budget,
        })?;
    let stationary = spec.stationary_distribution()?;

    let span_x = a.pow(k as u32);
    let span_y = b.pow(k as u32);
    // joint[(x * span_x + xh) * span_y + yh], and its marginal without yh.
    let mut joint = vec![0.0; a * span_x * span_y];
    let mut path = vec![0usize; k + 1];
    for code in 0..cells {
        let mut rest = code;
        for slot in path.iter_mut().rev() {
            *slot = rest % s;
            rest /= s;
        }
        let mut p = stationary[path[0]];
        for w in path.windows(2) {
            if p == 0.0 {
                break;
            }
            p *= spec.kernel()[w[0] * s + w[1]];
        }
        if p == 0.0 {
            continue;
        }
        let (mut xh, mut yh) = (0, 0);
        for &state in &path[..k] {
            xh = xh * a + state / b;
            yh = yh * b + state % b;
        }
        let x = path[k] / b;
        joint[(x * span_x + xh) * span_y + yh] += p;
    }

    let mut context_full = vec![0.0; span_x * span_y];
    let mut target_null = vec![0.0; a * span_x];
    let mut context_null = vec![0.0; span_x];
    for x in 0..a {
        for xh in 0..span_x {
            for yh in 0..span_y {
                let p = joint[(x * span_x + xh) * span_y + yh];
                context_full[xh * span_y + yh] += p;
                target_null[x * span_x + xh] += p;
                context_null[xh] += p;
            }
        }
    }

    let mut h_full = 0.0;
    let mut h_null = 0.0;
    for x in 0..a {
        for xh in 0..span_x {
            let p = target_null[x * span_x + xh];
            if p > 0.0 {
                h_null -= p * (p / context_null[xh]).ln();
            }
            for yh in 0..span_y {
                let p = joint[(x * span_x + xh) * span_y + yh];
                if p > 0.0 {
                    h_full -= p * (p / context_full[xh * span_y + yh]).ln();
                }
            }
        }
    }
    Ok((h_null - h_full).max(0.0))
}
