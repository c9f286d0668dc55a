#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use transfer_entropy::ContinuousSeries;

/// Scalar pair x_t = a·x_{t−1} + c·y_{t−1} + ε_t, y_t = b·y_{t−1} + η_t with
/// unit-variance Gaussian noise, started after a burn-in.
pub fn simulate_var(
    n: usize,
    a: f64,
    b: f64,
    c: f64,
    seed: u64,
    stream: u64,
) -> (ContinuousSeries, ContinuousSeries) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let (mut xp, mut yp) = (0.0, 0.0);
    for _ in 0..500 {
        let x = a * xp + c * yp + normal();
        yp = b * yp + normal();
        xp = x;
    }
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let x = a * xp + c * yp + normal();
        let y = b * yp + normal();
        xs.push(x);
        ys.push(y);
        xp = x;
        yp = y;
    }
    (
        ContinuousSeries::from_scalars(xs).unwrap(),
        ContinuousSeries::from_scalars(ys).unwrap(),
    )
}

/// Population TE of the pair above with a = b = 0: ½·ln(1 + c²).
pub fn pure_lag_population_te(c: f64) -> f64 {
    0.5 * (1.0 + c * c).ln()
}
