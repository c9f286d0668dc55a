use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::toy::{simulate_toy_realization, toy_te_closed_form, ToyChainParams};
use crate::discrete::{count_cells, dof, plugin_te};
use crate::error::{Error, Result};
use crate::inference::{chi2_cdf, chi2_sf, ks_distance, noncentral_chi2_cdf};

pub const MIN_REPLICATIONS: usize = 100;

/// Asymptotic law the ensemble statistics are compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceDistribution {
    CentralChiSquared { dof: u64 },
    NoncentralChiSquared { dof: u64, lambda: f64 },
}

impl ReferenceDistribution {
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::CentralChiSquared { dof } => chi2_cdf(x, dof),
            Self::NoncentralChiSquared { dof, lambda } => noncentral_chi2_cdf(x, dof, lambda),
        }
        .expect("reference parameters are validated at construction")
    }

    pub fn dof(&self) -> u64 {
        match *self {
            Self::CentralChiSquared { dof } | Self::NoncentralChiSquared { dof, .. } => dof,
        }
    }
}

/// Empirical law of 2(n−k)·T̂ over an ensemble of toy-chain realizations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcdfReport {
    pub params: ToyChainParams,
    pub n: usize,
    pub k: usize,
    pub reps: usize,
    /// Analytic transfer entropy of the generating chain, nats.
    pub true_te: f64,
    pub reference: ReferenceDistribution,
    pub ks_distance: f64,
    pub sorted_statistics: Vec<f64>,
}

impl EcdfReport {
    pub fn effective_samples(&self) -> usize {
        self.n - self.k
    }

    /// Per-realization estimates T̂, in ascending order.
    pub fn estimates(&self) -> impl Iterator<Item = f64> + '_ {
        let scale = 2.0 * self.effective_samples() as f64;
        self.sorted_statistics.iter().map(move |s| s / scale)
    }

    pub fn mean_estimate(&self) -> f64 {
        self.estimates().sum::<f64>() / self.reps as f64
    }

    /// Central χ²(dof) p-values of every realization, ascending.
    pub fn sorted_p_values(&self) -> Vec<f64> {
        let d = self.reference.dof();
        let mut p: Vec<f64> = self
            .sorted_statistics
            .iter()
            .map(|&s| chi2_sf(s, d).expect("statistics are nonnegative"))
            .collect();
        p.sort_by(f64::total_cmp);
        p
    }

    /// KS distance of the null p-values from the uniform law.
    pub fn p_value_ks_distance(&self) -> f64 {
        ks_distance(&self.sorted_p_values(), |u| u.clamp(0.0, 1.0))
    }

    /// Plot-ready rows: statistic, empirical CDF, reference CDF.
    pub fn to_csv(&self) -> String {
        let n = self.sorted_statistics.len() as f64;
        let mut out = String::from("statistic,ecdf,reference_cdf\n");
        for (i, &s) in self.sorted_statistics.iter().enumerate() {
            let _ = writeln!(out, "{s},{},{}", (i + 1) as f64 / n, self.reference.cdf(s));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }
}

/// Plug-in statistics 2(n−k)·T̂ of `reps` independent realizations, in
/// realization order.
pub fn ensemble_statistics(
    params: &ToyChainParams,
    n: usize,
    k: usize,
    reps: usize,
) -> Result<Vec<f64>> {
    params.validate()?;
    if k == 0 {
        return Err(Error::ZeroOrder);
    }
    if n <= k {
        return Err(Error::TooShort { n, k });
    }
    let scale = 2.0 * (n - k) as f64;
    (0..reps as u64)
        .into_par_iter()
        .map(|index| {
            let (x, y) = simulate_toy_realization(params, n, index)?;
            Ok(scale * plugin_te(&count_cells(&x, &y, k)?))
        })
        .collect()
}

/// Simulates `reps` realizations and compares the ECDF of the plug-in
/// statistic with its asymptotic χ² law (central when the chain's transfer
/// entropy is zero, non-central with λ = 2(n−k)·TE otherwise).
pub fn calibration_ensemble(
    params: &ToyChainParams,
    n: usize,
    k: usize,
    reps: usize,
) -> Result<EcdfReport> {
    if reps < MIN_REPLICATIONS {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_REPLICATIONS} replications required, got {reps}"
        )));
    }
    let mut sorted_statistics = ensemble_statistics(params, n, k, reps)?;
    sorted_statistics.sort_by(f64::total_cmp);

    let true_te = toy_te_closed_form(params.theta)?;
    let d = dof(2, 2, k, None)?.dof;
    let reference = if true_te == 0.0 {
        ReferenceDistribution::CentralChiSquared { dof: d }
    } else {
        ReferenceDistribution::NoncentralChiSquared {
            dof: d,
            lambda: 2.0 * (n - k) as f64 * true_te,
        }
    };
    let ks = ks_distance(&sorted_statistics, |x| reference.cdf(x));
    Ok(EcdfReport {
        params: *params,
        n,
        k,
        reps,
        true_te,
        reference,
        ks_distance: ks,
        sorted_statistics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_smoke_report() {
        let p = ToyChainParams::new(0.0, 0.6, 5).unwrap();
        let r = calibration_ensemble(&p, 32, 1, 100).unwrap();
        assert_eq!(r.sorted_statistics.len(), 100);
        assert!(r.sorted_statistics.windows(2).all(|w| w[0] <= w[1]));
        assert!((0.0..=1.0).contains(&r.ks_distance));
        assert_eq!(
            r.reference,
            ReferenceDistribution::CentralChiSquared { dof: 2 }
        );
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 101);
        assert!(csv.starts_with("statistic,ecdf,reference_cdf\n"));
    }

    #[test]
    fn noncentral_reference_for_coupled_chain() {
        let p = ToyChainParams::new(0.4, 0.6, 5).unwrap();
        let r = calibration_ensemble(&p, 64, 1, 100).unwrap();
        match r.reference {
            ReferenceDistribution::NoncentralChiSquared { dof, lambda } => {
                assert_eq!(dof, 2);
                assert!((lambda - 2.0 * 63.0 * toy_te_closed_form(0.4).unwrap()).abs() < 1e-12);
            }
            other => panic!("unexpected reference {other:?}"),
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let p = ToyChainParams::new(0.2, 0.6, 99).unwrap();
        let a = calibration_ensemble(&p, 64, 1, 150).unwrap();
        let b = calibration_ensemble(&p, 64, 1, 150).unwrap();
        assert_eq!(a, b);
        let back: EcdfReport = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn rejects_bad_arguments() {
        let p = ToyChainParams::new(0.2, 0.6, 99).unwrap();
        assert!(calibration_ensemble(&p, 64, 1, 99).is_err());
        assert!(calibration_ensemble(&p, 1, 1, 100).is_err());
        let bad = ToyChainParams {
            theta: 1.0,
            phi: 0.0,
            seed: 0,
        };
        assert!(calibration_ensemble(&bad, 64, 1, 100).is_err());
    }
}
