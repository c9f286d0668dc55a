use transfer_entropy::discrete::dof;
use transfer_entropy::simulator::{ensemble_statistics, toy_te_closed_form, ToyChainParams};
use transfer_entropy::te_test;

#[test]
fn interval_coverage_on_toy_chain() {
    let params = ToyChainParams::new(0.4, 0.6, 2024).unwrap();
    let (n, reps) = (2048usize, 1000usize);
    let truth = toy_te_closed_form(0.4).unwrap();
    let d = dof(2, 2, 1, None).unwrap().dof;
    let scale = 2.0 * (n - 1) as f64;
    let covered = ensemble_statistics(&params, n, 1, reps)
        .unwrap()
        .into_iter()
        .filter(|&s| {
            let r = te_test(s / scale, (n - 1) as u64, d).unwrap();
            r.ci_lower <= truth && truth <= r.ci_upper
        })
        .count();
    let rate = covered as f64 / reps as f64;
    assert!((rate - 0.95).abs() <= 0.025, "coverage {rate}");
}

#[test]
fn mean_tracks_truth_plus_half_dof_over_n() {
    let params = ToyChainParams::new(0.4, 0.6, 8).unwrap();
    let truth = toy_te_closed_form(0.4).unwrap();
    let reps = 400;
    for n in [512usize, 2048, 8192] {
        let scale = 2.0 * (n - 1) as f64;
        let estimates: Vec<f64> = ensemble_statistics(&params, n, 1, reps)
            .unwrap()
            .into_iter()
            .map(|s| s / scale)
            .collect();
        let mean = estimates.iter().sum::<f64>() / reps as f64;
        let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let se = (var / reps as f64).sqrt();
        let expected = truth + 2.0 / scale;
        assert!(
            (mean - expected).abs() < 4.0 * se,
            "n={n}: mean {mean}, expected {expected}, se {se}"
        );
    }
}

#[test]
fn null_rejection_rate_is_near_nominal() {
    let params = ToyChainParams::new(0.0, 0.6, 13).unwrap();
    let (n, reps) = (1024usize, 2000usize);
    let d = dof(2, 2, 1, None).unwrap().dof;
    let scale = 2.0 * (n - 1) as f64;
    let rejections = ensemble_statistics(&params, n, 1, reps)
        .unwrap()
        .into_iter()
        .filter(|&s| te_test(s / scale, (n - 1) as u64, d).unwrap().p_value < 0.05)
        .count();
    let rate = rejections as f64 / reps as f64;
    // Binomial sd at 0.05 with 2000 draws is about 0.0049.
    assert!((rate - 0.05).abs() < 0.02, "rejection rate {rate}");
}
