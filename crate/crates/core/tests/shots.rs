use steering::criteria::StateRef;
use steering::cv::cv_ghz;
use steering::qubit::ghz;
use steering::scenarios::{simulate_shots, simulate_shots_on_stream, ShotCriterion};

const SPIN: ShotCriterion = ShotCriterion::SpinTwoObs { target: 3 };

#[test]
fn ideal_ghz_estimate_is_exact() {
    let rho = ghz(3).unwrap().to_density();
    let est = simulate_shots(StateRef::Qubit(&rho), SPIN, 10_000, 1).unwrap();
    // perfect correlations: every sample agrees, so both numbers are zero
    assert!(est.estimate.abs() <= 5.0 * est.standard_error);
    assert_eq!(est.standard_error, 0.0);
}

#[test]
fn depolarized_estimate_within_five_se() {
    let rho = ghz(3).unwrap().to_density().depolarize_global(0.5).unwrap();
    let est = simulate_shots(StateRef::Qubit(&rho), SPIN, 100_000, 2).unwrap();
    assert!((est.estimate - 2.0).abs() <= 5.0 * est.standard_error, "{est:?}");
}

#[test]
fn same_seed_same_stream() {
    let rho = ghz(3).unwrap().to_density().depolarize_global(0.8).unwrap();
    let a = simulate_shots_on_stream(StateRef::Qubit(&rho), SPIN, 2_000, 5, 3).unwrap();
    let b = simulate_shots_on_stream(StateRef::Qubit(&rho), SPIN, 2_000, 5, 3).unwrap();
    let c = simulate_shots_on_stream(StateRef::Qubit(&rho), SPIN, 2_000, 5, 4).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.estimate, c.estimate);
}

/// Least-squares slope of log(rms error) against log(shots).
fn convergence_slope(mut error_at: impl FnMut(u64, u64) -> f64) -> f64 {
    let shot_counts = [250u64, 1_000, 4_000, 16_000, 64_000];
    let reps = 40;
    let pts: Vec<(f64, f64)> = shot_counts
        .iter()
        .map(|&n| {
            let mse = (0..reps).map(|k| error_at(n, k).powi(2)).sum::<f64>() / reps as f64;
            ((n as f64).ln(), mse.sqrt().ln())
        })
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    num / den
}

#[test]
fn qubit_error_scales_as_inverse_sqrt_shots() {
    let rho = ghz(3).unwrap().to_density().depolarize_global(0.6).unwrap();
    let exact = 4.0 * (1.0 - 0.6);
    let slope = convergence_slope(|n, k| {
        simulate_shots_on_stream(StateRef::Qubit(&rho), SPIN, n, 99, k).unwrap().estimate - exact
    });
    assert!((slope + 0.5).abs() <= 0.1, "slope {slope}");
}

#[test]
fn cv_error_scales_as_inverse_sqrt_shots() {
    let st = cv_ghz(0.8).unwrap();
    let exact = 6f64.sqrt() * (-1.6f64).exp();
    let crit = ShotCriterion::CvFixedCombo { j: 1, k: 2, m: 3 };
    let slope = convergence_slope(|n, k| {
        simulate_shots_on_stream(StateRef::Cv(&st), crit, n, 7, k).unwrap().estimate - exact
    });
    assert!((slope + 0.5).abs() <= 0.1, "slope {slope}");
}
