//! Finite-shot emulation of the criteria by sampling exact outcome
//! distributions with a seeded ChaCha stream.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::criteria::{CriterionId, StateRef};
use crate::cv::{GaussianState, QuadratureCombo};
use crate::error::{Result, SteeringError};
use crate::qubit::{ghz_predictor_for, DensityMatrix, Pauli, PauliString, SpinAxis};

/// Criterion estimated from samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "criterion", rename_all = "kebab-case")]
pub enum ShotCriterion {
    /// Two-observable spin sum for `target` with the GHZ predictors.
    SpinTwoObs { target: usize },
    /// `Delta(x_j - x_k) Delta(p_j + p_k + p_m)`.
    CvFixedCombo { j: usize, k: usize, m: usize },
}

impl ShotCriterion {
    pub fn id(self) -> CriterionId {
        match self {
            ShotCriterion::SpinTwoObs { .. } => CriterionId::SpinSum2Obs,
            ShotCriterion::CvFixedCombo { .. } => CriterionId::CvFixedCombo,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotEstimate {
    pub criterion: CriterionId,
    pub bound: f64,
    pub shots: u64,
    pub seed: u64,
    pub estimate: f64,
    pub standard_error: f64,
}

/// Estimates the criterion from `shots` samples per measurement setting.
///
/// Identical `(seed, shots)` give identical results.
pub fn simulate_shots(
    state: StateRef<'_>,
    criterion: ShotCriterion,
    shots: u64,
    seed: u64,
) -> Result<ShotEstimate> {
    simulate_shots_on_stream(state, criterion, shots, seed, 0)
}

/// As [`simulate_shots`], drawing from ChaCha stream `stream` of `seed`.
pub fn simulate_shots_on_stream(
    state: StateRef<'_>,
    criterion: ShotCriterion,
    shots: u64,
    seed: u64,
    stream: u64,
) -> Result<ShotEstimate> {
    if shots < 2 {
        return Err(SteeringError::invalid(format!("need at least 2 shots, got {shots}")));
    }
    let shots_usize = usize::try_from(shots)
        .map_err(|_| SteeringError::invalid("shot count too large"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let (estimate, standard_error) = match (state, criterion) {
        (StateRef::Qubit(rho), ShotCriterion::SpinTwoObs { target }) => {
            spin_two_obs_shots(rho, target, shots_usize, &mut rng)?
        }
        (StateRef::Cv(s), ShotCriterion::CvFixedCombo { j, k, m }) => {
            fixed_combo_shots(s, (j, k, m), shots_usize, &mut rng)?
        }
        _ => {
            return Err(SteeringError::invalid(
                "criterion does not match the state's backend",
            ))
        }
    };
    Ok(ShotEstimate {
        criterion: criterion.id(),
        bound: criterion.id().bound(),
        shots,
        seed,
        estimate,
        standard_error,
    })
}

/// Unbiased sample variance and its large-sample standard error.
fn variance_with_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let (m2, m4) = samples.iter().fold((0.0, 0.0), |(m2, m4), x| {
        let d2 = (x - mean).powi(2);
        (m2 + d2, m4 + d2 * d2)
    });
    let s2 = m2 / (n - 1.0);
    let sigma4 = (m2 / n).powi(2);
    let var_s2 = (m4 / n - sigma4 * (n - 3.0) / (n - 1.0)) / n;
    (s2, var_s2.max(0.0).sqrt())
}

fn spin_two_obs_shots(
    rho: &DensityMatrix,
    target: usize,
    shots: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64)> {
    let n = rho.n_qubits();
    let mut total = 0.0;
    let mut var = 0.0;
    for (axis, pauli) in [(SpinAxis::X, Pauli::X), (SpinAxis::Y, Pauli::Y)] {
        let t = PauliString::single(n, target, pauli)?;
        let p = ghz_predictor_for(n, target, axis)?;
        let et = rho.expectation(&t)?;
        let ep = rho.expectation(&p)?;
        let etp = rho.expectation(&t.times_disjoint(&p)?)?;
        // P(t, p) = (1 + t<T> + p<P> + tp<TP>) / 4 over t, p in {+1, -1}
        let outcomes = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];
        let probs: Vec<f64> = outcomes
            .iter()
            .map(|(a, b)| ((1.0 + a * et + b * ep + a * b * etp) / 4.0).max(0.0))
            .collect();
        let norm: f64 = probs.iter().sum();
        let diffs: Vec<f64> = (0..shots)
            .map(|_| {
                let u = rng.gen::<f64>() * norm;
                let mut acc = 0.0;
                for (prob, (a, b)) in probs.iter().zip(&outcomes) {
                    acc += prob;
                    if u < acc {
                        return a - b;
                    }
                }
                let (a, b) = outcomes[3];
                a - b
            })
            .collect();
        let (s2, se) = variance_with_se(&diffs);
        total += s2;
        var += se * se;
    }
    Ok((total, var.sqrt()))
}

fn sampling_root(cov: &DMatrix<f64>) -> DMatrix<f64> {
    match cov.clone().cholesky() {
        Some(ch) => ch.l(),
        None => {
            // singular covariance: for symmetric PSD input, U diag(sqrt(s)) is a root
            let svd = cov.clone().svd(true, false);
            let u = svd.u.expect("requested U");
            u * DMatrix::from_diagonal(&svd.singular_values.map(f64::sqrt))
        }
    }
}

fn fixed_combo_shots(
    state: &GaussianState,
    (j, k, m): (usize, usize, usize),
    shots: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64)> {
    let n = state.n_modes();
    if j == k || j == m || k == m {
        return Err(SteeringError::invalid("modes must be distinct"));
    }
    let x_diff = QuadratureCombo::x(n, j)?.plus(-1.0, &QuadratureCombo::x(n, k)?)?;
    let p_sum = QuadratureCombo::p(n, j)?
        .plus(1.0, &QuadratureCombo::p(n, k)?)?
        .plus(1.0, &QuadratureCombo::p(n, m)?)?;
    let root = sampling_root(state.cov());
    let dim = 2 * n;
    let mut sample_batch = |combo: &QuadratureCombo| -> (f64, f64) {
        let c = DVector::from_column_slice(combo.coefficients());
        let proj = root.transpose() * &c;
        let offset = c.dot(state.mean());
        let values: Vec<f64> = (0..shots)
            .map(|_| {
                let z = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
                offset + proj.dot(&z)
            })
            .collect();
        variance_with_se(&values)
    };
    let (vx, sex) = sample_batch(&x_diff);
    let (vp, sep) = sample_batch(&p_sum);
    let estimate = (vx * vp).sqrt();
    let rel = if vx > 0.0 && vp > 0.0 {
        ((sex / vx).powi(2) + (sep / vp).powi(2)).sqrt()
    } else {
        0.0
    };
    Ok((estimate, 0.5 * estimate * rel))
}
