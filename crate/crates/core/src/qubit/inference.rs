//! Inference variances for a qubit target predicted from Pauli measurements
//! on a steering group.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::pauli::{Pauli, PauliString};
use super::state::DensityMatrix;
use crate::error::{Result, SteeringError};
use crate::partition::SitePartition;

/// What the steering group predicts on a round where its detectors do not fire.
///
/// Serialized as `"marginal-mean"` or `"constant:<g>"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum NoClickPolicy {
    /// Predict the target's marginal mean.
    MarginalMean,
    /// Predict a fixed value.
    ConstantGuess(f64),
}

impl fmt::Display for NoClickPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoClickPolicy::MarginalMean => f.write_str("marginal-mean"),
            NoClickPolicy::ConstantGuess(g) => write!(f, "constant:{g}"),
        }
    }
}

impl From<NoClickPolicy> for String {
    fn from(p: NoClickPolicy) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for NoClickPolicy {
    type Error = SteeringError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for NoClickPolicy {
    type Err = SteeringError;

    /// `marginal-mean` or `constant:<g>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "marginal-mean" {
            return Ok(NoClickPolicy::MarginalMean);
        }
        let guess = s
            .strip_prefix("constant:")
            .or_else(|| s.strip_prefix("constant-guess:"))
            .ok_or_else(|| SteeringError::Parse(format!("unknown no-click policy {s:?}")))?;
        let g: f64 = guess
            .trim()
            .parse()
            .map_err(|_| SteeringError::Parse(format!("bad constant guess {guess:?}")))?;
        if !g.is_finite() {
            return Err(SteeringError::Parse("constant guess must be finite".into()));
        }
        Ok(NoClickPolicy::ConstantGuess(g))
    }
}

/// Collective click/no-click model for the whole steering group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionModel {
    efficiency: f64,
    policy: NoClickPolicy,
}

impl DetectionModel {
    pub fn new(efficiency: f64, policy: NoClickPolicy) -> Result<Self> {
        if !(0.0..=1.0).contains(&efficiency) {
            return Err(SteeringError::invalid(format!(
                "detection efficiency {efficiency} outside [0, 1]"
            )));
        }
        if let NoClickPolicy::ConstantGuess(g) = policy {
            if !g.is_finite() {
                return Err(SteeringError::invalid("constant guess must be finite"));
            }
        }
        Ok(Self { efficiency, policy })
    }

    pub fn lossless() -> Self {
        Self {
            efficiency: 1.0,
            policy: NoClickPolicy::MarginalMean,
        }
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }

    pub fn policy(&self) -> NoClickPolicy {
        self.policy
    }
}

fn check_target(target: &PauliString) -> Result<usize> {
    match target.support().as_slice() {
        [site] => Ok(*site),
        _ => Err(SteeringError::invalid(format!(
            "target {target} must act on exactly one site"
        ))),
    }
}

fn check_pair(rho: &DensityMatrix, target: &PauliString, predictor: &PauliString) -> Result<()> {
    for obs in [target, predictor] {
        if obs.n_qubits() != rho.n_qubits() {
            return Err(SteeringError::DimensionMismatch {
                expected: rho.n_qubits(),
                actual: obs.n_qubits(),
            });
        }
    }
    let site = check_target(target)?;
    if predictor.factor(site) != Pauli::I {
        return Err(SteeringError::OverlappingSupport(site));
    }
    Ok(())
}

fn check_predictor_in_group(predictor: &PauliString, partition: &SitePartition) -> Result<()> {
    if let Some(s) = predictor
        .support()
        .into_iter()
        .find(|s| !partition.steering_group().contains(s))
    {
        return Err(SteeringError::invalid(format!(
            "predictor {predictor} acts on site {s} outside the steering group"
        )));
    }
    Ok(())
}

/// `<(T - P)^2> - <T - P>^2` for commuting `T` (target site) and `P` (elsewhere).
pub fn variance_of_difference(
    rho: &DensityMatrix,
    target: &PauliString,
    predictor: &PauliString,
) -> Result<f64> {
    check_pair(rho, target, predictor)?;
    let t = rho.expectation(target)?;
    let p = rho.expectation(predictor)?;
    let tp = rho.expectation(&target.times_disjoint(predictor)?)?;
    // T^2 = P^2 = I
    Ok((2.0 - 2.0 * tp - (t - p).powi(2)).max(0.0))
}

/// Minimum over real estimators `g(a)` of `E[(T - g(a))^2]`, where `a` are the
/// outcomes of measuring `settings[i]` on the i-th site of the steering group.
///
/// The optimum is the conditional mean, giving `sum_a P(a) Var(T | a)`.
pub fn optimal_inference_variance(
    rho: &DensityMatrix,
    partition: &SitePartition,
    target: &PauliString,
    settings: &[Pauli],
) -> Result<f64> {
    let n = rho.n_qubits();
    partition.check_within(n)?;
    if target.n_qubits() != n {
        return Err(SteeringError::DimensionMismatch {
            expected: n,
            actual: target.n_qubits(),
        });
    }
    if check_target(target)? != partition.target() {
        return Err(SteeringError::invalid(format!(
            "target {target} does not act on site {}",
            partition.target()
        )));
    }
    let group = partition.steering_group();
    if settings.len() != group.len() {
        return Err(SteeringError::invalid(format!(
            "{} settings for a group of {} sites",
            settings.len(),
            group.len()
        )));
    }
    if settings.contains(&Pauli::I) {
        return Err(SteeringError::invalid("measurement settings must be X, Y or Z"));
    }

    let m = group.len();
    // Correlators <sigma_S> and <sigma_S T> for every subset S of the group.
    let mut marginal = vec![0.0; 1 << m];
    let mut joint = vec![0.0; 1 << m];
    for subset in 0..(1usize << m) {
        let chosen: Vec<usize> = (0..m).filter(|i| subset & (1 << i) != 0).collect();
        let sites: Vec<usize> = chosen.iter().map(|&i| group[i]).collect();
        let paulis: Vec<Pauli> = chosen.iter().map(|&i| settings[i]).collect();
        let sigma = PauliString::on_sites(n, &sites, &paulis)?;
        marginal[subset] = rho.expectation(&sigma)?;
        joint[subset] = rho.expectation(&sigma.times_disjoint(target)?)?;
    }

    let scale = 1.0 / (1usize << m) as f64;
    let mut explained = 0.0;
    for outcome in 0..(1usize << m) {
        // bit i of `outcome` set means a_i = -1
        let (mut prob, mut weighted) = (0.0, 0.0);
        for subset in 0..(1usize << m) {
            let parity = if (outcome & subset).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            prob += parity * marginal[subset];
            weighted += parity * joint[subset];
        }
        prob *= scale;
        weighted *= scale;
        if prob > 1e-15 {
            explained += weighted * weighted / prob;
        }
    }
    Ok((1.0 - explained).max(0.0))
}

/// Variance of `T - P~`, where `P~` is the predictor outcome on a click
/// (probability = efficiency) and the policy value otherwise.
pub fn inference_variance_with_loss(
    rho: &DensityMatrix,
    partition: &SitePartition,
    target: &PauliString,
    predictor: &PauliString,
    model: &DetectionModel,
) -> Result<f64> {
    partition.check_within(rho.n_qubits())?;
    check_pair(rho, target, predictor)?;
    if check_target(target)? != partition.target() {
        return Err(SteeringError::invalid(format!(
            "target {target} does not act on site {}",
            partition.target()
        )));
    }
    check_predictor_in_group(predictor, partition)?;

    let t = rho.expectation(target)?;
    let p = rho.expectation(predictor)?;
    let tp = rho.expectation(&target.times_disjoint(predictor)?)?;
    let eta = model.efficiency();
    let guess = match model.policy() {
        NoClickPolicy::MarginalMean => t,
        NoClickPolicy::ConstantGuess(g) => g,
    };
    let second = eta * (2.0 - 2.0 * tp) + (1.0 - eta) * (1.0 - 2.0 * guess * t + guess * guess);
    let first = eta * (t - p) + (1.0 - eta) * (t - guess);
    Ok((second - first * first).max(0.0))
}
