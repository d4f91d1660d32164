use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eavesdrop::eavesdrop_point;
use super::secret_sharing::Backend;
use super::shots::{simulate_shots_on_stream, ShotCriterion};
use crate::criteria::{
    genuine_tripartite_cv, genuine_tripartite_qubit, ghz_spin_three_obs, ghz_spin_two_obs,
    CriterionId, CvEstimator, QubitEstimator, StateRef,
};
use crate::cv::{cv_ghz, s_j_fixed_combo, steering_product_cv, HomodynePlan};
use crate::error::{Result, SteeringError};
use crate::qubit::{ghz, DetectionModel, NoClickPolicy};

/// Largest grid a sweep or `start:stop:step` expression may expand to.
pub const MAX_GRID_POINTS: usize = 100_000;
/// Largest per-setting shot count a sweep may request.
pub const MAX_SHOTS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    NoiseP,
    Eta,
    R,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::NoiseP => "noise_p",
            SweepParameter::Eta => "eta",
            SweepParameter::R => "r",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepCriterion {
    TwoObs,
    ThreeObs,
    Result4,
    Eq2,
    Eq6,
    Eavesdrop,
}

impl SweepCriterion {
    fn backend(self) -> Backend {
        match self {
            SweepCriterion::TwoObs | SweepCriterion::ThreeObs => Backend::Qubit,
            SweepCriterion::Eq2 | SweepCriterion::Eq6 | SweepCriterion::Eavesdrop => Backend::Cv,
            SweepCriterion::Result4 => Backend::Qubit,
        }
    }
}

/// Values held fixed while one parameter is swept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaseParameters {
    pub n: usize,
    pub noise_p: f64,
    pub eta: f64,
    pub policy: NoClickPolicy,
    pub r: f64,
    /// Steered site; defaults to site `n` for qubits and mode 1 for CV.
    pub target: Option<usize>,
}

impl Default for BaseParameters {
    fn default() -> Self {
        Self {
            n: 3,
            noise_p: 1.0,
            eta: 1.0,
            policy: NoClickPolicy::MarginalMean,
            r: 1.0,
            target: None,
        }
    }
}

/// Declarative one-parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub backend: Backend,
    pub scenario: String,
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    pub criterion: SweepCriterion,
    #[serde(default)]
    pub seed: u64,
    /// Shots per measurement setting; adds a sampled estimate to each point.
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default)]
    pub base: BaseParameters,
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub index: usize,
    pub parameter: String,
    pub parameter_value: f64,
    pub criterion: CriterionId,
    pub value: f64,
    pub bound: f64,
    pub verdict: bool,
    /// Eavesdropper's value for the eavesdrop criterion.
    pub aux: Option<f64>,
    pub estimate: Option<f64>,
    pub standard_error: Option<f64>,
}

/// Checks that a grid is non-empty, finite and strictly increasing.
pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(SteeringError::invalid("grid is empty"));
    }
    if grid.len() > MAX_GRID_POINTS {
        return Err(SteeringError::invalid(format!(
            "grid has {} points, limit is {MAX_GRID_POINTS}",
            grid.len()
        )));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(SteeringError::invalid("grid values must be finite"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SteeringError::invalid("grid must be strictly increasing"));
    }
    Ok(())
}

/// Expands `start:stop:step` into `start, start + step, ..` up to `stop`.
///
/// Values are rounded to 12 decimals so that `0:1:0.1` yields `0.3` rather
/// than `0.30000000000000004`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(SteeringError::Parse(format!(
            "grid {text:?} is not start:stop:step"
        )));
    };
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| SteeringError::Parse(format!("bad number {s:?} in grid")))?;
        if !v.is_finite() {
            return Err(SteeringError::Parse(format!("non-finite {s:?} in grid")));
        }
        Ok(v)
    };
    let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
    if step.is_nan() || step <= 0.0 || stop < start {
        return Err(SteeringError::invalid(
            "grid must increase: need step > 0 and stop >= start",
        ));
    }
    let span = (stop - start) / step;
    if span.is_nan() || span >= MAX_GRID_POINTS as f64 {
        return Err(SteeringError::invalid(format!(
            "grid expands beyond {MAX_GRID_POINTS} points"
        )));
    }
    let count = (span + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..count)
        .map(|i| {
            let v = start + i as f64 * step;
            let rounded = (v * 1e12).round() / 1e12;
            if rounded.is_finite() { rounded } else { v }
        })
        .collect();
    check_grid(&grid)?;
    Ok(grid)
}

impl SweepConfig {
    /// Parses and validates a JSON configuration.
    pub fn from_json(text: &str) -> Result<Self> {
        let config: SweepConfig =
            serde_json::from_str(text).map_err(|e| SteeringError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        check_grid(&self.grid)?;
        let c = self.criterion;
        let backend_ok = match c {
            SweepCriterion::Result4 => true,
            _ => c.backend() == self.backend,
        };
        if !backend_ok {
            return Err(SteeringError::invalid(format!(
                "criterion {c:?} is not available on the {:?} backend",
                self.backend
            )));
        }
        let param_ok = match (self.backend, self.parameter) {
            (Backend::Qubit, SweepParameter::NoiseP | SweepParameter::Eta) => true,
            (Backend::Cv, SweepParameter::R) => true,
            (Backend::Cv, SweepParameter::Eta) => c == SweepCriterion::Eavesdrop,
            _ => false,
        };
        if !param_ok {
            return Err(SteeringError::invalid(format!(
                "parameter {} cannot be swept for {c:?} on {:?}",
                self.parameter.name(),
                self.backend
            )));
        }
        for &v in &self.grid {
            match self.parameter {
                SweepParameter::NoiseP | SweepParameter::Eta if !(0.0..=1.0).contains(&v) => {
                    return Err(SteeringError::invalid(format!(
                        "{} = {v} outside [0, 1]",
                        self.parameter.name()
                    )))
                }
                SweepParameter::R if v < 0.0 => {
                    return Err(SteeringError::invalid(format!("r = {v} is negative")))
                }
                _ => {}
            }
        }
        let b = &self.base;
        if !(0.0..=1.0).contains(&b.noise_p) || !(0.0..=1.0).contains(&b.eta) {
            return Err(SteeringError::invalid("base noise_p and eta must lie in [0, 1]"));
        }
        if b.r.is_nan() || b.r < 0.0 || !b.r.is_finite() {
            return Err(SteeringError::invalid("base r must be finite and >= 0"));
        }
        match self.backend {
            Backend::Qubit => {
                if !(2..=8).contains(&b.n) {
                    return Err(SteeringError::invalid("qubit sweeps support n in 2..=8"));
                }
                if c == SweepCriterion::Result4 && b.n != 3 {
                    return Err(SteeringError::invalid("result4 needs n = 3"));
                }
            }
            Backend::Cv => {
                if b.target.is_some_and(|t| t == 0 || t > 3) {
                    return Err(SteeringError::invalid("CV target must be 1, 2 or 3"));
                }
            }
        }
        if let Some(t) = b.target {
            if self.backend == Backend::Qubit && (t == 0 || t > b.n) {
                return Err(SteeringError::invalid(format!("target {t} outside 1..={}", b.n)));
            }
        }
        if let Some(shots) = self.shots {
            if !(2..=MAX_SHOTS).contains(&shots) {
                return Err(SteeringError::invalid(format!(
                    "shots must lie in 2..={MAX_SHOTS}"
                )));
            }
            if !matches!(c, SweepCriterion::TwoObs | SweepCriterion::Eq6) {
                return Err(SteeringError::invalid(
                    "shot sampling is available for two-obs and eq6",
                ));
            }
        }
        Ok(())
    }
}

/// Evaluates every grid point in parallel; output is in grid order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepPoint>> {
    config.validate()?;
    config
        .grid
        .par_iter()
        .enumerate()
        .map(|(index, &value)| evaluate_point(config, index, value))
        .collect()
}

fn evaluate_point(config: &SweepConfig, index: usize, value: f64) -> Result<SweepPoint> {
    let mut base = config.base.clone();
    match config.parameter {
        SweepParameter::NoiseP => base.noise_p = value,
        SweepParameter::Eta => base.eta = value,
        SweepParameter::R => base.r = value,
    }
    let mut point = SweepPoint {
        index,
        parameter: config.parameter.name().to_owned(),
        parameter_value: value,
        criterion: CriterionId::SpinSum2Obs,
        value: 0.0,
        bound: 1.0,
        verdict: false,
        aux: None,
        estimate: None,
        standard_error: None,
    };
    let mut set = |criterion: CriterionId, v: f64, verdict: bool| {
        point.criterion = criterion;
        point.value = v;
        point.bound = criterion.bound();
        point.verdict = verdict;
    };
    let shot_criterion;
    match config.backend {
        Backend::Qubit => {
            let rho = ghz(base.n)?.to_density().depolarize_global(base.noise_p)?;
            let model = DetectionModel::new(base.eta, base.policy)?;
            let target = base.target.unwrap_or(base.n);
            match config.criterion {
                SweepCriterion::TwoObs => {
                    let v = ghz_spin_two_obs(&rho, target, &model)?;
                    set(v.criterion(), v.value(), v.verdict());
                }
                SweepCriterion::ThreeObs => {
                    let v = ghz_spin_three_obs(&rho, target, &model)?;
                    set(v.criterion(), v.value(), v.verdict());
                }
                SweepCriterion::Result4 => {
                    let r = genuine_tripartite_qubit(&rho, QubitEstimator::GhzPredictors, &model)?;
                    set(r.criterion(), r.sum(), r.genuine());
                }
                _ => unreachable!("validated"),
            }
            shot_criterion = ShotCriterion::SpinTwoObs { target };
            if let Some(shots) = config.shots {
                let e = simulate_shots_on_stream(
                    StateRef::Qubit(&rho),
                    shot_criterion,
                    shots,
                    config.seed,
                    index as u64,
                )?;
                point.estimate = Some(e.estimate);
                point.standard_error = Some(e.standard_error);
            }
        }
        Backend::Cv => {
            let j = base.target.unwrap_or(1);
            let (k, m) = match j {
                1 => (2, 3),
                2 => (3, 1),
                _ => (1, 2),
            };
            match config.criterion {
                SweepCriterion::Eavesdrop => {
                    let rec = eavesdrop_point(base.r, base.eta)?;
                    set(rec.criterion, rec.value_a_prime, rec.steering_a_prime);
                    point.aux = Some(rec.value_e);
                    return Ok(point);
                }
                SweepCriterion::Eq2 => {
                    let s = cv_ghz(base.r)?;
                    let v = steering_product_cv(
                        &s,
                        j,
                        &HomodynePlan::x_of(&[k, m])?,
                        &HomodynePlan::p_of(&[k, m])?,
                    )?;
                    set(v.criterion(), v.value(), v.verdict());
                }
                SweepCriterion::Eq6 => {
                    let v = s_j_fixed_combo(&cv_ghz(base.r)?, j, k, m)?;
                    set(v.criterion(), v.value(), v.verdict());
                }
                SweepCriterion::Result4 => {
                    let r = genuine_tripartite_cv(&cv_ghz(base.r)?, CvEstimator::FixedCombo)?;
                    set(r.criterion(), r.sum(), r.genuine());
                }
                _ => unreachable!("validated"),
            }
            shot_criterion = ShotCriterion::CvFixedCombo { j, k, m };
            if let Some(shots) = config.shots {
                let s = cv_ghz(base.r)?;
                let e = simulate_shots_on_stream(
                    StateRef::Cv(&s),
                    shot_criterion,
                    shots,
                    config.seed,
                    index as u64,
                )?;
                point.estimate = Some(e.estimate);
                point.standard_error = Some(e.standard_error);
            }
        }
    }
    Ok(point)
}
