//! Quadrature combinations, homodyne plans and optimal linear inference.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::state::GaussianState;
use crate::criteria::{CriterionId, SteeringValue};
use crate::error::{Result, SteeringError};
use crate::partition::SitePartition;

/// Singular values of the measured block below this are treated as zero.
pub const PINV_CUTOFF: f64 = 1e-12;

/// Real linear combination `sum_q c_q r_q` of the quadratures `(x1, p1, ..)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureCombo {
    coefficients: Vec<f64>,
}

impl QuadratureCombo {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.len() % 2 == 1 {
            return Err(SteeringError::invalid("combo needs 2N coefficients"));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(SteeringError::invalid("combo coefficients must be finite"));
        }
        if coefficients.iter().all(|&c| c == 0.0) {
            return Err(SteeringError::invalid("combo coefficients are all zero"));
        }
        Ok(Self { coefficients })
    }

    /// `cos(angle) x_mode + sin(angle) p_mode`.
    pub fn quadrature(n_modes: usize, mode: usize, angle: f64) -> Result<Self> {
        if mode == 0 || mode > n_modes {
            return Err(SteeringError::invalid(format!("mode {mode} outside 1..={n_modes}")));
        }
        let mut c = vec![0.0; 2 * n_modes];
        let (s, co) = angle.sin_cos();
        c[2 * (mode - 1)] = co;
        c[2 * (mode - 1) + 1] = s;
        // keep exact zeros for the axis-aligned cases
        if angle == 0.0 {
            c[2 * (mode - 1) + 1] = 0.0;
        } else if angle == std::f64::consts::FRAC_PI_2 {
            c[2 * (mode - 1)] = 0.0;
            c[2 * (mode - 1) + 1] = 1.0;
        }
        Self::new(c)
    }

    pub fn x(n_modes: usize, mode: usize) -> Result<Self> {
        Self::quadrature(n_modes, mode, 0.0)
    }

    pub fn p(n_modes: usize, mode: usize) -> Result<Self> {
        Self::quadrature(n_modes, mode, std::f64::consts::FRAC_PI_2)
    }

    /// `self + weight * other`.
    pub fn plus(&self, weight: f64, other: &QuadratureCombo) -> Result<Self> {
        if other.coefficients.len() != self.coefficients.len() {
            return Err(SteeringError::DimensionMismatch {
                expected: self.coefficients.len(),
                actual: other.coefficients.len(),
            });
        }
        Self::new(
            self.coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a + weight * b)
                .collect(),
        )
    }

    pub fn n_modes(&self) -> usize {
        self.coefficients.len() / 2
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Modes (1-based) with a non-zero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_modes())
            .filter(|k| self.coefficients[2 * k] != 0.0 || self.coefficients[2 * k + 1] != 0.0)
            .map(|k| k + 1)
            .collect()
    }

    fn vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.coefficients)
    }
}

/// One homodyne measurement per listed mode; angle 0 reads x, pi/2 reads p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomodynePlan {
    measurements: Vec<(usize, f64)>,
}

impl HomodynePlan {
    pub fn new(modes: &[usize], angles: &[f64]) -> Result<Self> {
        if modes.len() != angles.len() {
            return Err(SteeringError::DimensionMismatch {
                expected: modes.len(),
                actual: angles.len(),
            });
        }
        let mut sorted = modes.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != modes.len() {
            return Err(SteeringError::invalid("a mode may be measured only once"));
        }
        if modes.contains(&0) {
            return Err(SteeringError::invalid("modes are numbered from 1"));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(SteeringError::invalid("homodyne angles must be finite"));
        }
        Ok(Self {
            measurements: modes.iter().copied().zip(angles.iter().copied()).collect(),
        })
    }

    pub fn x_of(modes: &[usize]) -> Result<Self> {
        Self::new(modes, &vec![0.0; modes.len()])
    }

    pub fn p_of(modes: &[usize]) -> Result<Self> {
        Self::new(modes, &vec![std::f64::consts::FRAC_PI_2; modes.len()])
    }

    pub fn modes(&self) -> Vec<usize> {
        self.measurements.iter().map(|(m, _)| *m).collect()
    }

    pub fn measurements(&self) -> &[(usize, f64)] {
        &self.measurements
    }
}

/// `c^T V c`.
pub fn combo_variance(state: &GaussianState, combo: &QuadratureCombo) -> Result<f64> {
    check_len(state, combo)?;
    let c = combo.vector();
    Ok((c.transpose() * state.cov() * &c)[(0, 0)].max(0.0))
}

fn check_len(state: &GaussianState, combo: &QuadratureCombo) -> Result<()> {
    if combo.n_modes() != state.n_modes() {
        return Err(SteeringError::DimensionMismatch {
            expected: state.n_modes(),
            actual: combo.n_modes(),
        });
    }
    Ok(())
}

/// `min_g Var(T - sum_i g_i M_i) = V_T - S_TM V_MM^+ S_MT` over the plan's
/// homodyne outcomes `M_i`.
pub fn optimal_conditional_variance(
    state: &GaussianState,
    target: &QuadratureCombo,
    plan: &HomodynePlan,
) -> Result<f64> {
    check_len(state, target)?;
    let support = target.support();
    let n = state.n_modes();
    let measured: Vec<QuadratureCombo> = plan
        .measurements()
        .iter()
        .map(|&(mode, angle)| {
            if support.contains(&mode) {
                return Err(SteeringError::OverlappingSupport(mode));
            }
            QuadratureCombo::quadrature(n, mode, angle)
        })
        .collect::<Result<_>>()?;
    let v_t = combo_variance(state, target)?;
    if measured.is_empty() {
        return Ok(v_t);
    }
    let t = target.vector();
    let m = DMatrix::from_columns(&measured.iter().map(|q| q.vector()).collect::<Vec<_>>());
    let cross = m.transpose() * state.cov() * &t;
    let block = m.transpose() * state.cov() * &m;
    let pinv = block
        .pseudo_inverse(PINV_CUTOFF)
        .map_err(|e| SteeringError::invalid(e.to_string()))?;
    let explained = (cross.transpose() * pinv * &cross)[(0, 0)];
    Ok((v_t - explained).max(0.0))
}

/// `Var(T | M)` minimized over every angle assignment drawn from `angles`
/// for the listed modes. Returns the variance and the chosen plan.
pub fn best_conditional_variance(
    state: &GaussianState,
    target: &QuadratureCombo,
    modes: &[usize],
    angles: &[f64],
) -> Result<(f64, HomodynePlan)> {
    if angles.is_empty() {
        return Err(SteeringError::invalid("angle menu is empty"));
    }
    let k = modes.len();
    let total = angles.len().checked_pow(k as u32).ok_or_else(|| {
        SteeringError::invalid("angle menu too large for this many modes")
    })?;
    let mut best: Option<(f64, HomodynePlan)> = None;
    let mut choice = vec![0.0; k];
    for code in 0..total {
        let mut rest = code;
        for slot in choice.iter_mut() {
            *slot = angles[rest % angles.len()];
            rest /= angles.len();
        }
        let plan = HomodynePlan::new(modes, &choice)?;
        let v = optimal_conditional_variance(state, target, &plan)?;
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, plan));
        }
    }
    Ok(best.expect("at least one plan"))
}

/// `n` equally spaced homodyne angles in `[0, pi)`.
pub fn angle_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| i as f64 * std::f64::consts::PI / n as f64)
        .collect()
}

/// `Delta_inf x_B * Delta_inf p_B` with x inferred under `plan_x` and p under `plan_p`.
pub fn steering_product_cv(
    state: &GaussianState,
    target_mode: usize,
    plan_x: &HomodynePlan,
    plan_p: &HomodynePlan,
) -> Result<SteeringValue> {
    let n = state.n_modes();
    let vx = optimal_conditional_variance(state, &QuadratureCombo::x(n, target_mode)?, plan_x)?;
    let vp = optimal_conditional_variance(state, &QuadratureCombo::p(n, target_mode)?, plan_p)?;
    let mut group = plan_x.modes();
    group.extend(plan_p.modes());
    let partition = SitePartition::new(group, target_mode)?;
    partition.check_within(n)?;
    Ok(SteeringValue::new(
        CriterionId::CvProduct,
        partition,
        (vx * vp).sqrt(),
    ))
}

/// `Delta(x_j - x_k) Delta(p_j + p_k + p_m)` with unit gains.
pub fn s_j_fixed_combo(state: &GaussianState, j: usize, k: usize, m: usize) -> Result<SteeringValue> {
    let n = state.n_modes();
    if j == k || j == m || k == m {
        return Err(SteeringError::invalid(format!("modes {j}, {k}, {m} must be distinct")));
    }
    let x_diff = QuadratureCombo::x(n, j)?.plus(-1.0, &QuadratureCombo::x(n, k)?)?;
    let p_sum = QuadratureCombo::p(n, j)?
        .plus(1.0, &QuadratureCombo::p(n, k)?)?
        .plus(1.0, &QuadratureCombo::p(n, m)?)?;
    let value = (combo_variance(state, &x_diff)? * combo_variance(state, &p_sum)?).sqrt();
    Ok(SteeringValue::new(
        CriterionId::CvFixedCombo,
        SitePartition::new([k, m], j)?,
        value,
    ))
}

/// Gain-optimized counterpart of [`s_j_fixed_combo`]: x_j inferred from x_k, x_m
/// and p_j from p_k, p_m with optimal linear gains.
pub fn s_j_optimal_gains(state: &GaussianState, j: usize, k: usize, m: usize) -> Result<SteeringValue> {
    if j == k || j == m || k == m {
        return Err(SteeringError::invalid(format!("modes {j}, {k}, {m} must be distinct")));
    }
    steering_product_cv(
        state,
        j,
        &HomodynePlan::x_of(&[k, m])?,
        &HomodynePlan::p_of(&[k, m])?,
    )
}

/// Steering product for `partition` with x and p inferences each optimized
/// over the angle menu.
pub fn best_steering_product(
    state: &GaussianState,
    partition: &SitePartition,
    angles: &[f64],
) -> Result<SteeringValue> {
    let n = state.n_modes();
    partition.check_within(n)?;
    let group = partition.steering_group();
    let b = partition.target();
    let (vx, _) = best_conditional_variance(state, &QuadratureCombo::x(n, b)?, group, angles)?;
    let (vp, _) = best_conditional_variance(state, &QuadratureCombo::p(n, b)?, group, angles)?;
    Ok(SteeringValue::new(
        CriterionId::CvProduct,
        partition.clone(),
        (vx * vp).sqrt(),
    ))
}
