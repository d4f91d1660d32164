use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spin::{best_spin_sum, ghz_spin_two_obs};
use super::{
    result4_aggregate, CollectiveSteeringReport, GenuineSteeringReport, SteeringValue,
    TripartiteScanReport,
};
use crate::cv::{
    angle_grid, best_steering_product, s_j_fixed_combo, s_j_optimal_gains, GaussianState,
    DEFAULT_ANGLE_COUNT,
};
use crate::error::{Result, SteeringError};
use crate::partition::SitePartition;
use crate::qubit::{DensityMatrix, DetectionModel, Pauli};

/// A state from either backend.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Qubit(&'a DensityMatrix),
    Cv(&'a GaussianState),
}

impl StateRef<'_> {
    pub fn n_sites(&self) -> usize {
        match self {
            StateRef::Qubit(rho) => rho.n_qubits(),
            StateRef::Cv(s) => s.n_modes(),
        }
    }
}

/// Strategy menu granted to every group in a collective scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Pauli settings each qubit site may measure.
    pub qubit_settings: Vec<Pauli>,
    /// Number of equally spaced homodyne angles in `[0, pi)` per mode.
    pub angle_count: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            qubit_settings: vec![Pauli::X, Pauli::Y, Pauli::Z],
            angle_count: DEFAULT_ANGLE_COUNT,
        }
    }
}

impl ScanConfig {
    /// Best two-observable value reachable by `partition` within the menu.
    pub fn evaluate(&self, state: StateRef<'_>, partition: &SitePartition) -> Result<SteeringValue> {
        match state {
            StateRef::Qubit(rho) => best_spin_sum(rho, partition, &self.qubit_settings),
            StateRef::Cv(s) => {
                if self.angle_count == 0 {
                    return Err(SteeringError::invalid("angle_count must be positive"));
                }
                best_steering_product(s, partition, &angle_grid(self.angle_count))
            }
        }
    }
}

/// Evaluates `target` steered by `full_group` and by every non-empty proper
/// subgroup. Collective steering holds when the full group steers and no
/// subgroup does.
pub fn collective_scan(
    state: StateRef<'_>,
    target: usize,
    full_group: &[usize],
    config: &ScanConfig,
) -> Result<CollectiveSteeringReport> {
    let partition = SitePartition::new(full_group.iter().copied(), target)?;
    partition.check_within(state.n_sites())?;
    let full = config.evaluate(state, &partition)?;
    let subsets = partition
        .proper_subgroups()
        .par_iter()
        .map(|p| config.evaluate(state, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(CollectiveSteeringReport::from_values(full, subsets))
}

/// How the qubit genuine-steering test forms each `S_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QubitEstimator {
    /// GHZ stabilizer predictors measured by the other two sites.
    GhzPredictors,
    /// Optimal estimators over the Pauli-axis menu.
    MenuOptimal,
}

/// How the CV genuine-steering test forms each `S_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CvEstimator {
    /// `Delta(x_j - x_k) Delta(p_j + p_k + p_m)` with unit gains.
    FixedCombo,
    /// Same quadratures with optimal linear gains.
    OptimalGains,
}

fn tripartite_targets() -> [(usize, usize, usize); 3] {
    [(1, 2, 3), (2, 3, 1), (3, 1, 2)]
}

/// `S1 + S2 + S3 < 1` for a three-qubit state.
pub fn genuine_tripartite_qubit(
    rho: &DensityMatrix,
    estimator: QubitEstimator,
    model: &DetectionModel,
) -> Result<GenuineSteeringReport> {
    if rho.n_qubits() != 3 {
        return Err(SteeringError::invalid("genuine tripartite test needs 3 qubits"));
    }
    let menu = ScanConfig::default().qubit_settings;
    let values = tripartite_targets().map(|(j, _, _)| match estimator {
        QubitEstimator::GhzPredictors => ghz_spin_two_obs(rho, j, model),
        QubitEstimator::MenuOptimal => {
            best_spin_sum(rho, &SitePartition::all_others(3, j)?, &menu)
        }
    });
    let [a, b, c] = values;
    let notes = match estimator {
        QubitEstimator::GhzPredictors => "spin sums with fixed GHZ predictors",
        QubitEstimator::MenuOptimal => "spin sums with optimal estimators over Pauli settings",
    };
    Ok(result4_aggregate(&[a?, b?, c?])?.with_notes(notes))
}

/// `S1 + S2 + S3 < 1` for a three-mode Gaussian state.
pub fn genuine_tripartite_cv(
    state: &GaussianState,
    estimator: CvEstimator,
) -> Result<GenuineSteeringReport> {
    if state.n_modes() != 3 {
        return Err(SteeringError::invalid("genuine tripartite test needs 3 modes"));
    }
    let [a, b, c] = tripartite_targets().map(|(j, k, m)| match estimator {
        CvEstimator::FixedCombo => s_j_fixed_combo(state, j, k, m),
        CvEstimator::OptimalGains => s_j_optimal_gains(state, j, k, m),
    });
    let notes = match estimator {
        CvEstimator::FixedCombo => "unit-gain products D(x_j - x_k) D(p_j + p_k + p_m)",
        CvEstimator::OptimalGains => "gain-optimized inference products",
    };
    Ok(result4_aggregate(&[a?, b?, c?])?.with_notes(notes))
}

/// Checks whether each party of a tripartite state is steered by the other
/// two. For pure states all three verdicts together rule out every
/// bipartition; purity is the caller's assertion and is recorded as given.
pub fn pure_state_tripartite_scan(
    state: StateRef<'_>,
    purity_asserted: bool,
) -> Result<TripartiteScanReport> {
    if state.n_sites() != 3 {
        return Err(SteeringError::invalid(format!(
            "tripartite scan needs 3 sites, got {}",
            state.n_sites()
        )));
    }
    let config = ScanConfig::default();
    let steered = tripartite_targets()
        .iter()
        .map(|&(j, k, m)| match state {
            StateRef::Qubit(_) => config.evaluate(state, &SitePartition::new([k, m], j)?),
            StateRef::Cv(s) => s_j_fixed_combo(s, j, k, m),
        })
        .collect::<Result<Vec<_>>>()?;
    let genuine_if_pure = steered.iter().all(|v| v.verdict());
    Ok(TripartiteScanReport {
        steered,
        purity_asserted,
        genuine_if_pure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cv::cv_ghz;
    use crate::qubit::{ghz, PureState};

    #[test]
    fn collective_on_qubit_ghz() {
        let rho = ghz(3).unwrap().to_density();
        let r = collective_scan(StateRef::Qubit(&rho), 3, &[1, 2], &ScanConfig::default()).unwrap();
        assert!(r.full_group.value() < 1e-12);
        assert!(r.subsets.iter().all(|s| s.value() >= 1.0));
        assert!(r.collective);
    }

    #[test]
    fn collective_on_cv_ghz() {
        let g = cv_ghz(1.0).unwrap();
        let r = collective_scan(StateRef::Cv(&g), 1, &[2, 3], &ScanConfig::default()).unwrap();
        assert!(r.full_group.verdict());
        assert!(r.subsets.iter().all(|s| s.value() >= 1.0 - 1e-9));
        assert!(r.collective);
    }

    #[test]
    fn product_state_not_collective() {
        let rho = PureState::basis(3, 0).unwrap().to_density();
        let r = collective_scan(StateRef::Qubit(&rho), 1, &[2, 3], &ScanConfig::default()).unwrap();
        assert!(r.full_group.value() >= 1.0);
        assert!(!r.collective);
        let v = GaussianState::vacuum(3).unwrap();
        let r = collective_scan(StateRef::Cv(&v), 2, &[1, 3], &ScanConfig::default()).unwrap();
        assert!(!r.collective);
    }

    #[test]
    fn tripartite_scan_examples() {
        let rho = ghz(3).unwrap().to_density();
        let r = pure_state_tripartite_scan(StateRef::Qubit(&rho), true).unwrap();
        assert!(r.genuine_if_pure && r.purity_asserted);
        let prod = PureState::basis(3, 0).unwrap().to_density();
        let r = pure_state_tripartite_scan(StateRef::Qubit(&prod), true).unwrap();
        assert!(r.steered.iter().all(|v| !v.verdict()));
        assert!(!r.genuine_if_pure);
        let g = cv_ghz(1.0).unwrap();
        assert!(pure_state_tripartite_scan(StateRef::Cv(&g), true).unwrap().genuine_if_pure);
        let rho4 = ghz(4).unwrap().to_density();
        assert!(pure_state_tripartite_scan(StateRef::Qubit(&rho4), true).is_err());
    }

    #[test]
    fn genuine_examples() {
        let lossless = DetectionModel::lossless();
        let rho = ghz(3).unwrap().to_density();
        let r = genuine_tripartite_qubit(&rho, QubitEstimator::GhzPredictors, &lossless).unwrap();
        assert!(r.sum().abs() < 1e-12 && r.genuine());
        let noisy = rho.depolarize_global(0.95).unwrap();
        let r = genuine_tripartite_qubit(&noisy, QubitEstimator::GhzPredictors, &lossless).unwrap();
        assert!((r.sum() - 0.6).abs() < 1e-10);
        let g = cv_ghz(1.0).unwrap();
        let r = genuine_tripartite_cv(&g, CvEstimator::FixedCombo).unwrap();
        assert!((r.sum() - 3.0 * 6f64.sqrt() * (-2.0f64).exp()).abs() < 1e-10);
        assert!(r.genuine());
        let opt = genuine_tripartite_cv(&g, CvEstimator::OptimalGains).unwrap();
        assert!(opt.sum() <= r.sum() + 1e-12);
    }
}
