//! Steering criteria shared by both backends and the verdicts built from them.

mod aggregate;
mod collective;
mod spin;

use serde::{Deserialize, Serialize};

use crate::error::SteeringError;
use crate::partition::SitePartition;

pub use aggregate::{monogamy_check, result4_aggregate, MONOGAMY_TOL};
pub use collective::{
    collective_scan, genuine_tripartite_cv, genuine_tripartite_qubit,
    pure_state_tripartite_scan, CvEstimator, QubitEstimator, ScanConfig, StateRef,
};
pub use spin::{
    best_spin_sum, ghz_spin_three_obs, ghz_spin_two_obs, ppt_violated, spin_three_obs,
    spin_two_obs, spin_two_obs_with_loss,
};

/// Which inequality a [`SteeringValue`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CriterionId {
    /// `Delta_inf x_B Delta_inf p_B < 1`.
    #[serde(rename = "CV_PRODUCT")]
    CvProduct,
    /// `(Delta_inf sx_B)^2 + (Delta_inf sy_B)^2 < 1`.
    #[serde(rename = "SPIN_SUM_2OBS")]
    SpinSum2Obs,
    /// `(Delta_inf sx_B)^2 + (Delta_inf sy_B)^2 + (Delta_inf sz_B)^2 < 2`.
    #[serde(rename = "SPIN_SUM_3OBS")]
    SpinSum3Obs,
    /// `Delta(x_j - x_k) Delta(p_j + p_k + p_m) < 1`.
    #[serde(rename = "CV_FIXED_COMBO")]
    CvFixedCombo,
}

/// Whether a criterion multiplies or adds its inference terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Product,
    Sum,
}

impl CriterionId {
    pub fn bound(self) -> f64 {
        match self {
            CriterionId::SpinSum3Obs => 2.0,
            _ => 1.0,
        }
    }

    pub fn family(self) -> Family {
        match self {
            CriterionId::CvProduct | CriterionId::CvFixedCombo => Family::Product,
            CriterionId::SpinSum2Obs | CriterionId::SpinSum3Obs => Family::Sum,
        }
    }

    /// Two observables at the steered site.
    pub fn is_two_observable(self) -> bool {
        self != CriterionId::SpinSum3Obs
    }

    pub fn inequality(self) -> &'static str {
        match self {
            CriterionId::CvProduct => "Dinf(x_B) * Dinf(p_B) < 1",
            CriterionId::SpinSum2Obs => "Dinf(sx_B)^2 + Dinf(sy_B)^2 < 1",
            CriterionId::SpinSum3Obs => "Dinf(sx_B)^2 + Dinf(sy_B)^2 + Dinf(sz_B)^2 < 2",
            CriterionId::CvFixedCombo => "D(x_j - x_k) * D(p_j + p_k + p_m) < 1",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CriterionId::CvProduct => "CV_PRODUCT",
            CriterionId::SpinSum2Obs => "SPIN_SUM_2OBS",
            CriterionId::SpinSum3Obs => "SPIN_SUM_3OBS",
            CriterionId::CvFixedCombo => "CV_FIXED_COMBO",
        }
    }
}

/// One evaluated criterion. `verdict` is `value < bound`, with no slack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SteeringValueRepr")]
pub struct SteeringValue {
    criterion: CriterionId,
    partition: SitePartition,
    value: f64,
    bound: f64,
    verdict: bool,
    inequality: String,
}

#[derive(Deserialize)]
struct SteeringValueRepr {
    criterion: CriterionId,
    partition: SitePartition,
    value: f64,
    bound: f64,
    verdict: bool,
    inequality: String,
}

impl TryFrom<SteeringValueRepr> for SteeringValue {
    type Error = SteeringError;

    fn try_from(r: SteeringValueRepr) -> Result<Self, Self::Error> {
        let v = SteeringValue::try_new(r.criterion, r.partition, r.value)?;
        if v.bound != r.bound || v.verdict != r.verdict || v.inequality != r.inequality {
            return Err(SteeringError::Parse(format!(
                "inconsistent {} record",
                r.criterion.name()
            )));
        }
        Ok(v)
    }
}

impl SteeringValue {
    /// Panics if `value` is negative or not finite.
    pub fn new(criterion: CriterionId, partition: SitePartition, value: f64) -> Self {
        Self::try_new(criterion, partition, value).expect("criterion value must be finite and >= 0")
    }

    pub fn try_new(
        criterion: CriterionId,
        partition: SitePartition,
        value: f64,
    ) -> Result<Self, SteeringError> {
        if !value.is_finite() || value < 0.0 {
            return Err(SteeringError::invalid(format!("criterion value {value} invalid")));
        }
        let bound = criterion.bound();
        Ok(Self {
            criterion,
            partition,
            value,
            bound,
            verdict: value < bound,
            inequality: criterion.inequality().to_owned(),
        })
    }

    pub fn criterion(&self) -> CriterionId {
        self.criterion
    }

    pub fn partition(&self) -> &SitePartition {
        &self.partition
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn verdict(&self) -> bool {
        self.verdict
    }

    pub fn inequality(&self) -> &str {
        &self.inequality
    }
}

/// Three single-target values combined into the genuine tripartite test
/// `S1 + S2 + S3 < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GenuineRepr")]
pub struct GenuineSteeringReport {
    values: Vec<SteeringValue>,
    sum: f64,
    genuine: bool,
    method_notes: String,
}

#[derive(Deserialize)]
struct GenuineRepr {
    values: Vec<SteeringValue>,
    sum: f64,
    genuine: bool,
    method_notes: String,
}

impl TryFrom<GenuineRepr> for GenuineSteeringReport {
    type Error = SteeringError;

    fn try_from(r: GenuineRepr) -> Result<Self, Self::Error> {
        let values: [SteeringValue; 3] = r
            .values
            .try_into()
            .map_err(|_| SteeringError::Parse("genuine report needs three values".into()))?;
        let rebuilt = result4_aggregate(&values)?.with_notes(r.method_notes);
        if rebuilt.sum != r.sum || rebuilt.genuine != r.genuine {
            return Err(SteeringError::Parse("inconsistent genuine-steering record".into()));
        }
        Ok(rebuilt)
    }
}

impl GenuineSteeringReport {
    pub fn values(&self) -> &[SteeringValue] {
        &self.values
    }

    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn genuine(&self) -> bool {
        self.genuine
    }

    pub fn method_notes(&self) -> &str {
        &self.method_notes
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.method_notes = notes.into();
        self
    }

    pub fn criterion(&self) -> CriterionId {
        self.values[0].criterion()
    }

    pub fn bound(&self) -> f64 {
        1.0
    }
}

/// Full-group value plus every proper subgroup's best value for one target.
///
/// A subgroup counts as failing to steer when its value is at least
/// `bound - MONOGAMY_TOL`. Pure states put single parties exactly on the bound,
/// where rounding can land a few ulps below it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectiveSteeringReport {
    pub full_group: SteeringValue,
    pub subsets: Vec<SteeringValue>,
    pub collective: bool,
}

impl CollectiveSteeringReport {
    pub(crate) fn from_values(full_group: SteeringValue, subsets: Vec<SteeringValue>) -> Self {
        let collective = full_group.verdict()
            && subsets
                .iter()
                .all(|s| s.value() >= s.bound() - MONOGAMY_TOL);
        Self {
            full_group,
            subsets,
            collective,
        }
    }

    /// Smallest value reached by any proper subgroup.
    pub fn best_subset_value(&self) -> Option<f64> {
        self.subsets.iter().map(|s| s.value()).reduce(f64::min)
    }
}

/// Outcome of pairing two disjoint groups that try to steer the same target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonogamyOutcome {
    pub criterion: CriterionId,
    pub target: usize,
    pub group_a: Vec<usize>,
    pub group_c: Vec<usize>,
    pub value_a: f64,
    pub value_c: f64,
    pub product: f64,
    pub sum: f64,
    /// `product >= 1` for product criteria, `sum >= 2` for spin sums.
    pub bound: f64,
    pub satisfied: bool,
}

/// Per-site steering by the other two parties of a tripartite state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripartiteScanReport {
    pub steered: Vec<SteeringValue>,
    pub purity_asserted: bool,
    pub genuine_if_pure: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part() -> SitePartition {
        SitePartition::new([1, 2], 3).unwrap()
    }

    #[test]
    fn verdict_is_strict() {
        let v = SteeringValue::new(CriterionId::SpinSum2Obs, part(), 1.0);
        assert!(!v.verdict());
        let v = SteeringValue::new(CriterionId::SpinSum3Obs, part(), 2.0);
        assert!(!v.verdict());
        let v = SteeringValue::new(CriterionId::SpinSum3Obs, part(), 1.999_999);
        assert!(v.verdict());
        assert!(SteeringValue::try_new(CriterionId::CvProduct, part(), f64::NAN).is_err());
        assert!(SteeringValue::try_new(CriterionId::CvProduct, part(), -0.1).is_err());
    }

    #[test]
    fn tampered_record_rejected() {
        let v = SteeringValue::new(CriterionId::CvProduct, part(), 0.5);
        let mut json: serde_json::Value = serde_json::to_value(&v).unwrap();
        assert_eq!(serde_json::from_value::<SteeringValue>(json.clone()).unwrap(), v);
        json["verdict"] = serde_json::Value::Bool(false);
        assert!(serde_json::from_value::<SteeringValue>(json).is_err());
    }
}
