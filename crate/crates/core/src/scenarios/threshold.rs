use serde::{Deserialize, Serialize};

use crate::criteria::{
    genuine_tripartite_cv, ghz_spin_three_obs, ghz_spin_two_obs, CriterionId, CvEstimator,
};
use crate::cv::cv_ghz;
use crate::error::{Result, SteeringError};
use crate::qubit::{ghz, DetectionModel, NoClickPolicy};

/// Default bracket width at which bisection stops.
pub const THRESHOLD_TOL: f64 = 1e-4;

/// Location of a verdict flip found by bisection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub parameter: String,
    pub criterion: CriterionId,
    pub bound: f64,
    pub critical: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Bisects `[low, high]` for the point where `predicate` changes value.
///
/// The predicate must be monotone on the bracket; the two ends are checked
/// and a [`SteeringError::NoThreshold`] is returned when they agree.
pub fn find_threshold<F>(
    parameter: &str,
    criterion: CriterionId,
    (low, high): (f64, f64),
    tolerance: f64,
    predicate: F,
) -> Result<ThresholdResult>
where
    F: Fn(f64) -> Result<bool>,
{
    if !low.is_finite() || !high.is_finite() || low >= high {
        return Err(SteeringError::invalid(format!("bad bracket [{low}, {high}]")));
    }
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(SteeringError::invalid("tolerance must be positive"));
    }
    let (mut lo, mut hi) = (low, high);
    let at_low = predicate(lo)?;
    if predicate(hi)? == at_low {
        return Err(SteeringError::NoThreshold {
            low,
            high,
            verdict: at_low,
        });
    }
    let mut iterations = 0;
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if predicate(mid)? == at_low {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(ThresholdResult {
        parameter: parameter.to_owned(),
        criterion,
        bound: criterion.bound(),
        critical: 0.5 * (lo + hi),
        bracket: (lo, hi),
        iterations,
    })
}

/// Named threshold searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdScenario {
    /// Detection efficiency for the three-observable inequality on GHZ(3).
    ThreeObsEta,
    /// Detection efficiency for the two-observable inequality on GHZ(3).
    TwoObsEta,
    /// Squeezing at which the unit-gain CV-GHZ sum `S1 + S2 + S3` drops below 1.
    CvResult4R,
}

impl std::str::FromStr for ThresholdScenario {
    type Err = SteeringError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "three-obs-eta" => Ok(Self::ThreeObsEta),
            "two-obs-eta" => Ok(Self::TwoObsEta),
            "cv-result4-r" => Ok(Self::CvResult4R),
            other => Err(SteeringError::Parse(format!("unknown threshold scenario {other:?}"))),
        }
    }
}

impl ThresholdScenario {
    pub fn name(self) -> &'static str {
        match self {
            Self::ThreeObsEta => "three-obs-eta",
            Self::TwoObsEta => "two-obs-eta",
            Self::CvResult4R => "cv-result4-r",
        }
    }

    pub fn run(self, policy: NoClickPolicy, tolerance: f64) -> Result<ThresholdResult> {
        match self {
            Self::ThreeObsEta | Self::TwoObsEta => {
                let rho = ghz(3)?.to_density();
                let three = self == Self::ThreeObsEta;
                let criterion = if three {
                    CriterionId::SpinSum3Obs
                } else {
                    CriterionId::SpinSum2Obs
                };
                find_threshold("eta", criterion, (0.0, 1.0), tolerance, |eta| {
                    let model = DetectionModel::new(eta, policy)?;
                    let v = if three {
                        ghz_spin_three_obs(&rho, 3, &model)?
                    } else {
                        ghz_spin_two_obs(&rho, 3, &model)?
                    };
                    Ok(v.verdict())
                })
            }
            Self::CvResult4R => find_threshold(
                "r",
                CriterionId::CvFixedCombo,
                (0.0, 1.0),
                tolerance,
                |r| Ok(genuine_tripartite_cv(&cv_ghz(r)?, CvEstimator::FixedCombo)?.genuine()),
            ),
        }
    }
}
