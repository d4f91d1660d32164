use serde::{Deserialize, Serialize};

use crate::criteria::{
    collective_scan, monogamy_check, CollectiveSteeringReport, MonogamyOutcome, ScanConfig,
    StateRef, MONOGAMY_TOL,
};
use crate::cv::cv_ghz;
use crate::error::{Result, SteeringError};
use crate::qubit::ghz;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Qubit,
    Cv,
}

impl std::str::FromStr for Backend {
    type Err = SteeringError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qubit" => Ok(Backend::Qubit),
            "cv" => Ok(Backend::Cv),
            other => Err(SteeringError::Parse(format!("unknown backend {other:?}"))),
        }
    }
}

/// Collective-steering check of a GHZ resource for N-party secret sharing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecretSharingReport {
    pub backend: Backend,
    pub n: usize,
    pub targets: Vec<CollectiveSteeringReport>,
    /// Pairs of disjoint single parties trying to steer the same target.
    pub monogamy: Vec<MonogamyOutcome>,
    pub all_collective: bool,
    /// Every proper-subset value is at least `1 - MONOGAMY_TOL`.
    pub security_floor_holds: bool,
}

/// Builds the GHZ resource (`r` is the CV squeezing, ignored for qubits) and
/// scans every target against its `n - 1` collaborators.
pub fn secret_sharing_demo(
    backend: Backend,
    n: usize,
    r: f64,
    config: &ScanConfig,
) -> Result<SecretSharingReport> {
    if n != 3 {
        return Err(SteeringError::invalid(format!(
            "secret-sharing demo supports n = 3, got {n}"
        )));
    }
    let qubit_state;
    let cv_state;
    let state = match backend {
        Backend::Qubit => {
            qubit_state = ghz(n)?.to_density();
            StateRef::Qubit(&qubit_state)
        }
        Backend::Cv => {
            cv_state = cv_ghz(r)?;
            StateRef::Cv(&cv_state)
        }
    };
    let mut targets = Vec::with_capacity(n);
    let mut monogamy = Vec::new();
    for target in 1..=n {
        let group: Vec<usize> = (1..=n).filter(|&s| s != target).collect();
        let report = collective_scan(state, target, &group, config)?;
        let singles: Vec<_> = report
            .subsets
            .iter()
            .filter(|s| s.partition().steering_group().len() == 1)
            .collect();
        for (i, a) in singles.iter().enumerate() {
            for c in &singles[i + 1..] {
                monogamy.push(monogamy_check(a, c)?);
            }
        }
        targets.push(report);
    }
    let all_collective = targets.iter().all(|t| t.collective);
    let security_floor_holds = targets
        .iter()
        .flat_map(|t| &t.subsets)
        .all(|s| s.value() >= s.bound() - MONOGAMY_TOL);
    Ok(SecretSharingReport {
        backend,
        n,
        targets,
        monogamy,
        all_collective,
        security_floor_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_resource_is_collective() {
        let r = secret_sharing_demo(Backend::Qubit, 3, 0.0, &ScanConfig::default()).unwrap();
        assert!(r.all_collective && r.security_floor_holds);
        assert_eq!(r.monogamy.len(), 3);
        assert!(r.monogamy.iter().all(|m| m.satisfied));
    }

    #[test]
    fn cv_resource_is_collective() {
        let r = secret_sharing_demo(Backend::Cv, 3, 1.0, &ScanConfig::default()).unwrap();
        assert!(r.all_collective && r.security_floor_holds);
        assert!(r.monogamy.iter().all(|m| m.satisfied));
    }

    #[test]
    fn vacuum_is_not_a_resource() {
        let r = secret_sharing_demo(Backend::Cv, 3, 0.0, &ScanConfig::default()).unwrap();
        assert!(!r.all_collective);
        assert!(secret_sharing_demo(Backend::Qubit, 4, 0.0, &ScanConfig::default()).is_err());
    }
}
