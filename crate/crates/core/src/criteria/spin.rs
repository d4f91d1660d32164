use super::{CriterionId, SteeringValue};
use crate::error::{Result, SteeringError};
use crate::partition::SitePartition;
use crate::qubit::{
    ghz_predictor_for, inference_variance_with_loss, optimal_inference_variance,
    variance_of_difference, DensityMatrix, DetectionModel, Pauli, PauliString, SpinAxis,
};

fn check_predictors(partition: &SitePartition, predictors: &[&PauliString]) -> Result<()> {
    for p in predictors {
        if let Some(s) = p
            .support()
            .into_iter()
            .find(|s| !partition.steering_group().contains(s))
        {
            return Err(SteeringError::invalid(format!(
                "predictor {p} acts on site {s} outside the steering group"
            )));
        }
    }
    Ok(())
}

fn target_ops(rho: &DensityMatrix, partition: &SitePartition) -> Result<[PauliString; 3]> {
    let n = rho.n_qubits();
    partition.check_within(n)?;
    let b = partition.target();
    Ok([
        PauliString::single(n, b, Pauli::X)?,
        PauliString::single(n, b, Pauli::Y)?,
        PauliString::single(n, b, Pauli::Z)?,
    ])
}

/// `Var(sx_B - P_x) + Var(sy_B - P_y)` with fixed predictors on the group.
pub fn spin_two_obs(
    rho: &DensityMatrix,
    partition: &SitePartition,
    predictor_x: &PauliString,
    predictor_y: &PauliString,
) -> Result<SteeringValue> {
    check_predictors(partition, &[predictor_x, predictor_y])?;
    let [tx, ty, _] = target_ops(rho, partition)?;
    let value = variance_of_difference(rho, &tx, predictor_x)?
        + variance_of_difference(rho, &ty, predictor_y)?;
    SteeringValue::try_new(CriterionId::SpinSum2Obs, partition.clone(), value)
}

/// Two-observable sum with the group's detection efficiency folded in.
pub fn spin_two_obs_with_loss(
    rho: &DensityMatrix,
    partition: &SitePartition,
    predictor_x: &PauliString,
    predictor_y: &PauliString,
    model: &DetectionModel,
) -> Result<SteeringValue> {
    let [tx, ty, _] = target_ops(rho, partition)?;
    let value = inference_variance_with_loss(rho, partition, &tx, predictor_x, model)?
        + inference_variance_with_loss(rho, partition, &ty, predictor_y, model)?;
    SteeringValue::try_new(CriterionId::SpinSum2Obs, partition.clone(), value)
}

/// Three-observable sum against the bound 2.
pub fn spin_three_obs(
    rho: &DensityMatrix,
    partition: &SitePartition,
    predictors: [&PauliString; 3],
    model: &DetectionModel,
) -> Result<SteeringValue> {
    let targets = target_ops(rho, partition)?;
    let mut value = 0.0;
    for (t, p) in targets.iter().zip(predictors) {
        value += inference_variance_with_loss(rho, partition, t, p, model)?;
    }
    SteeringValue::try_new(CriterionId::SpinSum3Obs, partition.clone(), value)
}

/// Two-observable sum for `target` using the GHZ stabilizer predictors
/// measured by every other site.
pub fn ghz_spin_two_obs(
    rho: &DensityMatrix,
    target: usize,
    model: &DetectionModel,
) -> Result<SteeringValue> {
    let n = rho.n_qubits();
    let partition = SitePartition::all_others(n, target)?;
    let px = ghz_predictor_for(n, target, SpinAxis::X)?;
    let py = ghz_predictor_for(n, target, SpinAxis::Y)?;
    if model.efficiency() == 1.0 {
        spin_two_obs(rho, &partition, &px, &py)
    } else {
        spin_two_obs_with_loss(rho, &partition, &px, &py, model)
    }
}

/// Three-observable sum for `target` with the GHZ predictors.
pub fn ghz_spin_three_obs(
    rho: &DensityMatrix,
    target: usize,
    model: &DetectionModel,
) -> Result<SteeringValue> {
    let n = rho.n_qubits();
    let partition = SitePartition::all_others(n, target)?;
    let px = ghz_predictor_for(n, target, SpinAxis::X)?;
    let py = ghz_predictor_for(n, target, SpinAxis::Y)?;
    let pz = ghz_predictor_for(n, target, SpinAxis::Z)?;
    spin_three_obs(rho, &partition, [&px, &py, &pz], model)
}

/// Two-observable sum with each inference minimized over every assignment of
/// `menu` settings to the group, using optimal estimators.
pub fn best_spin_sum(
    rho: &DensityMatrix,
    partition: &SitePartition,
    menu: &[Pauli],
) -> Result<SteeringValue> {
    if menu.is_empty() {
        return Err(SteeringError::invalid("settings menu is empty"));
    }
    let [tx, ty, _] = target_ops(rho, partition)?;
    let m = partition.steering_group().len();
    let total = menu
        .len()
        .checked_pow(m as u32)
        .ok_or_else(|| SteeringError::invalid("settings menu too large"))?;
    let mut best = [f64::INFINITY; 2];
    let mut settings = vec![Pauli::X; m];
    for code in 0..total {
        let mut rest = code;
        for slot in settings.iter_mut() {
            *slot = menu[rest % menu.len()];
            rest /= menu.len();
        }
        for (b, t) in best.iter_mut().zip([&tx, &ty]) {
            *b = b.min(optimal_inference_variance(rho, partition, t, &settings)?);
        }
    }
    SteeringValue::try_new(CriterionId::SpinSum2Obs, partition.clone(), best[0] + best[1])
}

/// True when the partial transpose over `sites` has a negative eigenvalue.
pub fn ppt_violated(rho: &DensityMatrix, sites: &[usize]) -> Result<bool> {
    let pt = rho.partial_transpose(sites)?;
    Ok(crate::qubit::hermitian_min_eigenvalue(&pt) < -1e-10)
}
