use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{monogamy_check, CriterionId, SteeringValue};
use crate::cv::{eavesdrop_scenario, steering_product_cv, GaussianState, HomodynePlan};
use crate::error::Result;

/// Steering of mode 1 by the legitimate pair A' = {2, 3} and by the
/// eavesdropper's pair E = {4, 5} at one tap transmissivity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EavesdropRecord {
    pub r: f64,
    pub eta: f64,
    pub criterion: CriterionId,
    pub bound: f64,
    pub value_a_prime: f64,
    pub value_e: f64,
    pub monogamy_product: f64,
    pub steering_a_prime: bool,
    pub steering_e: bool,
}

fn steering_by(state: &GaussianState, group: [usize; 2]) -> Result<SteeringValue> {
    steering_product_cv(state, 1, &HomodynePlan::x_of(&group)?, &HomodynePlan::p_of(&group)?)
}

pub fn eavesdrop_point(r: f64, eta: f64) -> Result<EavesdropRecord> {
    let state = eavesdrop_scenario(r, eta)?;
    let a = steering_by(&state, [2, 3])?;
    let e = steering_by(&state, [4, 5])?;
    let mono = monogamy_check(&a, &e)?;
    Ok(EavesdropRecord {
        r,
        eta,
        criterion: CriterionId::CvProduct,
        bound: CriterionId::CvProduct.bound(),
        value_a_prime: a.value(),
        value_e: e.value(),
        monogamy_product: mono.product,
        steering_a_prime: a.verdict(),
        steering_e: e.verdict(),
    })
}

/// Evaluates every grid point; records come back in grid order.
pub fn eavesdrop_sweep(r: f64, eta_grid: &[f64]) -> Result<Vec<EavesdropRecord>> {
    eta_grid.par_iter().map(|&eta| eavesdrop_point(r, eta)).collect()
}
