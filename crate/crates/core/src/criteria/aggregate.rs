use super::{Family, GenuineSteeringReport, MonogamyOutcome, SteeringValue};
use crate::error::{Result, SteeringError};

/// Slack allowed when checking the monogamy floor.
pub const MONOGAMY_TOL: f64 = 1e-9;

/// Combines one value per target site into `S1 + S2 + S3 < 1`.
///
/// All three must come from the same family (all products or all sums) with
/// bound 1. The output is independent of input order: values are listed by
/// target and summed in ascending order.
pub fn result4_aggregate(values: &[SteeringValue; 3]) -> Result<GenuineSteeringReport> {
    let family = values[0].criterion().family();
    for v in values {
        if v.criterion().family() != family {
            return Err(SteeringError::invalid(
                "cannot mix product and sum criteria in one genuine-steering test",
            ));
        }
        if v.bound() != 1.0 {
            return Err(SteeringError::invalid(format!(
                "{} has bound {}, the aggregate needs bound-1 criteria",
                v.criterion().name(),
                v.bound()
            )));
        }
    }
    let mut sorted = values.to_vec();
    sorted.sort_by_key(|v| v.partition().target());
    if sorted.windows(2).any(|w| w[0].partition().target() == w[1].partition().target()) {
        return Err(SteeringError::invalid("need one value per target site"));
    }
    let mut terms: Vec<f64> = sorted.iter().map(|v| v.value()).collect();
    terms.sort_by(|a, b| a.total_cmp(b));
    let sum = terms.iter().sum::<f64>();
    let notes = match family {
        Family::Product => "product of inference deviations per target",
        Family::Sum => "sum of inference variances per target",
    };
    Ok(GenuineSteeringReport {
        values: sorted,
        sum,
        genuine: sum < 1.0,
        method_notes: notes.to_owned(),
    })
}

/// Two disjoint groups steering the same target cannot both violate the same
/// two-observable inequality.
///
/// Product criteria obey `S_{B|A} S_{B|C} >= 1`. Spin sums obey
/// `S_{B|A} + S_{B|C} >= 2`, because pairing A's x inference with C's y
/// inference (and vice versa) is bounded by the qubit uncertainty relation.
pub fn monogamy_check(s_ba: &SteeringValue, s_bc: &SteeringValue) -> Result<MonogamyOutcome> {
    let (pa, pc) = (s_ba.partition(), s_bc.partition());
    if pa.target() != pc.target() {
        return Err(SteeringError::invalid(format!(
            "targets differ: {} vs {}",
            pa.target(),
            pc.target()
        )));
    }
    if !pa.is_disjoint_from(pc) {
        return Err(SteeringError::invalid("steering groups overlap"));
    }
    for v in [s_ba, s_bc] {
        if !v.criterion().is_two_observable() {
            return Err(SteeringError::invalid(format!(
                "{} is not a two-observable criterion",
                v.criterion().name()
            )));
        }
    }
    let family = s_ba.criterion().family();
    if s_bc.criterion().family() != family {
        return Err(SteeringError::invalid("criteria come from different families"));
    }
    let product = s_ba.value() * s_bc.value();
    let sum = s_ba.value() + s_bc.value();
    let (bound, satisfied) = match family {
        Family::Product => (1.0, product >= 1.0 - MONOGAMY_TOL),
        Family::Sum => (2.0, sum >= 2.0 - MONOGAMY_TOL),
    };
    Ok(MonogamyOutcome {
        criterion: s_ba.criterion(),
        target: pa.target(),
        group_a: pa.steering_group().to_vec(),
        group_c: pc.steering_group().to_vec(),
        value_a: s_ba.value(),
        value_c: s_bc.value(),
        product,
        sum,
        bound,
        satisfied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::CriterionId;
    use crate::partition::SitePartition;

    fn sv(c: CriterionId, group: &[usize], target: usize, v: f64) -> SteeringValue {
        SteeringValue::new(c, SitePartition::new(group.iter().copied(), target).unwrap(), v)
    }

    fn triple(c: CriterionId, v: [f64; 3]) -> [SteeringValue; 3] {
        [
            sv(c, &[2, 3], 1, v[0]),
            sv(c, &[1, 3], 2, v[1]),
            sv(c, &[1, 2], 3, v[2]),
        ]
    }

    #[test]
    fn aggregate_examples() {
        let r = result4_aggregate(&triple(CriterionId::SpinSum2Obs, [0.0; 3])).unwrap();
        assert_eq!(r.sum(), 0.0);
        assert!(r.genuine());
        let r = result4_aggregate(&triple(CriterionId::CvProduct, [0.4; 3])).unwrap();
        assert!((r.sum() - 1.2).abs() < 1e-12);
        assert!(!r.genuine());
    }

    #[test]
    fn aggregate_boundary_is_not_genuine() {
        let r = result4_aggregate(&triple(CriterionId::CvFixedCombo, [0.5, 0.25, 0.25])).unwrap();
        assert_eq!(r.sum(), 1.0);
        assert!(!r.genuine());
    }

    #[test]
    fn aggregate_rejects_mixed_families() {
        let mut t = triple(CriterionId::CvProduct, [0.1; 3]);
        t[1] = sv(CriterionId::SpinSum2Obs, &[1, 3], 2, 0.1);
        assert!(result4_aggregate(&t).is_err());
        let t = triple(CriterionId::SpinSum3Obs, [0.1; 3]);
        assert!(result4_aggregate(&t).is_err());
    }

    #[test]
    fn aggregate_rejects_repeated_target() {
        let c = CriterionId::CvProduct;
        let t = [sv(c, &[2, 3], 1, 0.1), sv(c, &[2], 1, 0.1), sv(c, &[1, 2], 3, 0.1)];
        assert!(result4_aggregate(&t).is_err());
    }

    #[test]
    fn monogamy_boundary() {
        let a = sv(CriterionId::CvProduct, &[2], 1, 0.5);
        let c = sv(CriterionId::CvProduct, &[3], 1, 2.0);
        let m = monogamy_check(&a, &c).unwrap();
        assert_eq!(m.product, 1.0);
        assert!(m.satisfied);
    }

    #[test]
    fn monogamy_spin_sum_uses_sum_floor() {
        // A Bell pair between 1 and 2 next to an idle site 3.
        let a = sv(CriterionId::SpinSum2Obs, &[2], 1, 0.0);
        let c = sv(CriterionId::SpinSum2Obs, &[3], 1, 2.0);
        let m = monogamy_check(&a, &c).unwrap();
        assert_eq!(m.product, 0.0);
        assert!(m.satisfied);
        let c = sv(CriterionId::SpinSum2Obs, &[3], 1, 1.5);
        assert!(!monogamy_check(&a, &c).unwrap().satisfied);
    }

    #[test]
    fn monogamy_rejects_bad_pairs() {
        let a = sv(CriterionId::CvProduct, &[2, 3], 1, 0.5);
        let c = sv(CriterionId::CvProduct, &[3], 1, 2.0);
        assert!(monogamy_check(&a, &c).is_err());
        let other_target = sv(CriterionId::CvProduct, &[3], 2, 1.0);
        assert!(monogamy_check(&other_target, &sv(CriterionId::CvProduct, &[2], 1, 1.0)).is_err());
        let three = sv(CriterionId::SpinSum3Obs, &[3], 1, 2.0);
        let two = sv(CriterionId::SpinSum2Obs, &[2], 1, 2.0);
        assert!(monogamy_check(&two, &three).is_err());
    }
}
