mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use steering::criteria::{
    best_spin_sum, ghz_spin_two_obs, monogamy_check, ppt_violated, result4_aggregate,
    CriterionId, SteeringValue,
};
use steering::cv::{
    angle_grid, best_steering_product, combo_variance, optimal_conditional_variance,
    GaussianState, HomodynePlan, QuadratureCombo,
};
use steering::qubit::{
    ghz, optimal_inference_variance, variance_of_difference, DensityMatrix, DetectionModel,
    Pauli, PauliString, PureState,
};
use steering::SitePartition;

const MENU: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

/// Target qubit 3 in a product with a random state of qubits 1 and 2.
fn product_state(seed: u64) -> DensityMatrix {
    let mut rng = rng(seed);
    let a = DensityMatrix::random(2, rng.gen_range(1..=4), &mut rng).unwrap();
    let b = DensityMatrix::random(1, rng.gen_range(1..=2), &mut rng).unwrap();
    DensityMatrix::new(3, a.entries().kronecker(b.entries())).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    // An uncorrelated group cannot push the target below the uncertainty floor.
    #[test]
    fn qubit_uncertainty_floor(seed in any::<u64>()) {
        let rho = product_state(seed);
        let v = best_spin_sum(&rho, &SitePartition::new([1, 2], 3).unwrap(), &MENU).unwrap();
        prop_assert!(v.value() >= 1.0 - 1e-9, "{}", v.value());
        prop_assert!(!v.verdict());
    }

    #[test]
    fn cv_uncertainty_floor(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let a = GaussianState::random_pure(1, 1.5, &mut rng).unwrap();
        let b = GaussianState::random_pure(2, 1.5, &mut rng).unwrap();
        let mut cov = nalgebra::DMatrix::zeros(6, 6);
        cov.view_mut((0, 0), (2, 2)).copy_from(a.cov());
        cov.view_mut((2, 2), (4, 4)).copy_from(b.cov());
        let joint = GaussianState::new(nalgebra::DVector::zeros(6), cov).unwrap();
        let part = SitePartition::new([2, 3], 1).unwrap();
        let v = best_steering_product(&joint, &part, &angle_grid(6)).unwrap();
        prop_assert!(v.value() >= 1.0 - 1e-9, "{}", v.value());
    }

    // The conditional mean beats any fixed predictor built from the same outcomes.
    #[test]
    fn optimal_estimator_dominates_predictors(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let rho = DensityMatrix::random(3, rng.gen_range(1..=8), &mut rng).unwrap();
        let settings = [MENU[rng.gen_range(0..3)], MENU[rng.gen_range(0..3)]];
        let t = PauliString::single(3, 3, MENU[rng.gen_range(0..3)]).unwrap();
        let part = SitePartition::new([1, 2], 3).unwrap();
        let opt = optimal_inference_variance(&rho, &part, &t, &settings).unwrap();
        let predictors = [
            PauliString::on_sites(3, &[1], &settings[..1]).unwrap(),
            PauliString::on_sites(3, &[2], &settings[1..]).unwrap(),
            PauliString::on_sites(3, &[1, 2], &settings).unwrap(),
        ];
        for p in predictors {
            for sign in [1, -1] {
                let fixed = variance_of_difference(&rho, &t, &p.clone().with_sign(sign)).unwrap();
                prop_assert!(opt <= fixed + 1e-12);
            }
        }
        prop_assert!(opt <= 1.0 + 1e-12);
    }

    #[test]
    fn gain_optimum_dominates_unit_gains(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let st = GaussianState::random_pure(3, 1.5, &mut rng).unwrap();
        let x1 = QuadratureCombo::x(3, 1).unwrap();
        let opt = optimal_conditional_variance(&st, &x1, &HomodynePlan::x_of(&[2, 3]).unwrap()).unwrap();
        let unit = x1.plus(-1.0, &QuadratureCombo::x(3, 2).unwrap()).unwrap();
        prop_assert!(opt <= combo_variance(&st, &unit).unwrap() + 1e-12);
        prop_assert!(opt <= combo_variance(&st, &x1).unwrap() + 1e-12);
    }

    #[test]
    fn qubit_relabeling_invariance(seed in any::<u64>(), perm_idx in 0usize..6) {
        let perms = [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]];
        let perm = perms[perm_idx];
        let mut rng = rng(seed);
        let rho = DensityMatrix::random(3, rng.gen_range(1..=8), &mut rng).unwrap();
        let moved = permute_qubits(&rho, &perm);
        // old site s now lives at new site inv[s]
        let mut inv = [0usize; 4];
        for (k, &s) in perm.iter().enumerate() {
            inv[s] = k + 1;
        }
        let before = best_spin_sum(&rho, &SitePartition::new([1, 2], 3).unwrap(), &MENU).unwrap();
        let after = best_spin_sum(&moved, &SitePartition::new([inv[1], inv[2]], inv[3]).unwrap(), &MENU).unwrap();
        prop_assert!((before.value() - after.value()).abs() < 1e-10);
    }

    #[test]
    fn cv_relabeling_invariance(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let st = GaussianState::random_pure(3, 1.0, &mut rng).unwrap();
        let moved = st.permute_modes(&[3, 1, 2]).unwrap();
        let angles = angle_grid(8);
        let before = best_steering_product(&st, &SitePartition::new([2, 3], 1).unwrap(), &angles).unwrap();
        // new mode k carries old mode order[k-1]: old 1 -> new 2, old 2 -> 3, old 3 -> 1
        let after = best_steering_product(&moved, &SitePartition::new([3, 1], 2).unwrap(), &angles).unwrap();
        prop_assert!((before.value() - after.value()).abs() < 1e-10);
    }

    #[test]
    fn gaussian_circuits_stay_physical(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let mut st = GaussianState::vacuum(3).unwrap();
        for _ in 0..8 {
            let m = rng.gen_range(1..=3);
            st = match rng.gen_range(0..4) {
                0 => st.squeeze(m, rng.gen_range(0.0..1.5), rng.gen_range(0.0..6.3)).unwrap(),
                1 => st.rotate(m, rng.gen_range(0.0..6.3)).unwrap(),
                2 => {
                    let o = if m == 3 { 1 } else { m + 1 };
                    st.beamsplitter(m, o, rng.gen()).unwrap()
                }
                _ => st.loss_channel(m, rng.gen()).unwrap(),
            };
        }
        prop_assert!(st.min_symplectic_eigenvalue() >= 1.0 - 1e-9);
    }

    // Steering needs entanglement across the cut, which PPT detects for 1 x 2.
    #[test]
    fn steering_implies_npt(seed in any::<u64>(), p in 0.0f64..1.0) {
        let mut rng = rng(seed);
        let noise = DensityMatrix::random(3, 8, &mut rng).unwrap();
        let g = ghz(3).unwrap().to_density();
        let mix = DensityMatrix::new(3, g.entries() * num_complex::Complex64::new(p, 0.0)
            + noise.entries() * num_complex::Complex64::new(1.0 - p, 0.0)).unwrap();
        let v = ghz_spin_two_obs(&mix, 3, &DetectionModel::lossless()).unwrap();
        if v.verdict() {
            prop_assert!(ppt_violated(&mix, &[3]).unwrap());
        }
    }

    #[test]
    fn result4_is_permutation_invariant(a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0, k in 0usize..6) {
        let make = |t: usize, v: f64| {
            SteeringValue::new(CriterionId::SpinSum2Obs, SitePartition::all_others(3, t).unwrap(), v)
        };
        let vals = [make(1, a), make(2, b), make(3, c)];
        let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let o = orders[k];
        let shuffled = [vals[o[0]].clone(), vals[o[1]].clone(), vals[o[2]].clone()];
        let x = result4_aggregate(&vals).unwrap();
        let y = result4_aggregate(&shuffled).unwrap();
        prop_assert_eq!(x.sum().to_bits(), y.sum().to_bits());
        prop_assert_eq!(x.genuine(), y.genuine());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ghz_steering_vanishes(n in 2usize..=8, t in 0usize..8) {
        let target = t % n + 1;
        let rho = ghz(n).unwrap().to_density();
        let v = ghz_spin_two_obs(&rho, target, &DetectionModel::lossless()).unwrap();
        prop_assert!(v.value().abs() < 1e-12);
        prop_assert!(v.verdict());
    }

    // Sum form of monogamy holds for every state, including the cases where
    // the product form fails.
    #[test]
    fn qubit_sum_monogamy(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let rho = PureState::random(3, &mut rng).unwrap().to_density();
        let a = best_spin_sum(&rho, &SitePartition::new([1], 2).unwrap(), &MENU).unwrap();
        let c = best_spin_sum(&rho, &SitePartition::new([3], 2).unwrap(), &MENU).unwrap();
        let m = monogamy_check(&a, &c).unwrap();
        prop_assert!(m.satisfied, "{m:?}");
    }
}

#[test]
fn product_monogamy_fails_for_bell_pair_with_spectator() {
    // (|00> + |11>)/sqrt2 on sites 1, 2 and |0> on site 3
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); 8];
    amps[0b000] = num_complex::Complex64::new(s, 0.0);
    amps[0b110] = num_complex::Complex64::new(s, 0.0);
    let rho = PureState::new(3, amps).unwrap().to_density();
    let a = best_spin_sum(&rho, &SitePartition::new([1], 2).unwrap(), &MENU).unwrap();
    let c = best_spin_sum(&rho, &SitePartition::new([3], 2).unwrap(), &MENU).unwrap();
    assert!(a.value().abs() < 1e-12);
    assert!((c.value() - 2.0).abs() < 1e-12);
    let m = monogamy_check(&a, &c).unwrap();
    assert!(m.product < 1.0);
    assert!(m.satisfied);
}
