//! Gaussian continuous-variable states in the covariance-matrix formalism.

mod inference;
mod state;
pub mod symplectic;

pub use inference::{
    angle_grid, best_conditional_variance, best_steering_product, combo_variance,
    optimal_conditional_variance, s_j_fixed_combo, s_j_optimal_gains, steering_product_cv,
    HomodynePlan, QuadratureCombo, PINV_CUTOFF,
};
pub use state::{cv_ghz, eavesdrop_scenario, GaussianState, PHYSICALITY_TOL};

/// Default number of homodyne angles per mode when scanning strategies.
pub const DEFAULT_ANGLE_COUNT: usize = 36;
