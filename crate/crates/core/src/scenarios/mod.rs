//! End-to-end runs: threshold searches, the eavesdropper sweep, the
//! secret-sharing demonstration, parameter sweeps and shot emulation.

mod eavesdrop;
mod secret_sharing;
mod shots;
mod sweep;
mod threshold;

pub use eavesdrop::{eavesdrop_point, eavesdrop_sweep, EavesdropRecord};
pub use secret_sharing::{secret_sharing_demo, Backend, SecretSharingReport};
pub use shots::{simulate_shots, simulate_shots_on_stream, ShotCriterion, ShotEstimate};
pub use sweep::{
    check_grid, parse_grid, run_sweep, BaseParameters, SweepConfig, SweepCriterion,
    SweepParameter, SweepPoint, MAX_GRID_POINTS, MAX_SHOTS,
};
pub use threshold::{find_threshold, ThresholdResult, ThresholdScenario, THRESHOLD_TOL};
