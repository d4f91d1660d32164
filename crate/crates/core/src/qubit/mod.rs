//! Dense N-qubit states, Pauli observables and inference variances.

mod inference;
mod pauli;
mod state;

pub use inference::{
    inference_variance_with_loss, optimal_inference_variance, variance_of_difference,
    DetectionModel, NoClickPolicy,
};
pub use pauli::{ghz_predictor, ghz_predictor_for, Pauli, PauliString, SpinAxis};
pub use state::{ghz, random_unitary2, DensityMatrix, PureState};
pub(crate) use state::hermitian_min_eigenvalue;

/// Largest register the dense representation accepts.
pub const MAX_QUBITS: usize = 14;
