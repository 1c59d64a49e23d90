//! Dense simulation of qubit registers.

pub mod kraus;
pub mod matrix;
pub mod measurement;
pub mod pauli;
pub mod random;
pub mod state;

pub use kraus::{KrausBranch, KrausFamily, KrausOperator};
pub use matrix::{c, re, ComplexMatrix, HermitianEigen, C64, MAX_QUBITS, TOLERANCE};
pub use measurement::{measure, sample_index, BinaryObservable, Branch, ProjectiveMeasurement};
pub use pauli::{hadamard_all, sigma_x, sigma_z, PauliMask};
pub use state::{
    embed, epr_state, is_density_matrix, partial_trace, purify, state_norm_sq, trace_distance,
    Normalization, QubitSplit, StateVector,
};
