//! Exact simulation of the parameterized quantum circuit whose measurement
//! distribution seeds the classical weight generation.

mod ansatz;
mod state;

pub use ansatz::{
    angle_count, angles_per_block, AnsatzCircuit, GateKind, GateRef, ProbabilityVector,
};
pub use state::{u3_matrix, u3_matrix_dagger, u3_matrix_derivatives, Matrix2, StateVector};
