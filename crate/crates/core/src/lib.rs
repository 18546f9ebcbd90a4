//! Effective matrix models of SU(2) and SU(3) gauge theory with fundamental
//! fermions: Hamiltonian construction in a truncated oscillator basis, exact
//! diagonalization, Pauli-string decomposition and a statevector VQE.

pub mod calibration;
pub mod cli;
pub mod error;
pub mod hamiltonian;
pub mod oscillator;
pub mod pauli;
pub mod potentials;
pub mod vqe;

pub use error::{Error, Result};
pub use hamiltonian::{build, build_su2, build_su3, GroundState, ModelHamiltonian};
pub use oscillator::{HermitianOperator, TruncationConfig};
pub use pauli::{decompose, reconstruct, PauliString, PauliSum};
pub use potentials::{GaugeGroup, ModelSpec, Scenario};
pub use vqe::{AnsatzSpec, Entanglement, ParameterVector, VqeOptions, VqeResult};
