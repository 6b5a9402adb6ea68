//! Subspace-search variational quantum eigensolver (SSVQE) on an exact
//! statevector simulator.
//!
//! Orthogonal computational-basis inputs are pushed through one
//! parameterized unitary, so the outputs stay orthogonal and minimizing their
//! summed (or weighted) energy locates the low-lying eigenspace. The crate
//! provides the simulator, Pauli observables, the dense-diagonalization
//! oracle used for validation, a BFGS optimizer, the SSVQE drivers and the
//! transition-amplitude estimator.

pub mod ansatz;
pub mod error;
pub mod experiment;
pub mod optimizer;
pub mod pauli;
pub mod spectrum;
pub mod ssvqe;
pub mod statevector;
pub mod transition;

pub use ansatz::{AnsatzSpec, Block, Entangler};
pub use error::{Error, Result};
pub use optimizer::{GradientMode, Minimum, OptimizationTrace, OptimizerConfig, Status};
pub use pauli::{
    parse_observable, parse_observable_with_qubits, random_transverse_ising, serialize_observable, Observable, Pauli,
    PauliTerm,
};
pub use spectrum::{exact_spectrum, ExactSpectrum};
pub use ssvqe::{OptimizedCircuit, RunOptions, SsvqeProblem, SsvqeResult, Variant};
pub use statevector::{Gate, Phase, Statevector, C64};
pub use transition::{direct_matrix_element, transition_amplitude, TransitionEstimate, TransitionRequest};
