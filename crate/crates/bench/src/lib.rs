//! Fixtures shared by the benchmarks.

use ssvqe::{random_transverse_ising, AnsatzSpec, Entangler, Observable};

/// Random Ising Hamiltonian and a full-register ansatz of depth `d2`.
pub fn fixture(n_qubits: usize, d2: usize) -> (Observable, AnsatzSpec) {
    let h = random_transverse_ising(n_qubits, 7).expect("n_qubits >= 1");
    let spec = AnsatzSpec::new(n_qubits, vec![], 0, d2, Entangler::Chain).expect("valid ansatz");
    (h, spec)
}

/// Deterministic angles for benchmark inputs.
pub fn angles(len: usize) -> Vec<f64> {
    (0..len).map(|i| 0.37 * i as f64 + 0.11).collect()
}
