//! Layered hardware-efficient circuits.
//!
//! A layer applies `RY` then `RZ` to each of its qubits, each with its own
//! angle, followed by a CZ entangling stage. The subspace block `V(phi)` is
//! `d1` such layers over `subspace_qubits`. The global block `U(theta)` is `d2`
//! layers over every qubit plus one closing rotation layer. States are
//! prepared as `U(theta) V(phi) |input>`.
//!
//! Within a rotation layer, angles are ordered `[ry_q, rz_q]` per qubit in
//! ascending layer-qubit order; layers follow in application order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{Gate, Phase, Statevector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Entangler {
    /// CZ on each neighbouring pair `(q, q+1)`.
    #[default]
    Chain,
    /// CZ on every pair.
    AllToAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Block {
    /// `V(phi)`, restricted to the subspace qubits.
    V,
    /// `U(theta)`, acting on the whole register.
    U,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub subspace_qubits: Vec<usize>,
    pub d1: usize,
    pub d2: usize,
    #[serde(default)]
    pub entangler: Entangler,
}

impl AnsatzSpec {
    pub fn new(
        n_qubits: usize,
        subspace_qubits: Vec<usize>,
        d1: usize,
        d2: usize,
        entangler: Entangler,
    ) -> Result<Self> {
        let spec = Self { n_qubits, subspace_qubits, d1, d2, entangler };
        spec.validate()?;
        Ok(spec)
    }

    /// The trailing `ceil(log2(n_inputs))` qubits, enough for `V` to span
    /// `n_inputs` consecutive basis states starting at `|0...0>`.
    pub fn default_subspace_qubits(n_qubits: usize, n_inputs: usize) -> Vec<usize> {
        let width = n_inputs.max(1).next_power_of_two().trailing_zeros() as usize;
        (n_qubits.saturating_sub(width)..n_qubits).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(Error::domain("ansatz needs at least one qubit"));
        }
        let mut seen = vec![false; self.n_qubits];
        for &q in &self.subspace_qubits {
            if q >= self.n_qubits {
                return Err(Error::domain(format!("subspace qubit {q} out of range for {} qubits", self.n_qubits)));
            }
            if std::mem::replace(&mut seen[q], true) {
                return Err(Error::domain(format!("subspace qubit {q} listed twice")));
            }
        }
        Ok(())
    }

    pub fn parameter_count(&self, block: Block) -> usize {
        match block {
            Block::V => 2 * self.subspace_qubits.len() * self.d1,
            Block::U => 2 * self.n_qubits * (self.d2 + 1),
        }
    }

    /// Bit mask (in basis-index convention) of the subspace qubits.
    pub fn subspace_mask(&self) -> usize {
        self.subspace_qubits.iter().fold(0, |m, &q| m | 1usize << (self.n_qubits - 1 - q))
    }

    /// Gate sequence of `U(theta) V(phi)` in application order. `phi = None`
    /// omits `V` entirely.
    pub fn circuit(&self, phi: Option<&[f64]>, theta: &[f64]) -> Result<Vec<Gate>> {
        check_len("theta", theta, self.parameter_count(Block::U))?;
        let mut gates = Vec::new();
        if let Some(phi) = phi {
            check_len("phi", phi, self.parameter_count(Block::V))?;
            let qubits = &self.subspace_qubits;
            for layer in phi.chunks_exact(2 * qubits.len().max(1)).take(self.d1) {
                rotation_layer(&mut gates, qubits, layer);
                entangling_stage(&mut gates, qubits, self.entangler);
            }
        }
        let all: Vec<usize> = (0..self.n_qubits).collect();
        let mut layers = theta.chunks_exact(2 * self.n_qubits);
        for _ in 0..self.d2 {
            rotation_layer(&mut gates, &all, layers.next().expect("length checked"));
            entangling_stage(&mut gates, &all, self.entangler);
        }
        rotation_layer(&mut gates, &all, layers.next().expect("length checked"));
        Ok(gates)
    }

    /// `U(theta) V(phi) |state>`.
    pub fn evolve(&self, phi: Option<&[f64]>, theta: &[f64], mut state: Statevector) -> Result<Statevector> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::domain(format!(
                "{}-qubit ansatz applied to a {}-qubit state",
                self.n_qubits,
                state.n_qubits()
            )));
        }
        state.apply_all(&self.circuit(phi, theta)?)?;
        Ok(state)
    }

    /// `U(theta) V(phi) |input_index>`.
    pub fn prepare_state(&self, phi: Option<&[f64]>, theta: &[f64], input_index: usize) -> Result<Statevector> {
        self.evolve(phi, theta, Statevector::basis_state(self.n_qubits, input_index)?)
    }

    /// `U(theta) V(phi)` applied to `(|i> + |j>)/sqrt 2` or `(|i> + i|j>)/sqrt 2`.
    pub fn prepare_superposition(
        &self,
        phi: Option<&[f64]>,
        theta: &[f64],
        i: usize,
        j: usize,
        phase: Phase,
    ) -> Result<Statevector> {
        self.evolve(phi, theta, Statevector::superposition(self.n_qubits, i, j, phase)?)
    }
}

fn check_len(name: &str, params: &[f64], expected: usize) -> Result<()> {
    if params.len() != expected {
        return Err(Error::domain(format!("{name} has {} parameters, the ansatz expects {expected}", params.len())));
    }
    Ok(())
}

fn rotation_layer(gates: &mut Vec<Gate>, qubits: &[usize], angles: &[f64]) {
    for (&q, pair) in qubits.iter().zip(angles.chunks_exact(2)) {
        gates.push(Gate::Ry { target: q, angle: pair[0] });
        gates.push(Gate::Rz { target: q, angle: pair[1] });
    }
}

fn entangling_stage(gates: &mut Vec<Gate>, qubits: &[usize], entangler: Entangler) {
    match entangler {
        Entangler::Chain => {
            for w in qubits.windows(2) {
                gates.push(Gate::Cz { control: w[0], target: w[1] });
            }
        }
        Entangler::AllToAll => {
            for (a, &qa) in qubits.iter().enumerate() {
                for &qb in &qubits[a + 1..] {
                    gates.push(Gate::Cz { control: qa, target: qb });
                }
            }
        }
    }
}
