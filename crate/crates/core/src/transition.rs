//! Transition matrix elements `<E_i|A|E_j>` from an optimized circuit.
//!
//! With `W` the optimized circuit and `M = W^dag A W`, the real part is
//! `<+x|M|+x> - M_ii/2 - M_jj/2` for `|+x> = (|i> + |j>)/sqrt 2`. For
//! `|+y> = (|i> + i|j>)/sqrt 2` the same combination equals `-Im M_ij`, so
//! the imaginary part is assembled with the opposite sign. Every term is an
//! expectation value of its own circuit run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::Observable;
use crate::ssvqe::OptimizedCircuit;
use crate::statevector::{Phase, C64};

#[derive(Debug, Clone, Copy)]
pub struct TransitionRequest<'a> {
    pub operator: &'a Observable,
    pub circuit: &'a OptimizedCircuit,
    /// Output positions in the circuit's input list.
    pub i: usize,
    pub j: usize,
}

/// The three measured expectation values behind one part of the amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTerms {
    pub superposition: f64,
    pub diagonal_i: f64,
    pub diagonal_j: f64,
}

impl DecompositionTerms {
    /// `<+|M|+> - M_ii/2 - M_jj/2`
    pub fn combine(&self) -> f64 {
        self.superposition - 0.5 * self.diagonal_i - 0.5 * self.diagonal_j
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionEstimate {
    pub value: C64,
    /// `None` for diagonal requests, which are a single expectation value.
    pub real_terms: Option<DecompositionTerms>,
    pub imag_terms: Option<DecompositionTerms>,
}

fn check(req: &TransitionRequest<'_>) -> Result<(usize, usize)> {
    if req.operator.n_qubits() != req.circuit.ansatz.n_qubits {
        return Err(Error::domain(format!(
            "{}-qubit operator on a {}-qubit circuit",
            req.operator.n_qubits(),
            req.circuit.ansatz.n_qubits
        )));
    }
    Ok((req.circuit.input(req.i)?, req.circuit.input(req.j)?))
}

/// Assembles `<E_i|A|E_j>` from expectation values of prepared basis and
/// superposition states.
pub fn transition_amplitude(req: &TransitionRequest<'_>) -> Result<TransitionEstimate> {
    let (bi, bj) = check(req)?;
    let c = req.circuit;
    let expect = |state| req.operator.expectation(&state);
    let prepare = |idx| c.ansatz.prepare_state(Some(&c.phi), &c.theta, idx);
    if bi == bj {
        let value = expect(prepare(bi)?)?;
        return Ok(TransitionEstimate { value: C64::new(value, 0.0), real_terms: None, imag_terms: None });
    }
    let superposition = |phase| c.ansatz.prepare_superposition(Some(&c.phi), &c.theta, bi, bj, phase);
    let real = DecompositionTerms {
        superposition: expect(superposition(Phase::PlusX)?)?,
        diagonal_i: expect(prepare(bi)?)?,
        diagonal_j: expect(prepare(bj)?)?,
    };
    let imag = DecompositionTerms {
        superposition: expect(superposition(Phase::PlusY)?)?,
        diagonal_i: expect(prepare(bi)?)?,
        diagonal_j: expect(prepare(bj)?)?,
    };
    Ok(TransitionEstimate {
        value: C64::new(real.combine(), -imag.combine()),
        real_terms: Some(real),
        imag_terms: Some(imag),
    })
}

/// `<W input_i| A |W input_j>` computed directly on the statevectors.
pub fn direct_matrix_element(req: &TransitionRequest<'_>) -> Result<C64> {
    check(req)?;
    let left = req.circuit.prepare(req.i)?;
    let right = req.circuit.prepare(req.j)?;
    let applied = req.operator.apply(&right)?;
    Ok(crate::statevector::inner(left.amplitudes(), &applied))
}
