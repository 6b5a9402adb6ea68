//! Dense statevector simulation over RY, RZ and CZ.
//!
//! Qubit 0 is the most significant bit of a basis index, so on four qubits
//! `|q0 q1 q2 q3>` sits at index `8*q0 + 4*q1 + 2*q2 + q3`.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 30;

/// A single gate of the ansatz gate set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// `exp(-i angle Y / 2)`
    Ry { target: usize, angle: f64 },
    /// `exp(-i angle Z / 2)`
    Rz { target: usize, angle: f64 },
    /// `diag(1, 1, 1, -1)` on the (control, target) pair.
    Cz { control: usize, target: usize },
}

impl Gate {
    fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |q: usize| {
            if q < n_qubits {
                Ok(())
            } else {
                Err(Error::domain(format!("qubit {q} out of range for a {n_qubits}-qubit register")))
            }
        };
        match *self {
            Gate::Ry { target, angle } | Gate::Rz { target, angle } => {
                check(target)?;
                if !angle.is_finite() {
                    return Err(Error::domain(format!("non-finite rotation angle {angle}")));
                }
                Ok(())
            }
            Gate::Cz { control, target } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(Error::domain(format!("CZ control and target are both qubit {target}")));
                }
                Ok(())
            }
        }
    }

    /// The same gate with its rotation angle negated; CZ is its own inverse.
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Ry { target, angle } => Gate::Ry { target, angle: -angle },
            Gate::Rz { target, angle } => Gate::Rz { target, angle: -angle },
            cz @ Gate::Cz { .. } => cz,
        }
    }
}

/// Which relative phase joins the two basis states of a superposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// `(|i> + |j>) / sqrt 2`
    PlusX,
    /// `(|i> + i|j>) / sqrt 2`
    PlusY,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl Statevector {
    /// The computational basis state `|index>`.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::domain(format!(
                "basis index {index} out of range for {n_qubits} qubits (dimension {dim})"
            )));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    /// `(|i> + |j>)/sqrt 2` or `(|i> + i|j>)/sqrt 2`.
    pub fn superposition(n_qubits: usize, i: usize, j: usize, phase: Phase) -> Result<Self> {
        if i == j {
            return Err(Error::domain(format!("superposition needs two distinct basis states, got {i} twice")));
        }
        let mut state = Self::basis_state(n_qubits, i)?;
        if j >= state.dim() {
            return Err(Error::domain(format!("basis index {j} out of range for {n_qubits} qubits")));
        }
        state.amplitudes[i] = C64::new(FRAC_1_SQRT_2, 0.0);
        state.amplitudes[j] = match phase {
            Phase::PlusX => C64::new(FRAC_1_SQRT_2, 0.0),
            Phase::PlusY => C64::new(0.0, FRAC_1_SQRT_2),
        };
        Ok(state)
    }

    /// Wraps raw amplitudes, which must have length `2^n_qubits` and unit norm
    /// within `1e-10`.
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_register(n_qubits)?;
        if amplitudes.len() != 1usize << n_qubits {
            return Err(Error::domain(format!(
                "expected {} amplitudes for {n_qubits} qubits, got {}",
                1usize << n_qubits,
                amplitudes.len()
            )));
        }
        let state = Self { n_qubits, amplitudes };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::domain(format!("state is not normalized (|psi|^2 = {norm})")));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &Statevector) -> Result<C64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::domain(format!(
                "inner product between {}- and {}-qubit states",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// Returns the state with `gate` applied.
    pub fn apply_gate(&self, gate: &Gate) -> Result<Statevector> {
        let mut out = self.clone();
        out.apply_in_place(gate)?;
        Ok(out)
    }

    pub fn apply_in_place(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) -> Result<()> {
        for gate in gates {
            self.apply_in_place(gate)?;
        }
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, gate: &Gate) {
        match *gate {
            Gate::Ry { target, angle } => {
                let (s, c) = (angle / 2.0).sin_cos();
                let mask = self.mask(target);
                for_each_pair(&mut self.amplitudes, mask, |a0, a1| {
                    let (x0, x1) = (*a0, *a1);
                    *a0 = x0 * c - x1 * s;
                    *a1 = x0 * s + x1 * c;
                });
            }
            Gate::Rz { target, angle } => {
                let (s, c) = (angle / 2.0).sin_cos();
                let (p0, p1) = (C64::new(c, -s), C64::new(c, s));
                let mask = self.mask(target);
                for_each_pair(&mut self.amplitudes, mask, |a0, a1| {
                    *a0 *= p0;
                    *a1 *= p1;
                });
            }
            Gate::Cz { control, target } => {
                let both = self.mask(control) | self.mask(target);
                for (idx, amp) in self.amplitudes.iter_mut().enumerate() {
                    if idx & both == both {
                        *amp = -*amp;
                    }
                }
            }
        }
    }

    fn mask(&self, qubit: usize) -> usize {
        1usize << (self.n_qubits - 1 - qubit)
    }
}

fn check_register(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::domain(format!("register size must be in 1..={MAX_QUBITS}, got {n_qubits}")));
    }
    Ok(())
}

/// `sum conj(a_i) b_i` over equal-length slices.
pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Visits every amplitude pair `(|..0..>, |..1..>)` that differs only in the
/// bit selected by `mask`.
fn for_each_pair(amps: &mut [C64], mask: usize, mut f: impl FnMut(&mut C64, &mut C64)) {
    for block in amps.chunks_exact_mut(mask << 1) {
        let (lo, hi) = block.split_at_mut(mask);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            f(a0, a1);
        }
    }
}
