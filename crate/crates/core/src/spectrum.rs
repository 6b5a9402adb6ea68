//! Dense exact diagonalization, the reference every variational result is
//! checked against.

use std::ops::Range;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::pauli::Observable;
use crate::statevector::{Statevector, C64};

/// Largest register [`exact_spectrum`] will materialize.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Eigenvalues closer than this are treated as one degenerate level.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct ExactSpectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Statevector>,
}

/// Full eigendecomposition of `obs`, eigenvalues ascending.
pub fn exact_spectrum(obs: &Observable) -> Result<ExactSpectrum> {
    let n = obs.n_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Capacity { n_qubits: n, max: MAX_DENSE_QUBITS });
    }
    let dim = obs.dim();
    let rows = obs.dense_matrix();
    let matrix = DMatrix::<C64>::from_fn(dim, dim, |r, c| rows[r][c]);
    let eig = SymmetricEigen::new(matrix);

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = order
        .iter()
        .map(|&i| {
            let col = eig.eigenvectors.column(i);
            let norm = col.norm();
            let amps = col.iter().map(|a| a / norm).collect();
            Statevector::from_amplitudes(n, amps)
        })
        .collect::<Result<_>>()?;
    Ok(ExactSpectrum { eigenvalues, eigenvectors })
}

impl ExactSpectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[Statevector] {
        &self.eigenvectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `E_0 + ... + E_k`.
    pub fn lowest_sum(&self, k: usize) -> f64 {
        self.eigenvalues[..=k].iter().sum()
    }

    /// Index range of the degenerate level containing eigenvalue `level`.
    pub fn cluster(&self, level: usize) -> Range<usize> {
        let e = &self.eigenvalues;
        let mut lo = level;
        while lo > 0 && e[lo] - e[lo - 1] < DEGENERACY_TOLERANCE {
            lo -= 1;
        }
        let mut hi = level + 1;
        while hi < e.len() && e[hi] - e[hi - 1] < DEGENERACY_TOLERANCE {
            hi += 1;
        }
        lo..hi
    }

    /// `|| P psi ||^2` for `P` the projector onto eigenvectors `range`.
    pub fn projected_weight(&self, range: Range<usize>, state: &Statevector) -> Result<f64> {
        self.eigenvectors[range].iter().map(|v| v.inner_product(state).map(|ip| ip.norm_sqr())).sum()
    }

    /// Squared overlap of `state` with eigenstate `level`, taken against the
    /// whole degenerate eigenspace when `level` is degenerate.
    pub fn level_fidelity(&self, level: usize, state: &Statevector) -> Result<f64> {
        self.projected_weight(self.cluster(level), state)
    }

    /// Span of levels `0..=k`, widened to whole degenerate clusters.
    pub fn low_subspace(&self, k: usize) -> Range<usize> {
        0..self.cluster(k).end
    }
}
