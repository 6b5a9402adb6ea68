//! Reference linear algebra written independently of the library: dense
//! operators from Kronecker products and a cyclic Jacobi eigensolver.

use ssvqe::{Observable, Pauli, C64};

pub type Matrix = Vec<Vec<C64>>;

fn pauli_matrix(p: Option<Pauli>) -> [[C64; 2]; 2] {
    let (o, l, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    match p {
        None => [[l, o], [o, l]],
        Some(Pauli::X) => [[o, l], [l, o]],
        Some(Pauli::Y) => [[o, -i], [i, o]],
        Some(Pauli::Z) => [[l, o], [o, -l]],
    }
}

fn kron(a: &Matrix, b: &[[C64; 2]; 2]) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![C64::new(0.0, 0.0); 2 * n]; 2 * n];
    for r in 0..n {
        for c in 0..n {
            for (br, row) in b.iter().enumerate() {
                for (bc, v) in row.iter().enumerate() {
                    out[2 * r + br][2 * c + bc] = a[r][c] * v;
                }
            }
        }
    }
    out
}

/// Dense matrix with qubit 0 as the leftmost tensor factor.
pub fn dense(obs: &Observable) -> Matrix {
    let n = obs.n_qubits();
    let dim = 1 << n;
    let mut total = vec![vec![C64::new(0.0, 0.0); dim]; dim];
    for term in obs.terms() {
        let mut m: Matrix = vec![vec![C64::new(1.0, 0.0)]];
        for q in 0..n {
            let p = term.operators().iter().find(|(t, _)| *t == q).map(|(_, p)| *p);
            m = kron(&m, &pauli_matrix(p));
        }
        for r in 0..dim {
            for c in 0..dim {
                total[r][c] += m[r][c] * term.coefficient();
            }
        }
    }
    total
}

pub fn mat_vec(m: &Matrix, v: &[C64]) -> Vec<C64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Eigenvalues (ascending) and column eigenvectors of a real symmetric matrix.
pub fn jacobi(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (row_p, row_q) = (a[p].clone(), a[q].clone());
                for k in 0..n {
                    a[p][k] = c * row_p[k] - s * row_q[k];
                    a[q][k] = s * row_p[k] + c * row_q[k];
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x][x].total_cmp(&a[y][y]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|r| v[r][i]).collect()).collect();
    (values, vectors)
}

/// Spectrum of a Hermitian operator through its real embedding
/// `[[A, -B], [B, A]]`, whose spectrum is that of `A + iB` doubled.
pub struct Reference {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors; complete only for real operators.
    pub eigenvectors: Option<Vec<Vec<C64>>>,
}

pub fn spectrum(obs: &Observable) -> Reference {
    let m = dense(obs);
    let dim = m.len();
    let real = m.iter().all(|row| row.iter().all(|z| z.im == 0.0));
    if real {
        let (values, vectors) = jacobi(m.iter().map(|row| row.iter().map(|z| z.re).collect()).collect());
        let vectors = vectors.into_iter().map(|v| v.into_iter().map(|x| C64::new(x, 0.0)).collect()).collect();
        return Reference { eigenvalues: values, eigenvectors: Some(vectors) };
    }
    let mut big = vec![vec![0.0; 2 * dim]; 2 * dim];
    for r in 0..dim {
        for c in 0..dim {
            big[r][c] = m[r][c].re;
            big[r + dim][c + dim] = m[r][c].re;
            big[r][c + dim] = -m[r][c].im;
            big[r + dim][c] = m[r][c].im;
        }
    }
    let (values, _) = jacobi(big);
    Reference { eigenvalues: values.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect(), eigenvectors: None }
}

impl Reference {
    /// Levels whose energy lies within `1e-10` of some level in `levels`,
    /// closed under that relation.
    pub fn widened(&self, levels: std::ops::Range<usize>) -> std::ops::Range<usize> {
        let e = &self.eigenvalues;
        let (mut lo, mut hi) = (levels.start, levels.end);
        while lo > 0 && e[lo] - e[lo - 1] < 1e-10 {
            lo -= 1;
        }
        while hi < e.len() && e[hi] - e[hi - 1] < 1e-10 {
            hi += 1;
        }
        lo..hi
    }

    /// Weight of `state` on the eigenspace of `levels` (cluster-widened).
    pub fn weight(&self, levels: std::ops::Range<usize>, state: &[C64]) -> f64 {
        let vectors = self.eigenvectors.as_ref().expect("real operator");
        self.widened(levels).map(|l| inner(&vectors[l], state).norm_sqr()).sum()
    }
}
