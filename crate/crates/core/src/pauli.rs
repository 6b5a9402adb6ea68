//! Pauli-string observables.
//!
//! An [`Observable`] is a real-weighted sum of Pauli strings, so it is
//! Hermitian by construction. Terms act on a statevector through bit masks:
//! a string equals `i^{#Y} X^x Z^z`, so `P|b> = i^{#Y} (-1)^{|b & z|} |b ^ x>`
//! with `x` the X/Y positions and `z` the Y/Z positions.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{Statevector, C64, MAX_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    fn symbol(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `coefficient * P_{q1} P_{q2} ...` with identity on every unlisted qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    coefficient: f64,
    /// Sorted by qubit, no repeats.
    operators: Vec<(usize, Pauli)>,
}

impl PauliTerm {
    pub fn new(coefficient: f64, operators: impl IntoIterator<Item = (usize, Pauli)>) -> Result<Self> {
        if !coefficient.is_finite() {
            return Err(Error::domain(format!("non-finite coefficient {coefficient}")));
        }
        let mut operators: Vec<_> = operators.into_iter().collect();
        operators.sort_by_key(|&(q, _)| q);
        if let Some(w) = operators.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::domain(format!("qubit {} repeated within a term", w[0].0)));
        }
        Ok(Self { coefficient, operators })
    }

    pub fn identity(coefficient: f64) -> Result<Self> {
        Self::new(coefficient, [])
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn operators(&self) -> &[(usize, Pauli)] {
        &self.operators
    }

    pub fn is_identity(&self) -> bool {
        self.operators.is_empty()
    }

    fn max_qubit(&self) -> Option<usize> {
        self.operators.last().map(|&(q, _)| q)
    }

    fn masks(&self, n_qubits: usize) -> TermMasks {
        let mut m = TermMasks { flip: 0, phase: 0, n_y: 0 };
        for &(q, p) in &self.operators {
            let bit = 1usize << (n_qubits - 1 - q);
            match p {
                Pauli::X => m.flip |= bit,
                Pauli::Y => {
                    m.flip |= bit;
                    m.phase |= bit;
                    m.n_y += 1;
                }
                Pauli::Z => m.phase |= bit,
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy)]
struct TermMasks {
    flip: usize,
    phase: usize,
    n_y: u32,
}

impl TermMasks {
    /// `i^{#Y}`
    fn y_phase(&self) -> C64 {
        match self.n_y % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }

    /// Sign from the Z part acting on `|b>`.
    #[inline]
    fn sign(&self, b: usize) -> f64 {
        if (b & self.phase).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `<psi|P|psi>` without the coefficient.
    fn expectation(&self, amps: &[C64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (b, a) in amps.iter().enumerate() {
            acc += amps[b ^ self.flip].conj() * a * self.sign(b);
        }
        acc * self.y_phase()
    }
}

/// A real linear combination of Pauli strings on `n_qubits` qubits.
///
/// Terms with identical operator strings are merged on construction; the
/// position of the first occurrence is kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawObservable")]
pub struct Observable {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

#[derive(Deserialize)]
struct RawObservable {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl TryFrom<RawObservable> for Observable {
    type Error = Error;

    fn try_from(raw: RawObservable) -> Result<Self> {
        let terms =
            raw.terms.into_iter().map(|t| PauliTerm::new(t.coefficient, t.operators)).collect::<Result<Vec<_>>>()?;
        Observable::new(raw.n_qubits, terms)
    }
}

impl Observable {
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::domain(format!("observable register size must be in 1..={MAX_QUBITS}, got {n_qubits}")));
        }
        if let Some(q) = terms.iter().filter_map(PauliTerm::max_qubit).find(|&q| q >= n_qubits) {
            return Err(Error::domain(format!("term acts on qubit {q} but the observable has {n_qubits} qubits")));
        }
        let mut merged: Vec<PauliTerm> = Vec::with_capacity(terms.len());
        for term in terms {
            match merged.iter_mut().find(|t| t.operators == term.operators) {
                Some(existing) => existing.coefficient += term.coefficient,
                None => merged.push(term),
            }
        }
        Ok(Self { n_qubits, terms: merged })
    }

    /// The empty sum (the zero operator).
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, Vec::new())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn identity_coefficient(&self) -> f64 {
        self.terms.iter().filter(|t| t.is_identity()).map(|t| t.coefficient).sum()
    }

    pub fn scaled(&self, factor: f64) -> Observable {
        let terms = self
            .terms
            .iter()
            .map(|t| PauliTerm { coefficient: t.coefficient * factor, operators: t.operators.clone() })
            .collect();
        Observable { n_qubits: self.n_qubits, terms }
    }

    /// `-self`; exact, since only signs change.
    pub fn negated(&self) -> Observable {
        self.scaled(-1.0)
    }

    /// `self + other` on the same register.
    pub fn sum(&self, other: &Observable) -> Result<Observable> {
        self.check_register(other.n_qubits)?;
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Observable::new(self.n_qubits, terms)
    }

    fn check_register(&self, n_qubits: usize) -> Result<()> {
        if self.n_qubits != n_qubits {
            return Err(Error::domain(format!(
                "{}-qubit observable applied to a {n_qubits}-qubit state",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// `<psi|O|psi>`.
    pub fn expectation(&self, state: &Statevector) -> Result<f64> {
        self.check_register(state.n_qubits())?;
        Ok(self.expectation_unchecked(state.amplitudes()))
    }

    pub(crate) fn expectation_unchecked(&self, amps: &[C64]) -> f64 {
        let mut total = C64::new(0.0, 0.0);
        for term in &self.terms {
            let value = term.masks(self.n_qubits).expectation(amps);
            total += value * term.coefficient;
        }
        debug_assert!(
            total.im.abs() <= 1e-12 * (1.0 + self.coefficient_norm()),
            "Hermitian expectation has imaginary part {}",
            total.im
        );
        total.re
    }

    fn coefficient_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// `O|psi>` as raw (unnormalized) amplitudes.
    pub fn apply(&self, state: &Statevector) -> Result<Vec<C64>> {
        self.check_register(state.n_qubits())?;
        let amps = state.amplitudes();
        let mut out = vec![C64::new(0.0, 0.0); amps.len()];
        for term in &self.terms {
            let m = term.masks(self.n_qubits);
            let scale = m.y_phase() * term.coefficient;
            for (b, a) in amps.iter().enumerate() {
                out[b ^ m.flip] += a * scale * m.sign(b);
            }
        }
        Ok(out)
    }

    /// Row-major dense `2^n x 2^n` matrix.
    pub fn dense_matrix(&self) -> Vec<Vec<C64>> {
        let dim = self.dim();
        let mut m = vec![vec![C64::new(0.0, 0.0); dim]; dim];
        for term in &self.terms {
            let masks = term.masks(self.n_qubits);
            let scale = masks.y_phase() * term.coefficient;
            for col in 0..dim {
                m[col ^ masks.flip][col] += scale * masks.sign(col);
            }
        }
        m
    }
}

/// The fully connected transverse-field Ising Hamiltonian
/// `sum_i a_i X_i + sum_{i>j} J_ij Z_i Z_j` with every coefficient uniform on `[0, 1)`.
///
/// Coefficients come from `ChaCha20Rng::seed_from_u64(seed)` in stream order:
/// `a_0 .. a_{n-1}`, then `J_ij` for `i = 1..n`, `j = 0..i`.
pub fn random_transverse_ising(n_qubits: usize, seed: u64) -> Result<Observable> {
    if n_qubits == 0 {
        return Err(Error::domain("transverse Ising model needs at least one qubit"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut terms = Vec::with_capacity(n_qubits + n_qubits * (n_qubits - 1) / 2);
    for i in 0..n_qubits {
        terms.push(PauliTerm::new(rng.random::<f64>(), [(i, Pauli::X)])?);
    }
    for i in 1..n_qubits {
        for j in 0..i {
            terms.push(PauliTerm::new(rng.random::<f64>(), [(j, Pauli::Z), (i, Pauli::Z)])?);
        }
    }
    Observable::new(n_qubits, terms)
}

const QUBITS_PRAGMA: &str = "n_qubits";

/// Parses the line-oriented Pauli-sum format:
///
/// ```text
/// # n_qubits = 4
/// -0.5 I
/// 0.25 X0 Z2
/// 1.5e-2 Y1 Y3   # trailing comments are fine
/// ```
///
/// The register size comes from a `# n_qubits = N` comment when present and
/// from the highest qubit index otherwise.
pub fn parse_observable(text: &str) -> Result<Observable> {
    parse_with(text, None)
}

/// Like [`parse_observable`] with an explicit register size.
pub fn parse_observable_with_qubits(text: &str, n_qubits: usize) -> Result<Observable> {
    parse_with(text, Some(n_qubits))
}

fn parse_with(text: &str, forced: Option<usize>) -> Result<Observable> {
    let mut terms = Vec::new();
    let mut declared = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| Error::Parse { line, message };
        let (body, comment) = match raw.split_once('#') {
            Some((b, c)) => (b, Some(c)),
            None => (raw, None),
        };
        if let Some(n) = comment.and_then(parse_pragma) {
            declared = Some(n.map_err(err)?);
        }
        let mut tokens = body.split_whitespace();
        let Some(first) = tokens.next() else { continue };
        let coefficient: f64 = first.parse().map_err(|_| err(format!("invalid coefficient `{first}`")))?;
        if !coefficient.is_finite() {
            return Err(err(format!("non-finite coefficient `{first}`")));
        }
        let ops: Vec<&str> = tokens.collect();
        let operators = match ops.as_slice() {
            [] => return Err(err("term has no operators; write `I` for the identity".into())),
            ["I"] => Vec::new(),
            _ => ops.iter().map(|tok| parse_operator(tok).map_err(err)).collect::<Result<Vec<_>>>()?,
        };
        let term = PauliTerm::new(coefficient, operators).map_err(|e| match e {
            Error::Domain(m) => err(m),
            other => other,
        })?;
        terms.push((line, term));
    }
    let highest = terms.iter().filter_map(|(_, t)| t.max_qubit()).max();
    let n_qubits = forced.or(declared).unwrap_or_else(|| highest.map_or(1, |q| q + 1));
    if let Some((line, _)) = terms.iter().find(|(_, t)| t.max_qubit().is_some_and(|q| q >= n_qubits)) {
        return Err(Error::Parse {
            line: *line,
            message: format!("qubit index exceeds the {n_qubits}-qubit register"),
        });
    }
    Observable::new(n_qubits, terms.into_iter().map(|(_, t)| t).collect())
}

fn parse_pragma(comment: &str) -> Option<Result<usize, String>> {
    let (key, value) = comment.split_once('=')?;
    if key.trim() != QUBITS_PRAGMA {
        return None;
    }
    Some(
        value
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| (1..=MAX_QUBITS).contains(&n))
            .ok_or_else(|| format!("invalid qubit count `{}`", value.trim())),
    )
}

fn parse_operator(token: &str) -> Result<(usize, Pauli), String> {
    let mut chars = token.chars();
    let pauli = match chars.next() {
        Some('X') => Pauli::X,
        Some('Y') => Pauli::Y,
        Some('Z') => Pauli::Z,
        Some('I') => return Err("`I` must appear alone as the identity term".into()),
        _ => return Err(format!("invalid operator `{token}`")),
    };
    let qubit = chars.as_str().parse::<usize>().map_err(|_| format!("invalid qubit index in `{token}`"))?;
    Ok((qubit, pauli))
}

/// Inverse of [`parse_observable`]. Coefficients use Rust's shortest
/// round-trip float formatting, so parsing the output is exact.
pub fn serialize_observable(obs: &Observable) -> String {
    obs.to_string()
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {QUBITS_PRAGMA} = {}", self.n_qubits)?;
        for term in &self.terms {
            write!(f, "{}", term.coefficient)?;
            if term.is_identity() {
                write!(f, " I")?;
            }
            for &(q, p) in &term.operators {
                write!(f, " {}{q}", p.symbol())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_observable(s)
    }
}
