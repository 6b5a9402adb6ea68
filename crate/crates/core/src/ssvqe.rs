//! SSVQE problems, costs and drivers.
//!
//! Three variants share one problem type:
//!
//! * [`Variant::TwoStage`] minimizes the summed energy `L1(theta)` of the
//!   inputs pushed through `U(theta)`, then with `theta*` frozen maximizes the
//!   energy `L2(phi)` of `U(theta*) V(phi) |input_s>`. `V` only rotates
//!   within the input span, so the maximum is the highest level of the
//!   subspace found by stage one, level `k`. With `reflection` the same
//!   protocol runs on `-H` over `2^n - k` inputs and finds level `k` from
//!   the top of the spectrum.
//! * [`Variant::WeightedKth`] minimizes `w E(input_k) + sum_{j<k} E(input_j)`
//!   in a single optimization over the combined circuit `U V`.
//! * [`Variant::WeightedAll`] minimizes `sum_j w_j E(input_j)` with strictly
//!   decreasing weights, mapping input `j` to level `j`.
//!
//! Results list inputs in output order: the entry at position `j`
//! estimates oracle level `levels[j]`, and the last entry is always level `k`.

use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzSpec, Block, Entangler};
use crate::error::{Error, Result};
use crate::optimizer::{
    central_difference_gradient, minimize, multistart, parameter_shift_gradient, GradientMode, Multistart, Objective,
    OptimizerConfig, Status,
};
use crate::pauli::Observable;
use crate::spectrum::ExactSpectrum;
use crate::statevector::{Gate, Statevector};

/// Multistart streams `STAGE2_STREAM + i` seed the second stage, keeping
/// them disjoint from the first stage's streams `0..n_starts`.
pub const STAGE2_STREAM: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Variant {
    TwoStage {
        /// Input position rotated to the top of the subspace in stage two;
        /// defaults to the last input.
        #[serde(default)]
        s: Option<usize>,
        /// Run on `-H` with `2^n - k` inputs.
        #[serde(default)]
        reflection: bool,
    },
    WeightedKth {
        w: f64,
    },
    WeightedAll {
        weights: Vec<f64>,
    },
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::TwoStage { .. } => "two_stage",
            Variant::WeightedKth { .. } => "weighted_kth",
            Variant::WeightedAll { .. } => "weighted_all",
        }
    }

    fn reflection(&self) -> bool {
        matches!(self, Variant::TwoStage { reflection: true, .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsvqeProblem {
    pub hamiltonian: Observable,
    /// Target excitation index; level 0 is the ground state.
    pub k: usize,
    /// Distinct basis indices fed to the circuit.
    pub input_indices: Vec<usize>,
    pub ansatz: AnsatzSpec,
    pub variant: Variant,
}

impl SsvqeProblem {
    /// Problem with the default inputs `|0..0>, |0..01>, ...` and `V` on the
    /// trailing qubits needed to span them.
    pub fn with_defaults(
        hamiltonian: Observable,
        k: usize,
        variant: Variant,
        d1: usize,
        d2: usize,
        entangler: Entangler,
    ) -> Result<Self> {
        let n = hamiltonian.n_qubits();
        let count = input_count(n, k, &variant);
        let ansatz = AnsatzSpec {
            n_qubits: n,
            subspace_qubits: AnsatzSpec::default_subspace_qubits(n, count),
            d1,
            d2,
            entangler,
        };
        let problem = Self { hamiltonian, k, input_indices: (0..count).collect(), ansatz, variant };
        problem.validate()?;
        Ok(problem)
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }

    /// `k + 1`, or `2^n - k` under reflection.
    pub fn n_inputs(&self) -> usize {
        input_count(self.n_qubits(), self.k, &self.variant)
    }

    /// Every violated constraint, reported together.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let n = self.n_qubits();
        let dim = 1usize << n;
        if self.ansatz.n_qubits != n {
            problems.push(format!("ansatz has {} qubits, the Hamiltonian {n}", self.ansatz.n_qubits));
        }
        if let Err(e) = self.ansatz.validate() {
            problems.push(e.to_string());
        }
        if self.k >= dim {
            problems.push(format!("k = {} exceeds the highest level {} of {n} qubits", self.k, dim - 1));
            return Err(Error::Validation(problems));
        }
        let count = self.n_inputs();
        if self.input_indices.len() != count {
            problems.push(format!("expected {count} input states, got {}", self.input_indices.len()));
        }
        for (pos, &idx) in self.input_indices.iter().enumerate() {
            if idx >= dim {
                problems.push(format!("input index {idx} out of range for {n} qubits"));
            }
            if self.input_indices[..pos].contains(&idx) {
                problems.push(format!("input index {idx} repeated; inputs must be orthogonal"));
            }
        }
        let width = self.ansatz.subspace_qubits.len();
        if self.ansatz.d1 > 0 && (1usize << width) < count {
            problems.push(format!("{width} subspace qubits cannot span {count} input states"));
        }
        match &self.variant {
            Variant::TwoStage { s, .. } => {
                if let Some(s) = *s {
                    if s >= count {
                        problems.push(format!("s = {s} outside the input range 0..={}", count - 1));
                    }
                }
                if self.ansatz.d1 > 0 && self.ansatz.validate().is_ok() && !self.v_preserves_inputs() {
                    problems.push(
                        "V must act only within the input span: inputs must be exactly the basis states \
                         obtained by varying the subspace qubits"
                            .into(),
                    );
                }
            }
            Variant::WeightedKth { w } => {
                if !(*w > 0.0 && *w < 1.0) {
                    problems.push(format!("weight w = {w} must lie in (0, 1)"));
                }
            }
            Variant::WeightedAll { weights } => {
                if weights.len() != self.k + 1 {
                    problems.push(format!("expected {} weights, got {}", self.k + 1, weights.len()));
                }
                if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
                    problems.push("weights must be positive and finite".into());
                }
                if weights.windows(2).any(|p| p[0].is_nan() || p[0] <= p[1]) {
                    problems.push(format!("weights {weights:?} must be strictly decreasing"));
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    fn v_preserves_inputs(&self) -> bool {
        let mask = self.ansatz.subspace_mask();
        let Some(&first) = self.input_indices.first() else { return true };
        self.input_indices.len() == 1usize << self.ansatz.subspace_qubits.len()
            && self.input_indices.iter().all(|&i| i & !mask == first & !mask)
    }

    /// The operator whose energies are optimized: `H`, or `-H` under reflection.
    pub fn cost_hamiltonian(&self) -> Observable {
        if self.variant.reflection() {
            self.hamiltonian.negated()
        } else {
            self.hamiltonian.clone()
        }
    }

    /// Oracle level estimated by each input position of a result.
    pub fn levels(&self) -> Vec<usize> {
        let top = (1usize << self.n_qubits()) - 1;
        (0..self.n_inputs()).map(|j| if self.variant.reflection() { top - j } else { j }).collect()
    }

    /// Energies `<input_j| (U V)^dag O (U V) |input_j>` for every input, in
    /// input order. `phi = None` leaves `V` out.
    pub fn input_energies(&self, observable: &Observable, phi: Option<&[f64]>, theta: &[f64]) -> Result<Vec<f64>> {
        let gates = self.ansatz.circuit(phi, theta)?;
        self.input_indices
            .iter()
            .map(|&idx| Ok(energy(observable, &gates, Statevector::basis_state(self.n_qubits(), idx)?)))
            .collect()
    }

    /// `L1(theta) = sum_j <input_j|U^dag H U|input_j>`, with `V` frozen at the
    /// identity. Under reflection `H` is replaced by `-H`.
    pub fn cost_l1(&self, theta: &[f64]) -> Result<f64> {
        let h = self.cost_hamiltonian();
        Ok(self.input_energies(&h, None, theta)?.iter().sum())
    }

    /// `L2(phi) = <input_s|V^dag U^dag(theta*) H U(theta*) V|input_s>`, the
    /// quantity stage two maximizes.
    pub fn cost_l2(&self, phi: &[f64], theta_star: &[f64]) -> Result<f64> {
        let gates = self.ansatz.circuit(Some(phi), theta_star)?;
        let input = self.input_indices[self.stage2_input()];
        Ok(energy(&self.cost_hamiltonian(), &gates, Statevector::basis_state(self.n_qubits(), input)?))
    }

    fn stage2_input(&self) -> usize {
        match self.variant {
            Variant::TwoStage { s: Some(s), .. } => s,
            _ => self.n_inputs() - 1,
        }
    }

    /// Per-input weights of the single-stage costs; `(1, ..., 1, w)` for
    /// [`Variant::WeightedKth`].
    pub fn weights(&self) -> Option<Vec<f64>> {
        match &self.variant {
            Variant::TwoStage { .. } => None,
            Variant::WeightedKth { w } => {
                let mut v = vec![1.0; self.k + 1];
                v[self.k] = *w;
                Some(v)
            }
            Variant::WeightedAll { weights } => Some(weights.clone()),
        }
    }

    /// Splits a combined parameter vector into `(phi, theta)`.
    pub fn split_params<'p>(&self, params: &'p [f64]) -> Result<(&'p [f64], &'p [f64])> {
        let nv = self.ansatz.parameter_count(Block::V);
        let total = nv + self.ansatz.parameter_count(Block::U);
        if params.len() != total {
            return Err(Error::domain(format!("expected {total} combined parameters, got {}", params.len())));
        }
        Ok(params.split_at(nv))
    }

    /// `sum_j w_j <input_j|(UV)^dag H (UV)|input_j>` over the combined
    /// parameters `[phi | theta]`.
    pub fn cost_weighted(&self, params: &[f64]) -> Result<f64> {
        let weights = self.weights().ok_or_else(|| Error::domain("the two-stage variant has no weighted cost"))?;
        let (phi, theta) = self.split_params(params)?;
        let energies = self.input_energies(&self.hamiltonian, Some(phi), theta)?;
        Ok(weights.iter().zip(&energies).map(|(w, e)| w * e).sum())
    }

    /// `w <input_k|..|input_k> + sum_{j<k} <input_j|..|input_j>`.
    pub fn cost_weighted_kth(&self, params: &[f64]) -> Result<f64> {
        match self.variant {
            Variant::WeightedKth { .. } => self.cost_weighted(params),
            _ => Err(Error::domain("cost_weighted_kth needs the weighted_kth variant")),
        }
    }

    /// `sum_j w_j <input_j|..|input_j>`.
    pub fn cost_weighted_all(&self, params: &[f64]) -> Result<f64> {
        match self.variant {
            Variant::WeightedAll { .. } => self.cost_weighted(params),
            _ => Err(Error::domain("cost_weighted_all needs the weighted_all variant")),
        }
    }

    /// Levels spanned by the target subspace, widened to whole degenerate
    /// clusters: `0..=k`, or `k..2^n` under reflection.
    fn target_range(&self, oracle: &ExactSpectrum) -> std::ops::Range<usize> {
        if self.variant.reflection() {
            oracle.cluster(self.k).start..oracle.len()
        } else {
            oracle.low_subspace(self.k)
        }
    }

    /// `(1/m) sum_{i,j} |<E_i|U V|input_j>|^2` over the target levels,
    /// projecting onto whole degenerate eigenspaces.
    pub fn subspace_fidelity(&self, phi: Option<&[f64]>, theta: &[f64], oracle: &ExactSpectrum) -> Result<f64> {
        let range = self.target_range(oracle);
        let mut total = 0.0;
        for &idx in &self.input_indices {
            let state = self.ansatz.prepare_state(phi, theta, idx)?;
            total += oracle.projected_weight(range.clone(), &state)?;
        }
        Ok(total / self.input_indices.len() as f64)
    }

    /// `|<E_level|U V|input>|^2`, degeneracy-projected.
    pub fn state_fidelity(
        &self,
        phi: Option<&[f64]>,
        theta: &[f64],
        oracle: &ExactSpectrum,
        input_position: usize,
        level: usize,
    ) -> Result<f64> {
        let idx = *self
            .input_indices
            .get(input_position)
            .ok_or_else(|| Error::domain(format!("no input at position {input_position}")))?;
        oracle.level_fidelity(level, &self.ansatz.prepare_state(phi, theta, idx)?)
    }
}

fn input_count(n_qubits: usize, k: usize, variant: &Variant) -> usize {
    if variant.reflection() {
        (1usize << n_qubits).saturating_sub(k)
    } else {
        k + 1
    }
}

fn energy(observable: &Observable, gates: &[Gate], mut state: Statevector) -> f64 {
    for gate in gates {
        state.apply_unchecked(gate);
    }
    observable.expectation_unchecked(state.amplitudes())
}

/// The optimized circuit `W = U(theta) V(phi)` and its inputs in output
/// order; everything needed to re-prepare the states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizedCircuit {
    pub ansatz: AnsatzSpec,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub inputs: Vec<usize>,
}

impl OptimizedCircuit {
    /// `W |inputs[position]>`.
    pub fn prepare(&self, position: usize) -> Result<Statevector> {
        let idx = self.input(position)?;
        self.ansatz.prepare_state(Some(&self.phi), &self.theta, idx)
    }

    pub fn input(&self, position: usize) -> Result<usize> {
        self.inputs
            .get(position)
            .copied()
            .ok_or_else(|| Error::domain(format!("state index {position} out of range 0..{}", self.inputs.len())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageKind {
    /// Two-stage SSVQE step one, minimizing `L1`.
    Subspace,
    /// Two-stage SSVQE step two, maximizing `L2`.
    Rotation,
    /// Single optimization of a weighted cost.
    Weighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageResult {
    pub kind: StageKind,
    /// Multiplying a trace cost by this gives the stage's cost on `H`
    /// (`L1`, `L2` or the weighted sum); the optimizer always minimizes.
    pub cost_scale: f64,
    /// Labels of the per-iteration trace metrics.
    pub metric_names: Vec<String>,
    pub multistart: Multistart,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub optimizer: OptimizerConfig,
    pub n_starts: usize,
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { optimizer: OptimizerConfig::default(), n_starts: 10, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct SsvqeResult {
    pub variant: Variant,
    pub circuit: OptimizedCircuit,
    /// `<H>` of each output state, in output order.
    pub energies: Vec<f64>,
    /// Oracle level estimated by each entry of `energies`.
    pub levels: Vec<usize>,
    /// Entries the algorithm pins to their level. The others are only
    /// guaranteed to lie in the span of the resolved subspace.
    pub resolved: Vec<bool>,
    pub states: Vec<Statevector>,
    pub stages: Vec<StageResult>,
}

impl SsvqeResult {
    /// Estimate of level `k`.
    pub fn target_energy(&self) -> f64 {
        *self.energies.last().expect("at least one input")
    }

    pub fn converged(&self) -> bool {
        self.stages.iter().all(|s| s.multistart.best().status == Status::Converged)
    }
}

struct StageObjective<'a, C> {
    cost: C,
    mode: GradientMode,
    fd_step: f64,
    metrics: Metrics<'a>,
}

impl<C: Fn(&[f64]) -> f64> Objective for StageObjective<'_, C> {
    fn value(&self, x: &[f64]) -> f64 {
        (self.cost)(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self.mode {
            GradientMode::ParameterShift => parameter_shift_gradient(&self.cost, x),
            GradientMode::CentralDifference => central_difference_gradient(&self.cost, x, self.fd_step),
        }
    }

    fn metrics(&self, x: &[f64]) -> Vec<f64> {
        self.metrics.as_ref().map_or_else(Vec::new, |m| m(x))
    }
}

type Metrics<'a> = Option<Box<dyn Fn(&[f64]) -> Vec<f64> + Sync + 'a>>;

fn stage_objective<'a, C>(cost: C, config: &OptimizerConfig, metrics: Metrics<'a>) -> StageObjective<'a, C> {
    StageObjective { cost, mode: config.gradient_mode, fd_step: config.fd_step, metrics }
}

/// Runs the variant's full protocol. With an oracle, fidelities are recorded
/// in every trace.
pub fn run(problem: &SsvqeProblem, options: &RunOptions, oracle: Option<&ExactSpectrum>) -> Result<SsvqeResult> {
    problem.validate()?;
    options.optimizer.validate()?;
    if let Some(o) = oracle {
        if o.len() != problem.hamiltonian.dim() {
            return Err(Error::domain("oracle spectrum does not match the Hamiltonian dimension"));
        }
    }
    let h = problem.cost_hamiltonian();
    let n = problem.n_qubits();
    let ansatz = &problem.ansatz;
    let (nv, nu) = (ansatz.parameter_count(Block::V), ansatz.parameter_count(Block::U));
    let run_stage = |dim: usize, stream: u64, objective: &(dyn Fn(&[f64]) -> Result<crate::Minimum> + Sync)| {
        multistart(options.n_starts, options.seed, stream, dim, objective)
    };
    let reflect = if problem.variant.reflection() { -1.0 } else { 1.0 };

    let mut stages = Vec::new();
    let (phi, theta, order) = match &problem.variant {
        Variant::TwoStage { .. } => {
            let l1 = |theta: &[f64]| -> f64 {
                let gates = ansatz.circuit(None, theta).expect("length fixed by the optimizer");
                problem
                    .input_indices
                    .iter()
                    .map(|&idx| energy(&h, &gates, Statevector::basis_state(n, idx).expect("validated")))
                    .sum()
            };
            let stage1 = run_stage(nu, 0, &|x0| {
                let metrics = oracle.map(|o| {
                    Box::new(move |t: &[f64]| vec![problem.subspace_fidelity(None, t, o).unwrap_or(f64::NAN)])
                        as Box<dyn Fn(&[f64]) -> Vec<f64> + Sync>
                });
                minimize(&stage_objective(&l1, &options.optimizer, metrics), x0, &options.optimizer)
            })?;
            let theta_star = stage1.best().x.clone();
            stages.push(StageResult {
                kind: StageKind::Subspace,
                cost_scale: reflect,
                metric_names: oracle.map_or_else(Vec::new, |_| vec!["subspace_fidelity".into()]),
                multistart: stage1,
            });

            let s = problem.stage2_input();
            let s_state = Statevector::basis_state(n, problem.input_indices[s])?;
            let neg_l2 = |phi: &[f64]| -> f64 {
                let gates = ansatz.circuit(Some(phi), &theta_star).expect("length fixed by the optimizer");
                -energy(&h, &gates, s_state.clone())
            };
            let theta_ref = &theta_star;
            let stage2 = run_stage(nv, STAGE2_STREAM, &|x0| {
                let metrics = oracle.map(|o| {
                    Box::new(move |p: &[f64]| {
                        vec![problem.state_fidelity(Some(p), theta_ref, o, s, problem.k).unwrap_or(f64::NAN)]
                    }) as Box<dyn Fn(&[f64]) -> Vec<f64> + Sync>
                });
                minimize(&stage_objective(&neg_l2, &options.optimizer, metrics), x0, &options.optimizer)
            })?;
            let phi_star = stage2.best().x.clone();
            stages.push(StageResult {
                kind: StageKind::Rotation,
                cost_scale: -reflect,
                metric_names: oracle.map_or_else(Vec::new, |_| vec![format!("state_fidelity_{}", problem.k)]),
                multistart: stage2,
            });

            let mut order: Vec<usize> = (0..problem.n_inputs()).collect();
            let last = order.len() - 1;
            order.swap(s, last);
            (phi_star, theta_star, order)
        }
        Variant::WeightedKth { .. } | Variant::WeightedAll { .. } => {
            let weights = problem.weights().expect("weighted variant");
            let cost = |params: &[f64]| -> f64 {
                let (phi, theta) = params.split_at(nv);
                let gates = ansatz.circuit(Some(phi), theta).expect("length fixed by the optimizer");
                problem
                    .input_indices
                    .iter()
                    .zip(&weights)
                    .map(|(&idx, w)| w * energy(&h, &gates, Statevector::basis_state(n, idx).expect("validated")))
                    .sum()
            };
            let tracked: Vec<usize> = match problem.variant {
                Variant::WeightedKth { .. } => vec![problem.k],
                _ => (0..=problem.k).collect(),
            };
            let tracked_ref = &tracked;
            let best = run_stage(nv + nu, 0, &|x0| {
                let metrics = oracle.map(|o| {
                    Box::new(move |p: &[f64]| {
                        let (phi, theta) = p.split_at(nv);
                        tracked_ref
                            .iter()
                            .map(|&j| problem.state_fidelity(Some(phi), theta, o, j, j).unwrap_or(f64::NAN))
                            .collect()
                    }) as Box<dyn Fn(&[f64]) -> Vec<f64> + Sync>
                });
                minimize(&stage_objective(&cost, &options.optimizer, metrics), x0, &options.optimizer)
            })?;
            let (phi, theta) = best.best().x.split_at(nv);
            let (phi, theta) = (phi.to_vec(), theta.to_vec());
            stages.push(StageResult {
                kind: StageKind::Weighted,
                cost_scale: 1.0,
                metric_names: oracle
                    .map_or_else(Vec::new, |_| tracked.iter().map(|j| format!("state_fidelity_{j}")).collect()),
                multistart: best,
            });
            (phi, theta, (0..problem.n_inputs()).collect())
        }
    };

    let inputs: Vec<usize> = order.iter().map(|&p| problem.input_indices[p]).collect();
    let levels = problem.levels();
    let circuit = OptimizedCircuit { ansatz: ansatz.clone(), phi, theta, inputs };
    let states = (0..circuit.inputs.len()).map(|p| circuit.prepare(p)).collect::<Result<Vec<_>>>()?;
    let energies = states.iter().map(|s| problem.hamiltonian.expectation(s)).collect::<Result<Vec<_>>>()?;
    let last = energies.len() - 1;
    let resolved =
        (0..energies.len()).map(|j| matches!(problem.variant, Variant::WeightedAll { .. }) || j == last).collect();
    Ok(SsvqeResult { variant: problem.variant.clone(), circuit, energies, levels, resolved, states, stages })
}
