//! Serializable run configuration and report shared by the CLI.
//!
//! A [`RunConfig`] plus a Hamiltonian fixes every random draw of a run: the
//! builtin Ising coefficients come from `hamiltonian.seed` (the master seed
//! when absent) and every optimizer start from the master seed on its own
//! stream.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzSpec, Entangler};
use crate::error::{Error, Result};
use crate::optimizer::OptimizerConfig;
use crate::pauli::{random_transverse_ising, Observable};
use crate::spectrum::{exact_spectrum, ExactSpectrum, MAX_DENSE_QUBITS};
use crate::ssvqe::{self, OptimizedCircuit, RunOptions, SsvqeProblem, StageResult, Variant};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HamiltonianSource {
    /// Random fully connected transverse-field Ising model.
    BuiltinIsing {
        n_qubits: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Pauli-sum text file.
    File {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_qubits: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantName {
    TwoStage,
    WeightedKth,
    WeightedAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OracleMode {
    On,
    Off,
    /// On whenever the register is small enough to diagonalize.
    #[default]
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct AnsatzConfig {
    /// Default 2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d1: Option<usize>,
    /// Default 8 for `weighted_all`, 6 otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d2: Option<usize>,
    pub entangler: Entangler,
    /// Default: the trailing qubits needed to span the inputs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subspace_qubits: Option<Vec<usize>>,
}

/// Everything a run needs. Optional fields are filled by [`RunConfig::resolved`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub hamiltonian: HamiltonianSource,
    pub variant: VariantName,
    pub k: usize,
    /// `weighted_kth` only; default 0.5.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_w: Option<f64>,
    /// `weighted_all` only; default `(k+1, k, ..., 1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    /// `two_stage` only; default `k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default)]
    pub reflection: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_indices: Option<Vec<usize>>,
    #[serde(default)]
    pub ansatz: AnsatzConfig,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default = "default_starts")]
    pub n_starts: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub oracle: OracleMode,
}

fn default_starts() -> usize {
    10
}

impl RunConfig {
    pub fn new(hamiltonian: HamiltonianSource, variant: VariantName, k: usize) -> Self {
        Self {
            hamiltonian,
            variant,
            k,
            weight_w: None,
            weights: None,
            s: None,
            reflection: false,
            input_indices: None,
            ansatz: AnsatzConfig::default(),
            optimizer: OptimizerConfig::default(),
            n_starts: default_starts(),
            seed: 0,
            oracle: OracleMode::Auto,
        }
    }

    /// Register size implied by the source, when it is known without I/O.
    pub fn declared_qubits(&self) -> Option<usize> {
        match &self.hamiltonian {
            HamiltonianSource::BuiltinIsing { n_qubits, .. } => Some(*n_qubits),
            HamiltonianSource::File { n_qubits, .. } => *n_qubits,
        }
    }

    /// Builds the builtin Hamiltonian; `None` for file sources.
    pub fn builtin_hamiltonian(&self) -> Option<Result<Observable>> {
        match self.hamiltonian {
            HamiltonianSource::BuiltinIsing { n_qubits, seed } => {
                Some(random_transverse_ising(n_qubits, seed.unwrap_or(self.seed)))
            }
            HamiltonianSource::File { .. } => None,
        }
    }

    /// The config with every default written out, for a Hamiltonian on
    /// `n_qubits` qubits. All problems found are reported together.
    pub fn resolved(&self, n_qubits: usize) -> Result<RunConfig> {
        let (out, problems) = self.resolve(n_qubits);
        if problems.is_empty() {
            Ok(out)
        } else {
            Err(Error::Validation(problems))
        }
    }

    fn resolve(&self, n_qubits: usize) -> (RunConfig, Vec<String>) {
        let mut problems = Vec::new();
        let mut out = self.clone();
        let k = self.k;
        if let HamiltonianSource::BuiltinIsing { n_qubits: 0, .. } = self.hamiltonian {
            problems.push("builtin-ising needs n_qubits >= 1".to_string());
        }
        if let HamiltonianSource::BuiltinIsing { seed, .. } = &mut out.hamiltonian {
            seed.get_or_insert(self.seed);
        }
        if self.n_starts == 0 {
            problems.push("n_starts must be at least 1".into());
        }
        if let Err(Error::Validation(p)) = self.optimizer.validate() {
            problems.extend(p);
        }
        if self.oracle == OracleMode::On && n_qubits > MAX_DENSE_QUBITS {
            problems.push(format!("oracle requested for {n_qubits} qubits; the limit is {MAX_DENSE_QUBITS}"));
        }
        let name = |v: VariantName| match v {
            VariantName::TwoStage => "two_stage",
            VariantName::WeightedKth => "weighted_kth",
            VariantName::WeightedAll => "weighted_all",
        };
        let mut only = |present: bool, field: &str, variant: VariantName| {
            if present && self.variant != variant {
                problems.push(format!("`{field}` only applies to the {} variant", name(variant)));
            }
        };
        only(self.weight_w.is_some(), "weight_w", VariantName::WeightedKth);
        only(self.weights.is_some(), "weights", VariantName::WeightedAll);
        only(self.s.is_some(), "s", VariantName::TwoStage);
        only(self.reflection, "reflection", VariantName::TwoStage);
        match self.variant {
            VariantName::WeightedKth => {
                out.weight_w.get_or_insert(0.5);
            }
            VariantName::WeightedAll => {
                out.weights.get_or_insert_with(|| (1..=k + 1).rev().map(|w| w as f64).collect());
            }
            VariantName::TwoStage => {}
        }
        let variant = out.variant_spec();
        if let Variant::TwoStage { s, .. } = &variant {
            let count = if self.reflection { (1usize << n_qubits.min(63)).saturating_sub(k) } else { k + 1 };
            out.s = Some(s.unwrap_or(count.saturating_sub(1)));
        }
        let count = match variant {
            Variant::TwoStage { reflection: true, .. } => (1usize << n_qubits.min(63)).saturating_sub(k),
            _ => k + 1,
        };
        out.input_indices.get_or_insert_with(|| (0..count).collect());
        let a = &mut out.ansatz;
        a.d1.get_or_insert(2);
        a.d2.get_or_insert(if self.variant == VariantName::WeightedAll { 8 } else { 6 });
        a.subspace_qubits.get_or_insert_with(|| AnsatzSpec::default_subspace_qubits(n_qubits, count));
        (out, problems)
    }

    fn variant_spec(&self) -> Variant {
        match self.variant {
            VariantName::TwoStage => Variant::TwoStage { s: self.s, reflection: self.reflection },
            VariantName::WeightedKth => Variant::WeightedKth { w: self.weight_w.unwrap_or(0.5) },
            VariantName::WeightedAll => Variant::WeightedAll {
                weights: self.weights.clone().unwrap_or_else(|| (1..=self.k + 1).rev().map(|w| w as f64).collect()),
            },
        }
    }

    /// Resolves defaults and validates the full problem before any compute.
    pub fn build_problem(&self, hamiltonian: Observable) -> Result<(RunConfig, SsvqeProblem)> {
        let n = hamiltonian.n_qubits();
        let mut problems = Vec::new();
        if let Some(declared) = self.declared_qubits() {
            if declared != n {
                problems.push(format!("config declares {declared} qubits, the Hamiltonian has {n}"));
            }
        }
        let (resolved, mut p) = self.resolve(n);
        problems.append(&mut p);
        let a = &resolved.ansatz;
        let problem = SsvqeProblem {
            hamiltonian,
            k: resolved.k,
            input_indices: resolved.input_indices.clone().expect("resolved"),
            ansatz: AnsatzSpec {
                n_qubits: n,
                subspace_qubits: a.subspace_qubits.clone().expect("resolved"),
                d1: a.d1.expect("resolved"),
                d2: a.d2.expect("resolved"),
                entangler: a.entangler,
            },
            variant: resolved.variant_spec(),
        };
        if let Err(Error::Validation(p)) = problem.validate() {
            problems.extend(p);
        }
        if problems.is_empty() {
            Ok((resolved, problem))
        } else {
            Err(Error::Validation(problems))
        }
    }

    pub fn use_oracle(&self, n_qubits: usize) -> bool {
        match self.oracle {
            OracleMode::On => true,
            OracleMode::Off => false,
            OracleMode::Auto => n_qubits <= MAX_DENSE_QUBITS,
        }
    }
}

/// One output state of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelEstimate {
    /// Basis index fed to the circuit.
    pub input_index: usize,
    /// Oracle level this entry estimates.
    pub level: usize,
    pub energy: f64,
    /// `false` when the algorithm only guarantees the state lies in the
    /// resolved subspace.
    pub resolved: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    /// Effective configuration, defaults included.
    pub config: RunConfig,
    pub variant: Variant,
    pub hamiltonian: Observable,
    /// Ascending oracle eigenvalues, when the oracle ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_eigenvalues: Option<Vec<f64>>,
    pub estimates: Vec<LevelEstimate>,
    /// Largest `|energy - exact|` over resolved estimates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_abs_error: Option<f64>,
    /// Subspace fidelity of the final circuit over all output states.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace_fidelity: Option<f64>,
    pub circuit: OptimizedCircuit,
    pub stages: Vec<StageResult>,
    pub converged: bool,
    pub wall_clock_seconds: f64,
}

impl RunReport {
    /// Estimate of level `k`.
    pub fn target_energy(&self) -> f64 {
        self.estimates.last().expect("at least one estimate").energy
    }

    pub fn energies(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| e.energy).collect()
    }

    /// One row per recorded iteration of every start of every stage.
    ///
    /// `objective` is the minimized quantity and `cost` the same value mapped
    /// back to the cost on the Hamiltonian. Metric columns are the union of
    /// the stages' metric names and are empty where a stage lacks one.
    pub fn trace_table(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let mut metrics: Vec<&str> = Vec::new();
        for stage in &self.stages {
            for name in &stage.metric_names {
                if !metrics.contains(&name.as_str()) {
                    metrics.push(name);
                }
            }
        }
        let mut header: Vec<String> =
            ["stage", "start_id", "iteration", "objective", "cost", "gradient_norm", "event"].map(String::from).into();
        header.extend(metrics.iter().map(|m| m.to_string()));

        let mut rows = Vec::new();
        for (stage_id, stage) in self.stages.iter().enumerate() {
            for outcome in &stage.multistart.starts {
                let Ok(min) = &outcome.result else { continue };
                for rec in &min.trace.records {
                    let mut row = vec![
                        stage_id.to_string(),
                        outcome.start.to_string(),
                        rec.iteration.to_string(),
                        format!("{:?}", rec.cost),
                        format!("{:?}", rec.cost * stage.cost_scale),
                        format!("{:?}", rec.gradient_norm),
                        rec.event.map(|e| format!("{e:?}")).unwrap_or_default(),
                    ];
                    for m in &metrics {
                        let value = stage.metric_names.iter().position(|n| n == m).and_then(|i| rec.metrics.get(i));
                        row.push(value.map(|v| format!("{v:?}")).unwrap_or_default());
                    }
                    rows.push(row);
                }
            }
        }
        (header, rows)
    }
}

/// Validates `config` against `hamiltonian`, runs it, and assembles the report.
pub fn execute(config: &RunConfig, hamiltonian: Observable) -> Result<RunReport> {
    let (resolved, problem) = config.build_problem(hamiltonian)?;
    let started = Instant::now();
    let oracle: Option<ExactSpectrum> =
        if resolved.use_oracle(problem.n_qubits()) { Some(exact_spectrum(&problem.hamiltonian)?) } else { None };
    let options =
        RunOptions { optimizer: resolved.optimizer.clone(), n_starts: resolved.n_starts, seed: resolved.seed };
    let result = ssvqe::run(&problem, &options, oracle.as_ref())?;

    let mut estimates = Vec::with_capacity(result.energies.len());
    for (pos, (&energy, &level)) in result.energies.iter().zip(&result.levels).enumerate() {
        let (exact, fidelity) = match &oracle {
            Some(o) => (Some(o.eigenvalues()[level]), Some(o.level_fidelity(level, &result.states[pos])?)),
            None => (None, None),
        };
        estimates.push(LevelEstimate {
            input_index: result.circuit.inputs[pos],
            level,
            energy,
            resolved: result.resolved[pos],
            exact,
            fidelity,
        });
    }
    let max_abs_error = oracle.as_ref().map(|_| {
        estimates
            .iter()
            .filter(|e| e.resolved)
            .filter_map(|e| e.exact.map(|x| (e.energy - x).abs()))
            .fold(0.0, f64::max)
    });
    let subspace_fidelity = match &oracle {
        Some(o) => {
            let c = &result.circuit;
            Some(problem.subspace_fidelity(Some(&c.phi), &c.theta, o)?)
        }
        None => None,
    };

    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        converged: result.converged(),
        config: resolved,
        variant: result.variant,
        exact_eigenvalues: oracle.map(|o| o.eigenvalues().to_vec()),
        hamiltonian: problem.hamiltonian,
        estimates,
        max_abs_error,
        subspace_fidelity,
        circuit: result.circuit,
        stages: result.stages,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}
