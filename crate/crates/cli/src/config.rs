//! Run configuration: a TOML or JSON file with command-line overrides.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use ssvqe::experiment::{HamiltonianSource, RunConfig};
use ssvqe::{parse_observable, parse_observable_with_qubits, Observable};

use crate::args::{Common, EntanglerFlag, GradientFlag, OracleFlag, RunArgs, VariantFlag};
use crate::failure::{Failure, Outcome};

/// The config file (if any) merged with flag overrides, before typing.
pub fn merged_value(run: &RunArgs, common: &Common) -> Outcome<Value> {
    let mut value = match &run.config {
        Some(path) => load_file(path)?,
        None => Value::Object(Map::new()),
    };
    apply_overrides(&mut value, run, common);
    Ok(value)
}

pub fn into_config(value: Value) -> Outcome<RunConfig> {
    serde_json::from_value(value).map_err(|e| Failure::validation(format!("invalid configuration: {e}")))
}

pub fn build_config(run: &RunArgs, common: &Common) -> Outcome<RunConfig> {
    into_config(merged_value(run, common)?)
}

fn load_file(path: &Path) -> Outcome<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let mut value: Value = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?
    } else {
        toml::from_str(&text).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?
    };
    if !value.is_object() {
        return Err(Failure::validation(format!("{}: expected a table of settings", path.display())));
    }
    // Hamiltonian paths are relative to the config file.
    if let Some(Value::String(p)) = value.pointer_mut("/hamiltonian/path") {
        let dir = path.parent().unwrap_or(Path::new(""));
        if Path::new(p.as_str()).is_relative() {
            *p = dir.join(&*p).to_string_lossy().into_owned();
        }
    }
    Ok(value)
}

fn set(value: &mut Value, path: &[&str], new: Value) {
    let mut cur = value;
    for key in &path[..path.len() - 1] {
        let map = cur.as_object_mut().expect("object");
        let entry = map.entry(*key).or_insert_with(|| Value::Object(Map::new()));
        if !entry.is_object() {
            *entry = Value::Object(Map::new());
        }
        cur = entry;
    }
    cur.as_object_mut().expect("object").insert(path[path.len() - 1].to_string(), new);
}

fn apply_overrides(value: &mut Value, run: &RunArgs, common: &Common) {
    if let Some(path) = &run.hamiltonian {
        set(value, &["hamiltonian"], json!({ "source": "file", "path": path }));
    }
    if let Some(n) = run.ising {
        set(value, &["hamiltonian"], json!({ "source": "builtin-ising", "n_qubits": n }));
    }
    if let Some(seed) = run.ising_seed {
        set(value, &["hamiltonian", "seed"], json!(seed));
    }
    if let Some(v) = run.variant {
        let name = match v {
            VariantFlag::TwoStage => "two_stage",
            VariantFlag::WeightedKth => "weighted_kth",
            VariantFlag::WeightedAll => "weighted_all",
        };
        set(value, &["variant"], json!(name));
    }
    let scalars: [(&str, Option<Value>); 6] = [
        ("k", run.k.map(Value::from)),
        ("weight_w", run.w.map(Value::from)),
        ("weights", run.weights.clone().map(Value::from)),
        ("s", run.s.map(Value::from)),
        ("input_indices", run.inputs.clone().map(Value::from)),
        ("n_starts", run.starts.map(Value::from)),
    ];
    for (key, v) in scalars {
        if let Some(v) = v {
            set(value, &[key], v);
        }
    }
    if run.reflection {
        set(value, &["reflection"], json!(true));
    }
    if let Some(d1) = run.d1 {
        set(value, &["ansatz", "d1"], json!(d1));
    }
    if let Some(d2) = run.d2 {
        set(value, &["ansatz", "d2"], json!(d2));
    }
    if let Some(e) = run.entangler {
        let name = match e {
            EntanglerFlag::Chain => "chain",
            EntanglerFlag::AllToAll => "all_to_all",
        };
        set(value, &["ansatz", "entangler"], json!(name));
    }
    if let Some(q) = &run.subspace_qubits {
        set(value, &["ansatz", "subspace_qubits"], json!(q));
    }
    if let Some(m) = run.max_iterations {
        set(value, &["optimizer", "max_iterations"], json!(m));
    }
    if let Some(t) = run.gradient_tolerance {
        set(value, &["optimizer", "gradient_tolerance"], json!(t));
    }
    if let Some(g) = run.gradient {
        let name = match g {
            GradientFlag::ParameterShift => "parameter_shift",
            GradientFlag::CentralDifference => "central_difference",
        };
        set(value, &["optimizer", "gradient_mode"], json!(name));
    }
    if let Some(seed) = common.seed {
        set(value, &["seed"], json!(seed));
    }
    if let Some(o) = common.oracle {
        let name = match o {
            OracleFlag::On => "on",
            OracleFlag::Off => "off",
            OracleFlag::Auto => "auto",
        };
        set(value, &["oracle"], json!(name));
    }
}

pub fn read_observable(path: &Path, n_qubits: Option<usize>) -> Outcome<Observable> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let parsed = match n_qubits {
        Some(n) => parse_observable_with_qubits(&text, n),
        None => parse_observable(&text),
    };
    parsed.map_err(|e| Failure::validation(format!("{}: {e}", path.display())))
}

pub fn load_hamiltonian(config: &RunConfig) -> Outcome<Observable> {
    match &config.hamiltonian {
        HamiltonianSource::File { path, n_qubits } => read_observable(path, *n_qubits),
        HamiltonianSource::BuiltinIsing { .. } => {
            let built = config.builtin_hamiltonian().expect("builtin source");
            built.map_err(|e| Failure::validation(format!("invalid configuration:\n  - {e}")))
        }
    }
}

pub fn file_source(path: &Path) -> Value {
    json!({ "source": "file", "path": PathBuf::from(path) })
}
