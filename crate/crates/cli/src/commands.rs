use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use ssvqe::experiment::{execute, RunReport};
use ssvqe::{
    direct_matrix_element, exact_spectrum, random_transverse_ising, serialize_observable, transition_amplitude,
    OptimizedCircuit, TransitionEstimate, TransitionRequest, C64,
};

use crate::args::{Command, Common, Format, RunArgs};
use crate::config::{build_config, file_source, into_config, load_hamiltonian, merged_value, read_observable};
use crate::failure::{Failure, Outcome};
use crate::output::{csv, emit, json, num};

/// Whether every optimization converged.
pub type Converged = bool;

pub fn dispatch(command: &Command, common: &Common) -> Outcome<Converged> {
    match command {
        Command::Generate { n_qubits } => generate(*n_qubits, common),
        Command::Exact { hamiltonian, n_qubits } => exact(hamiltonian, *n_qubits, common),
        Command::Run { run, trace_out } => run_cmd(run, trace_out.as_deref(), common),
        Command::Transition { operator, i, j, report, run } => {
            transition(operator, *i, *j, report.as_deref(), run, common)
        }
        Command::Sweep { files, run } => sweep(files, run, common),
    }
}

fn generate(n_qubits: usize, common: &Common) -> Outcome<Converged> {
    let h = random_transverse_ising(n_qubits, common.seed.unwrap_or(0))?;
    emit(common.out.as_deref(), &serialize_observable(&h))?;
    Ok(true)
}

#[derive(Serialize)]
struct SpectrumReport {
    n_qubits: usize,
    eigenvalues: Vec<f64>,
}

fn exact(path: &Path, n_qubits: Option<usize>, common: &Common) -> Outcome<Converged> {
    let h = read_observable(path, n_qubits)?;
    let spectrum = exact_spectrum(&h)?;
    let report = SpectrumReport { n_qubits: h.n_qubits(), eigenvalues: spectrum.eigenvalues().to_vec() };
    let text = match common.format {
        Format::Report => json(&report),
        Format::Table => {
            let rows: Vec<Vec<String>> =
                report.eigenvalues.iter().enumerate().map(|(l, e)| vec![l.to_string(), num(*e)]).collect();
            csv(&["level".into(), "eigenvalue".into()], &rows)
        }
    };
    emit(common.out.as_deref(), &text)?;
    Ok(true)
}

fn summarize(report: &RunReport) {
    for e in &report.estimates {
        let exact = e.exact.map(|x| format!("  exact {x:.9}")).unwrap_or_default();
        let mixed = if e.resolved { "" } else { "  (subspace-mixed)" };
        eprintln!("level {:>3}  input {:>3}  energy {:.9}{exact}{mixed}", e.level, e.input_index, e.energy);
    }
    if let Some(err) = report.max_abs_error {
        eprintln!("max |error| over resolved levels: {err:.3e}");
    }
}

fn run_cmd(run: &RunArgs, trace_out: Option<&Path>, common: &Common) -> Outcome<Converged> {
    let config = build_config(run, common)?;
    let h = load_hamiltonian(&config)?;
    let report = execute(&config, h)?;
    summarize(&report);
    let table = || {
        let (header, rows) = report.trace_table();
        csv(&header, &rows)
    };
    let text = match common.format {
        Format::Report => json(&report),
        Format::Table => table(),
    };
    emit(common.out.as_deref(), &text)?;
    if let Some(path) = trace_out {
        emit(Some(path), &table())?;
    }
    Ok(report.converged)
}

#[derive(Serialize)]
struct TransitionReport {
    operator: PathBuf,
    i: usize,
    j: usize,
    input_i: usize,
    input_j: usize,
    level_i: usize,
    level_j: usize,
    estimate: TransitionEstimate,
    direct: C64,
    difference: f64,
}

fn transition(
    operator: &Path,
    i: usize,
    j: usize,
    report_path: Option<&Path>,
    run: &RunArgs,
    common: &Common,
) -> Outcome<Converged> {
    let report: RunReport = match report_path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::validation(format!("{}: not a run report: {e}", path.display())))?
        }
        None => {
            let config = build_config(run, common)?;
            let h = load_hamiltonian(&config)?;
            let report = execute(&config, h)?;
            summarize(&report);
            report
        }
    };
    let circuit: &OptimizedCircuit = &report.circuit;
    let a = read_observable(operator, Some(circuit.ansatz.n_qubits))?;
    let request = TransitionRequest { operator: &a, circuit, i, j };
    let estimate = transition_amplitude(&request)?;
    let direct = direct_matrix_element(&request)?;
    let out = TransitionReport {
        operator: operator.to_path_buf(),
        i,
        j,
        input_i: circuit.inputs[i],
        input_j: circuit.inputs[j],
        level_i: report.estimates[i].level,
        level_j: report.estimates[j].level,
        difference: (estimate.value - direct).norm(),
        estimate,
        direct,
    };
    let text = match common.format {
        Format::Report => json(&out),
        Format::Table => {
            let header = ["i", "j", "re", "im", "direct_re", "direct_im", "difference"].map(String::from);
            let row = [i, j]
                .map(|v| v.to_string())
                .into_iter()
                .chain([estimate.value.re, estimate.value.im, direct.re, direct.im, out.difference].map(num));
            csv(&header, &[row.collect()])
        }
    };
    emit(common.out.as_deref(), &text)?;
    Ok(report.converged)
}

#[derive(Serialize)]
struct SweepRow {
    label: String,
    file: PathBuf,
    status: &'static str,
    /// `(level, energy)` per output state.
    energies: Vec<(usize, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_abs_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn labels(files: &[PathBuf]) -> Vec<String> {
    let stems: Vec<String> =
        files.iter().map(|f| f.file_stem().map_or_else(|| "input".into(), |s| s.to_string_lossy().into())).collect();
    stems
        .iter()
        .enumerate()
        .map(|(idx, s)| if stems.iter().filter(|t| *t == s).count() > 1 { format!("{s}-{idx}") } else { s.clone() })
        .collect()
}

fn sweep(files: &[PathBuf], run: &RunArgs, common: &Common) -> Outcome<Converged> {
    let template = merged_value(run, common)?;
    let labels = labels(files);
    if let Some(dir) = &common.out {
        std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    }

    let prepared: Vec<Outcome<_>> = files
        .iter()
        .map(|file| {
            let mut value = template.clone();
            value.as_object_mut().expect("object").insert("hamiltonian".into(), file_source(file));
            let config = into_config(value)?;
            let h = load_hamiltonian(&config)?;
            Ok((config, h))
        })
        .collect();
    let width = prepared.iter().find_map(|p| p.as_ref().ok().map(|(_, h)| h.n_qubits()));

    let results: Vec<Outcome<RunReport>> = prepared
        .into_par_iter()
        .map(|p| {
            let (config, h) = p?;
            if Some(h.n_qubits()) != width {
                return Err(Failure::validation(format!(
                    "{} qubits, other files have {}",
                    h.n_qubits(),
                    width.unwrap_or_default()
                )));
            }
            Ok(execute(&config, h)?)
        })
        .collect();

    let mut rows = Vec::with_capacity(files.len());
    let mut first_failure = None;
    let mut converged = true;
    for ((file, label), result) in files.iter().zip(&labels).zip(results) {
        let row = match result {
            Ok(report) => {
                if let Some(dir) = &common.out {
                    let path = dir.join(format!("{label}.json"));
                    emit(Some(&path), &json(&report))?;
                }
                converged &= report.converged;
                SweepRow {
                    label: label.clone(),
                    file: file.clone(),
                    status: if report.converged { "converged" } else { "not_converged" },
                    energies: report.estimates.iter().map(|e| (e.level, e.energy)).collect(),
                    max_abs_error: report.max_abs_error,
                    error: None,
                }
            }
            Err(failure) => {
                eprintln!("{}: {failure}", file.display());
                let row = SweepRow {
                    label: label.clone(),
                    file: file.clone(),
                    status: "failed",
                    energies: Vec::new(),
                    max_abs_error: None,
                    error: Some(failure.to_string()),
                };
                first_failure.get_or_insert(failure);
                row
            }
        };
        rows.push(row);
    }

    let text = match common.format {
        Format::Report => json(&rows),
        Format::Table => {
            let levels: BTreeSet<usize> = rows.iter().flat_map(|r| r.energies.iter().map(|e| e.0)).collect();
            let mut header = vec!["label".to_string(), "status".into()];
            header.extend(levels.iter().map(|l| format!("energy_{l}")));
            header.extend(["max_abs_error".into(), "error".into()]);
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut line = vec![r.label.clone(), r.status.to_string()];
                    for l in &levels {
                        let e = r.energies.iter().find(|e| e.0 == *l);
                        line.push(e.map(|e| num(e.1)).unwrap_or_default());
                    }
                    line.push(r.max_abs_error.map(num).unwrap_or_default());
                    line.push(r.error.clone().unwrap_or_default());
                    line
                })
                .collect();
            csv(&header, &table)
        }
    };
    let summary = common.out.as_ref().map(|dir| {
        dir.join(match common.format {
            Format::Report => "summary.json",
            Format::Table => "summary.csv",
        })
    });
    emit(summary.as_deref(), &text)?;
    match first_failure {
        Some(f) => Err(f),
        None => Ok(converged),
    }
}
