use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzSpec;
use crate::error::{Error, Result};
use crate::exec::{derive_seed, map_indexed};
use crate::metrics::{aggregate, Aggregate, ContinuousReference, MeritReport};
use crate::noise::NoiseModel;
use crate::optimize::{minimize, Objective, Trajectory, VariationalEnergy};
use crate::problems::{self, build_hamiltonian, Hamiltonian, Problem, ReferenceSolution};

use super::config::{Cell, ExperimentConfig};

/// Outcome of one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub cell: usize,
    pub label: String,
    pub rep: usize,
    pub seed: u64,
    pub iterations: usize,
    pub evaluations: u64,
    /// Lowest noiseless energy seen during the run.
    pub lowest_exact_energy: f64,
    pub merit: Option<MeritReport>,
    pub theta_opt: Vec<f64>,
    pub wall_seconds: f64,
    pub error: Option<String>,
    #[serde(skip)]
    pub trajectory: Option<Trajectory>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestRun {
    pub rep: usize,
    pub energy_exact: f64,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub label: String,
    pub cell: Cell,
    pub runs: usize,
    pub failures: usize,
    pub infidelity_n: Option<Aggregate>,
    pub infidelity_inf: Option<Aggregate>,
    pub epsilon: Option<Aggregate>,
    pub epsilon_exact: Option<Aggregate>,
    pub e0: Option<f64>,
    pub e1: Option<f64>,
    /// Lowest noiseless energy seen in any run of the cell.
    pub lowest_exact_energy: Option<f64>,
    pub best: Option<BestRun>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config_hash: String,
    pub problem: Problem,
    pub repetitions: usize,
    pub cells: Vec<CellSummary>,
}

/// Parameters from the best run of a solve, consumed by the noise command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub problem: Problem,
    pub ansatz: AnsatzSpec,
    pub theta: Vec<f64>,
    pub energy_exact: f64,
}

/// Everything a run needs that depends only on the qubit count.
struct Shared {
    hamiltonian: Hamiltonian,
    reference: ReferenceSolution,
    continuum: ContinuousReference,
}

fn prepare(problem: &Problem, n: usize) -> Result<Shared> {
    Ok(Shared {
        hamiltonian: build_hamiltonian(problem, n)?,
        reference: problems::reference_solve(problem, n)?,
        continuum: ContinuousReference::new(problem, n)?,
    })
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".into())
}

fn run_one(
    cell: &Cell,
    shared: &Shared,
    noise: Option<&NoiseModel>,
    seed: u64,
    keep_trajectory: bool,
) -> Result<(Trajectory, MeritReport, f64, usize)> {
    let mut objective = VariationalEnergy::new(
        cell.ansatz,
        &shared.hamiltonian,
        cell.shots,
        derive_seed(seed, &[1]),
    )?;
    if let Some(model) = noise {
        objective = objective.with_noise(model.clone())?;
    }
    let theta0 = cell
        .optimizer
        .initial_point(objective.dim(), derive_seed(seed, &[0]));
    let mut trajectory = minimize(&mut objective, &theta0, &cell.optimizer, derive_seed(seed, &[2]))?;
    let state = objective.state(&trajectory.theta_opt)?;
    let energy_exact = objective
        .exact(&trajectory.theta_opt)?
        .ok_or_else(|| Error::InvalidArgument("objective has no exact energy".into()))?;
    let merit = MeritReport::evaluate(
        &state,
        trajectory.energy_opt,
        energy_exact,
        &shared.reference,
        &shared.continuum,
    )?;
    let iterations = trajectory.records.len().saturating_sub(1);
    if !keep_trajectory {
        trajectory.records.clear();
    }
    Ok((trajectory, merit, objective.lowest_exact(), iterations))
}

/// Runs every `(cell, repetition)` of the config. Failures are captured per run.
pub fn execute(config: &ExperimentConfig, keep_trajectories: bool) -> Result<(Vec<RunRecord>, Summary)> {
    config.validate()?;
    let cells = config.cells()?;
    let noise = config.noise_model()?;
    let hash = config.hash();

    let mut qubits: Vec<usize> = config.qubits.clone();
    qubits.sort_unstable();
    qubits.dedup();
    let prepared = map_indexed(qubits.len(), |i| {
        panic::catch_unwind(AssertUnwindSafe(|| prepare(&config.problem, qubits[i])))
            .unwrap_or_else(|p| Err(Error::InvalidArgument(panic_message(p))))
            .map_err(|e| e.to_string())
    });
    let shared: BTreeMap<usize, std::result::Result<Shared, String>> =
        qubits.into_iter().zip(prepared).collect();

    let reps = config.repetitions;
    let records = map_indexed(cells.len() * reps, |job| {
        let cell = &cells[job / reps];
        let rep = job % reps;
        let seed = derive_seed(config.base_seed, &[cell.index as u64, rep as u64]);
        let start = Instant::now();
        let outcome = match &shared[&cell.n_qubits] {
            Ok(s) => panic::catch_unwind(AssertUnwindSafe(|| {
                run_one(cell, s, noise.as_ref(), seed, keep_trajectories)
            }))
            .unwrap_or_else(|p| Err(Error::InvalidArgument(panic_message(p))))
            .map_err(|e| e.to_string()),
            Err(msg) => Err(msg.clone()),
        };
        let wall_seconds = start.elapsed().as_secs_f64();
        let mut record = RunRecord {
            config_hash: hash.clone(),
            cell: cell.index,
            label: cell.label(),
            rep,
            seed,
            iterations: 0,
            evaluations: 0,
            lowest_exact_energy: f64::NAN,
            merit: None,
            theta_opt: Vec::new(),
            wall_seconds,
            error: None,
            trajectory: None,
        };
        match outcome {
            Ok((traj, merit, lowest, iterations)) => {
                record.iterations = iterations;
                record.evaluations = traj.evaluations;
                record.lowest_exact_energy = lowest;
                record.merit = Some(merit);
                record.theta_opt = traj.theta_opt.clone();
                if keep_trajectories {
                    record.trajectory = Some(traj);
                }
            }
            Err(msg) => record.error = Some(msg),
        }
        record
    });

    let summaries = cells
        .iter()
        .map(|cell| summarize(cell, &records[cell.index * reps..(cell.index + 1) * reps]))
        .collect();
    let summary = Summary {
        config_hash: hash,
        problem: config.problem,
        repetitions: reps,
        cells: summaries,
    };
    Ok((records, summary))
}

fn summarize(cell: &Cell, runs: &[RunRecord]) -> CellSummary {
    let ok: Vec<&MeritReport> = runs.iter().filter_map(|r| r.merit.as_ref()).collect();
    let agg = |f: fn(&MeritReport) -> f64| -> Option<Aggregate> {
        let v: Vec<f64> = ok.iter().map(|m| f(m)).collect();
        aggregate(&v).ok()
    };
    let best = runs
        .iter()
        .filter_map(|r| r.merit.map(|m| (r, m.energy_exact)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(r, e)| BestRun {
            rep: r.rep,
            energy_exact: e,
            theta: r.theta_opt.clone(),
        });
    let lowest = runs
        .iter()
        .filter(|r| r.error.is_none())
        .map(|r| r.lowest_exact_energy)
        .reduce(f64::min);
    let mut errors: Vec<String> = runs.iter().filter_map(|r| r.error.clone()).collect();
    errors.dedup();
    CellSummary {
        label: cell.label(),
        cell: cell.clone(),
        runs: runs.len(),
        failures: runs.len() - ok.len(),
        infidelity_n: agg(|m| m.infidelity_n),
        infidelity_inf: agg(|m| m.infidelity_inf),
        epsilon: agg(|m| m.epsilon),
        epsilon_exact: agg(|m| m.epsilon_exact),
        e0: ok.first().map(|m| m.e0),
        e1: ok.first().map(|m| m.e1),
        lowest_exact_energy: lowest,
        best,
        errors,
    }
}

pub const RUNS_HEADER: [&str; 23] = [
    "config_hash",
    "problem",
    "n_qubits",
    "ansatz",
    "optimizer",
    "shots",
    "cell",
    "rep",
    "seed",
    "iterations",
    "evaluations",
    "energy_opt",
    "energy_exact",
    "e0",
    "e1",
    "infidelity_n",
    "infidelity_inf",
    "epsilon",
    "epsilon_exact",
    "lowest_exact_energy",
    "status",
    "error",
    "wall_seconds",
];

/// Long-format CSV, one row per run.
pub fn write_runs_csv(path: &Path, problem: &Problem, cells: &[Cell], records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(RUNS_HEADER)?;
    for r in records {
        let cell = &cells[r.cell];
        let m = r.merit;
        let num = |f: fn(&MeritReport) -> f64| m.as_ref().map(|m| f(m).to_string()).unwrap_or_default();
        w.write_record([
            r.config_hash.clone(),
            problem.name().to_string(),
            cell.n_qubits.to_string(),
            cell.ansatz.to_string(),
            cell.optimizer.method.name().to_string(),
            cell.shots.to_string(),
            r.cell.to_string(),
            r.rep.to_string(),
            r.seed.to_string(),
            r.iterations.to_string(),
            r.evaluations.to_string(),
            num(|m| m.energy_opt),
            num(|m| m.energy_exact),
            num(|m| m.e0),
            num(|m| m.e1),
            num(|m| m.infidelity_n),
            num(|m| m.infidelity_inf),
            num(|m| m.epsilon),
            num(|m| m.epsilon_exact),
            if r.error.is_some() {
                String::new()
            } else {
                r.lowest_exact_energy.to_string()
            },
            if r.error.is_some() { "failed" } else { "ok" }.to_string(),
            r.error.clone().unwrap_or_default(),
            format!("{:.3}", r.wall_seconds),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    use std::io::Write;
    writeln!(w)?;
    Ok(())
}

/// Writes `runs.csv`, `summary.json`, `cells/<label>.json` and, when kept,
/// `trajectories/<label>_rep<r>.csv` under the configured output directory.
pub fn write_outputs(config: &ExperimentConfig, records: &[RunRecord], summary: &Summary) -> Result<()> {
    let out = &config.output;
    fs::create_dir_all(out.join("cells"))?;
    let cells: Vec<Cell> = summary.cells.iter().map(|c| c.cell.clone()).collect();
    write_runs_csv(&out.join("runs.csv"), &config.problem, &cells, records)?;
    write_json(&out.join("summary.json"), summary)?;
    for c in &summary.cells {
        write_json(&out.join("cells").join(format!("{}.json", c.label)), c)?;
    }
    if records.iter().any(|r| r.trajectory.is_some()) {
        fs::create_dir_all(out.join("trajectories"))?;
        for r in records {
            if let Some(t) = &r.trajectory {
                let path = out
                    .join("trajectories")
                    .join(format!("{}_rep{}.csv", r.label, r.rep));
                t.write_csv(BufWriter::new(File::create(path)?))?;
            }
        }
    }
    Ok(())
}

/// Single-cell run: every repetition with trajectories, plus `optimum.json` from the best run.
pub fn cmd_solve(config: &ExperimentConfig) -> Result<Summary> {
    config.validate()?;
    for (field, len) in [
        ("qubits", config.qubits.len()),
        ("ansatz", config.ansatz.len()),
        ("optimizer", config.optimizer.len()),
        ("shots", config.shots.len()),
    ] {
        if len != 1 {
            return Err(Error::config(
                field,
                "solve takes a single value; use sweep for lists",
            ));
        }
    }
    let (records, summary) = execute(config, true)?;
    write_outputs(config, &records, &summary)?;
    let cell = &summary.cells[0];
    if let Some(best) = &cell.best {
        let optimum = Optimum {
            problem: config.problem,
            ansatz: cell.cell.ansatz,
            theta: best.theta.clone(),
            energy_exact: best.energy_exact,
        };
        write_json(&config.output.join("optimum.json"), &optimum)?;
    }
    Ok(summary)
}

/// Cartesian sweep; trajectories are written only when the config asks for them.
pub fn cmd_sweep(config: &ExperimentConfig) -> Result<Summary> {
    let (records, summary) = execute(config, config.trajectories)?;
    write_outputs(config, &records, &summary)?;
    Ok(summary)
}

pub(crate) fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_json(path, value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(dir: &Path) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(Problem::harmonic_oscillator(), vec![2]);
        c.repetitions = 2;
        c.base_seed = 3;
        c.shots = vec![1024];
        c.output = dir.to_path_buf();
        c.optimizer_settings = Some(crate::optimize::OptimizerConfig {
            max_iterations: 10,
            ..Default::default()
        });
        c
    }

    #[test]
    fn solve_writes_artifacts_and_is_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(dir.path());
        let s = cmd_solve(&cfg).unwrap();
        assert_eq!(s.cells.len(), 1);
        assert_eq!(s.cells[0].failures, 0);
        for f in [
            "runs.csv",
            "summary.json",
            "optimum.json",
            "cells/n2_zgr_adam_s1024.json",
        ] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        assert!(dir
            .path()
            .join("trajectories/n2_zgr_adam_s1024_rep1.csv")
            .exists());

        let strip = |text: String| -> Vec<String> {
            text.lines()
                .map(|l| l.rsplit_once(',').map(|(a, _)| a.to_string()).unwrap_or_default())
                .collect()
        };
        let first = strip(fs::read_to_string(dir.path().join("runs.csv")).unwrap());
        cmd_solve(&cfg).unwrap();
        let second = strip(fs::read_to_string(dir.path().join("runs.csv")).unwrap());
        assert_eq!(first, second);
    }

    #[test]
    fn solve_rejects_lists() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(dir.path());
        cfg.qubits = vec![2, 3];
        assert!(matches!(cmd_solve(&cfg), Err(Error::Config { field, .. }) if field == "qubits"));
    }

    #[test]
    fn noisy_cells_and_failure_accounting() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(dir.path());
        cfg.qubits = vec![2, 3];
        cfg.noise = Some(super::super::config::NoiseConfig {
            preset: "thermal".into(),
            t1_us: Some(50.0),
            t2_us: None,
            readout_flip: None,
            single_qubit_ns: None,
            two_qubit_ns: None,
            depolarizing_1q: None,
            depolarizing_2q: None,
        });
        let (records, summary) = execute(&cfg, false).unwrap();
        assert_eq!(records.len(), 4);
        assert!(summary.cells.iter().all(|c| c.failures == 0));

        // A failed run is counted and reported without hiding its siblings.
        let mut broken = records[..2].to_vec();
        broken[0].merit = None;
        broken[0].error = Some("boom".into());
        let cell = &summary.cells[0].cell;
        let s = summarize(cell, &broken);
        assert_eq!((s.runs, s.failures), (2, 1));
        assert_eq!(s.errors, vec!["boom".to_string()]);
        assert_eq!(s.infidelity_inf.unwrap().count, 1);
    }
}
