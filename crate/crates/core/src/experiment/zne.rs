use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzSpec;
use crate::error::{Error, Result};
use crate::exec::{derive_seed, map_indexed};
use crate::noise::{zne_extrapolate, NoiseModel, NoisyDistributions, ZneFit, ZneMode};
use crate::problems::{self, build_hamiltonian, Problem};

use super::config::{ExperimentConfig, ZneConfig};
use super::run::{write_json_file, Optimum};

/// Mean sampled energy at one relaxation time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct T1Point {
    pub t1_us: f64,
    pub mean_energy: f64,
    /// Spread of single estimates across repetitions.
    pub std_energy: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZneReport {
    pub problem: Problem,
    pub ansatz: AnsatzSpec,
    pub theta: Vec<f64>,
    pub e0: f64,
    pub e1: f64,
    /// `ε` of the noiseless energy at `theta`.
    pub epsilon_noiseless: f64,
    pub shots: u64,
    pub repetitions: usize,
    pub mode: ZneMode,
    pub validity_floor_us: f64,
    pub points: Vec<T1Point>,
    pub fit: ZneFit,
    pub epsilon_extrapolated: f64,
    /// Smallest `ε` among the raw grid points.
    pub epsilon_best_point: f64,
}

/// Protocol parameters of a `T1` sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ZneSweep {
    pub t1_us: Vec<f64>,
    pub shots: u64,
    pub repetitions: usize,
    pub mode: ZneMode,
    pub validity_floor_us: f64,
    /// Model whose `T1` (and `T2` in proportion) is swept.
    pub base_model: NoiseModel,
    pub seed: u64,
}

impl ZneSweep {
    pub fn from_config(zne: &ZneConfig, base_model: NoiseModel, seed: u64) -> Self {
        ZneSweep {
            t1_us: zne.t1_us.clone(),
            shots: zne.shots,
            repetitions: zne.repetitions,
            mode: zne.mode,
            validity_floor_us: zne.validity_floor_us,
            base_model,
            seed,
        }
    }
}

/// Evaluates the circuit at each `T1` of the sweep and extrapolates to `1/T1 → 0`.
pub fn zne_sweep(
    problem: &Problem,
    ansatz: &AnsatzSpec,
    theta: &[f64],
    sweep: &ZneSweep,
) -> Result<ZneReport> {
    if sweep.shots == 0 {
        return Err(Error::ZeroShots);
    }
    if sweep.repetitions == 0 {
        return Err(Error::InvalidArgument("repetitions must be at least 1".into()));
    }
    let n = ansatz.n_qubits;
    let h = build_hamiltonian(problem, n)?;
    let reference = problems::reference_solve(problem, n)?;
    let gap = reference.gap();
    let circuit = ansatz.build(theta)?;
    let state = crate::qsim::run_circuit(&circuit, &crate::qsim::QuantumState::zero(n)?)?;
    let noiseless = problems::exact_energy(&state, &h)?.value;

    let points = map_indexed(sweep.t1_us.len(), |i| -> Result<T1Point> {
        let t1_us = sweep.t1_us[i];
        let model = sweep.base_model.with_t1(t1_us / 1e6);
        let dist = NoisyDistributions::compute(&circuit, &model)?;
        let mut energies = Vec::with_capacity(sweep.repetitions);
        for rep in 0..sweep.repetitions {
            let seed = derive_seed(sweep.seed, &[i as u64, rep as u64]);
            energies.push(dist.sampled_energy(&h, sweep.shots, seed)?.value);
        }
        let count = energies.len() as f64;
        let mean = energies.iter().sum::<f64>() / count;
        let var = if energies.len() > 1 {
            energies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (count - 1.0)
        } else {
            0.0
        };
        Ok(T1Point {
            t1_us,
            mean_energy: mean,
            std_energy: var.sqrt(),
            epsilon: ((mean - reference.e0) / gap).abs(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.t1_us, p.mean_energy)).collect();
    let fit = zne_extrapolate(&pairs, sweep.mode, sweep.validity_floor_us)?;
    Ok(ZneReport {
        problem: *problem,
        ansatz: *ansatz,
        theta: theta.to_vec(),
        e0: reference.e0,
        e1: reference.e1,
        epsilon_noiseless: ((noiseless - reference.e0) / gap).abs(),
        shots: sweep.shots,
        repetitions: sweep.repetitions,
        mode: sweep.mode,
        validity_floor_us: sweep.validity_floor_us,
        epsilon_extrapolated: ((fit.e0 - reference.e0) / gap).abs(),
        epsilon_best_point: points.iter().map(|p| p.epsilon).fold(f64::INFINITY, f64::min),
        points,
        fit,
    })
}

/// Where the optimal parameters come from, in priority order: `zne.theta` (with the first
/// ansatz of the config), `zne.optimum`, then `<output>/optimum.json`.
fn resolve_parameters(config: &ExperimentConfig, zne: &ZneConfig) -> Result<(AnsatzSpec, Vec<f64>)> {
    if let Some(theta) = &zne.theta {
        let ansatz = config.cells()?[0].ansatz;
        if theta.len() != ansatz.parameter_count() {
            return Err(Error::config(
                "zne.theta",
                format!(
                    "{} values for {} parameters of {ansatz}",
                    theta.len(),
                    ansatz.parameter_count()
                ),
            ));
        }
        return Ok((ansatz, theta.clone()));
    }
    let path: PathBuf = zne
        .optimum
        .clone()
        .unwrap_or_else(|| config.output.join("optimum.json"));
    let text = fs::read_to_string(&path).map_err(|e| {
        Error::config(
            "zne.optimum",
            format!(
                "missing optimal parameters at {} ({e}); run solve first or set zne.theta",
                path.display()
            ),
        )
    })?;
    let optimum: Optimum = serde_json::from_str(&text)
        .map_err(|e| Error::config("zne.optimum", format!("{}: {e}", path.display())))?;
    if optimum.problem != config.problem {
        return Err(Error::config(
            "zne.optimum",
            format!("{} was produced for {}", path.display(), optimum.problem.name()),
        ));
    }
    Ok((optimum.ansatz, optimum.theta))
}

/// Runs the configured `T1` sweep and writes `zne.csv` and `zne.json`.
pub fn cmd_noise(config: &ExperimentConfig) -> Result<ZneReport> {
    config.validate()?;
    let zne = config
        .zne
        .as_ref()
        .ok_or_else(|| Error::config("zne", "missing [zne] block"))?;
    let (ansatz, theta) = resolve_parameters(config, zne)?;
    let base = config
        .noise_model()?
        .unwrap_or_else(|| NoiseModel::thermal(100e-6));
    let sweep = ZneSweep::from_config(zne, base, config.base_seed);
    let report = zne_sweep(&config.problem, &ansatz, &theta, &sweep)?;

    fs::create_dir_all(&config.output)?;
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(config.output.join("zne.csv"))?));
    w.write_record(["t1_us", "mean_energy", "std_energy", "epsilon"])?;
    for p in &report.points {
        w.write_record([
            p.t1_us.to_string(),
            p.mean_energy.to_string(),
            p.std_energy.to_string(),
            p.epsilon.to_string(),
        ])?;
    }
    w.flush()?;
    write_json_file(&config.output.join("zne.json"), &report)?;
    Ok(report)
}
