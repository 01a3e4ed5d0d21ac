//! Noisy execution: thermal relaxation, depolarizing gate error and readout error on dense
//! density matrices, plus zero-noise extrapolation.

mod density;
mod zne;

pub use density::{DensityState, MAX_DENSITY_QUBITS};
pub use zne::{zne_extrapolate, ZneFit, ZneMode, MAX_DEGREE};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{self, EnergyEstimate, Hamiltonian};
use crate::qsim::{self, Circuit, Gate, QuantumState};

/// Confusion matrix `[[P(0|0), P(1|0)], [P(0|1), P(1|1)]]`: row = prepared, column = read.
pub type Confusion = [[f64; 2]; 2];

pub const PERFECT_READOUT: Confusion = [[1.0, 0.0], [0.0, 1.0]];

pub fn symmetric_readout(flip: f64) -> Confusion {
    [[1.0 - flip, flip], [flip, 1.0 - flip]]
}

/// Per-qubit error parameters. A one-element list applies to every qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Energy relaxation times in seconds.
    pub t1: Vec<f64>,
    /// Coherence times in seconds, `T2 ≤ 2 T1`.
    pub t2: Vec<f64>,
    pub readout: Vec<Confusion>,
    /// Default single-qubit gate duration in seconds.
    pub single_qubit_time: f64,
    /// Default two-qubit gate duration in seconds.
    pub two_qubit_time: f64,
    #[serde(default)]
    pub depolarizing_1q: f64,
    #[serde(default)]
    pub depolarizing_2q: f64,
}

pub const DEFAULT_SINGLE_QUBIT_TIME: f64 = 30e-9;
pub const DEFAULT_TWO_QUBIT_TIME: f64 = 300e-9;

impl NoiseModel {
    /// No error of any kind.
    pub fn ideal() -> Self {
        NoiseModel {
            t1: vec![f64::INFINITY],
            t2: vec![f64::INFINITY],
            readout: vec![PERFECT_READOUT],
            single_qubit_time: DEFAULT_SINGLE_QUBIT_TIME,
            two_qubit_time: DEFAULT_TWO_QUBIT_TIME,
            depolarizing_1q: 0.0,
            depolarizing_2q: 0.0,
        }
    }

    /// Order-of-magnitude stand-in for a 2021-era five-qubit superconducting device:
    /// `T1 = T2 = 100 µs`, 1% symmetric readout flips, depolarizing `5e-4` / `5e-3`.
    pub fn santiago_like() -> Self {
        NoiseModel {
            t1: vec![100e-6],
            t2: vec![100e-6],
            readout: vec![symmetric_readout(0.01)],
            depolarizing_1q: 5e-4,
            depolarizing_2q: 5e-3,
            ..Self::ideal()
        }
    }

    /// Relaxation-only model with `T2 = T1`, perfect readout and no depolarizing error.
    pub fn thermal(t1: f64) -> Self {
        NoiseModel {
            t1: vec![t1],
            t2: vec![t1],
            ..Self::ideal()
        }
    }

    /// Same model with every `T1` (and `T2`, keeping the ratio) replaced.
    pub fn with_t1(&self, t1: f64) -> Self {
        let mut m = self.clone();
        m.t2 =
            m.t1.iter()
                .zip(&m.t2)
                .map(|(old1, old2)| if old1.is_finite() { old2 / old1 * t1 } else { t1 })
                .collect();
        m.t1 = vec![t1; m.t1.len()];
        m
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidNoiseModel(msg));
        if self.t1.is_empty() || self.t2.len() != self.t1.len() || self.readout.is_empty() {
            return bad("t1 and t2 need equal, non-zero lengths and readout at least one entry".into());
        }
        for (q, (&t1, &t2)) in self.t1.iter().zip(&self.t2).enumerate() {
            if ![t1, t2].iter().all(|&t| t > 0.0) {
                return bad(format!("qubit {q}: T1 and T2 must be positive"));
            }
            if t2 > 2.0 * t1 * (1.0 + 1e-12) {
                return bad(format!("qubit {q}: T2 = {t2} exceeds 2 T1 = {}", 2.0 * t1));
            }
        }
        for (q, m) in self.readout.iter().enumerate() {
            for row in m {
                if row.iter().any(|p| !(0.0..=1.0).contains(p)) || (row[0] + row[1] - 1.0).abs() > 1e-12 {
                    return bad(format!(
                        "qubit {q}: confusion rows must be probabilities summing to 1"
                    ));
                }
            }
        }
        if !(self.single_qubit_time >= 0.0 && self.two_qubit_time >= 0.0) {
            return bad("gate durations must be non-negative".into());
        }
        for p in [self.depolarizing_1q, self.depolarizing_2q] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("depolarizing probability {p} outside [0, 1]"));
            }
        }
        Ok(())
    }

    fn covers(&self, n: usize) -> Result<()> {
        for (name, len) in [("t1", self.t1.len()), ("readout", self.readout.len())] {
            if len != 1 && len < n {
                return Err(Error::InvalidNoiseModel(format!(
                    "{name} lists {len} qubits, circuit has {n}"
                )));
            }
        }
        Ok(())
    }

    fn pick<T: Copy>(list: &[T], q: usize) -> T {
        if list.len() == 1 {
            list[0]
        } else {
            list[q]
        }
    }

    /// `(γ, dephasing factor)` for an interval `tau` on qubit `q`.
    fn relaxation(&self, q: usize, tau: f64) -> (f64, f64) {
        let t1 = Self::pick(&self.t1, q);
        let t2 = Self::pick(&self.t2, q);
        let gamma = 1.0 - (-tau / t1).exp();
        let rate_phi = (1.0 / t2 - 0.5 / t1).max(0.0);
        (gamma, (-tau * rate_phi).exp())
    }

    pub fn readout_for(&self, q: usize) -> Confusion {
        Self::pick(&self.readout, q)
    }
}

/// Applies each gate as `ρ → UρU†`, then depolarizing error for its class, then amplitude
/// damping and pure dephasing over the gate duration on every qubit it touches.
pub fn run_noisy(circuit: &Circuit, model: &NoiseModel, initial: &DensityState) -> Result<DensityState> {
    model.validate()?;
    let n = circuit.n_qubits();
    if initial.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: initial.n_qubits(),
        });
    }
    model.covers(n)?;
    let mut rho = initial.clone();
    for gate in circuit.gates() {
        apply_noisy_gate(&mut rho, gate, model);
    }
    Ok(rho)
}

fn apply_noisy_gate(rho: &mut DensityState, gate: &Gate, model: &NoiseModel) {
    rho.apply_unitary(gate);
    let two = gate.kind.is_two_qubit();
    let qubits: Vec<usize> = gate.qubits().collect();
    let p = if two {
        model.depolarizing_2q
    } else {
        model.depolarizing_1q
    };
    rho.depolarize(&qubits, p);
    let tau = gate.duration.unwrap_or(if two {
        model.two_qubit_time
    } else {
        model.single_qubit_time
    });
    for &q in &qubits {
        let (gamma, factor) = model.relaxation(q, tau);
        rho.amplitude_damp(q, gamma);
        rho.dephase(q, factor);
    }
}

/// Outcome distribution after per-qubit readout confusion.
pub fn readout_probabilities(rho: &DensityState, model: &NoiseModel) -> Result<Vec<f64>> {
    let n = rho.n_qubits();
    model.covers(n)?;
    let mut probs = rho.probabilities();
    for q in 0..n {
        let m = model.readout_for(q);
        if m == PERFECT_READOUT {
            continue;
        }
        let bit = 1usize << (n - 1 - q);
        for i in 0..probs.len() {
            if i & bit == 0 {
                let (p0, p1) = (probs[i], probs[i | bit]);
                probs[i] = p0 * m[0][0] + p1 * m[1][0];
                probs[i | bit] = p0 * m[0][1] + p1 * m[1][1];
            }
        }
    }
    Ok(probs)
}

/// Samples the diagonal of `ρ` and passes every bit through its confusion matrix.
///
/// Drawn as one multinomial over the confused distribution, which has the same law as
/// flipping each shot's bits independently.
pub fn measure_noisy(rho: &DensityState, model: &NoiseModel, shots: u64, seed: u64) -> Result<Vec<u64>> {
    qsim::sample_distribution(&readout_probabilities(rho, model)?, shots, seed)
}

/// Infidelities of the noisy position circuit and of the same circuit followed by a QFT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitInfidelity {
    pub position: f64,
    pub momentum: f64,
}

pub fn circuit_fidelity_probe(circuit: &Circuit, model: &NoiseModel) -> Result<CircuitInfidelity> {
    let n = circuit.n_qubits();
    let (pos, mom) = measurement_circuits(circuit)?;
    let zero = QuantumState::zero(n)?;
    let rho0 = DensityState::zero(n)?;
    let infid = |c: &Circuit| -> Result<f64> {
        let ideal = qsim::run_circuit(c, &zero)?;
        let rho = run_noisy(c, model, &rho0)?;
        Ok((1.0 - rho.expectation_of(ideal.amplitudes())?).clamp(0.0, 1.0))
    };
    Ok(CircuitInfidelity {
        position: infid(&pos)?,
        momentum: infid(&mom)?,
    })
}

/// State preparation alone, and state preparation followed by a QFT.
pub fn measurement_circuits(circuit: &Circuit) -> Result<(Circuit, Circuit)> {
    let n = circuit.n_qubits();
    let mut mom = circuit.clone();
    mom.append(&qsim::qft_circuit(n, 0..n)?, 0)?;
    Ok((circuit.clone(), mom))
}

/// Outcome distributions of the noisy position and momentum measurement circuits.
#[derive(Debug, Clone)]
pub struct NoisyDistributions {
    pub position: Vec<f64>,
    pub momentum: Vec<f64>,
}

impl NoisyDistributions {
    pub fn compute(circuit: &Circuit, model: &NoiseModel) -> Result<Self> {
        let (pos, mom) = measurement_circuits(circuit)?;
        let rho0 = DensityState::zero(circuit.n_qubits())?;
        Ok(NoisyDistributions {
            position: readout_probabilities(&run_noisy(&pos, model, &rho0)?, model)?,
            momentum: readout_probabilities(&run_noisy(&mom, model, &rho0)?, model)?,
        })
    }

    /// Infinite-shot energy.
    pub fn expected_energy(&self, h: &Hamiltonian) -> f64 {
        let dot = |p: &[f64], d: &[f64]| p.iter().zip(d).map(|(a, b)| a * b).sum::<f64>();
        dot(&self.position, &h.v_diag) + dot(&self.momentum, &h.d_diag)
    }

    pub fn sampled_energy(&self, h: &Hamiltonian, shots: u64, seed: u64) -> Result<EnergyEstimate> {
        problems::sampled_energy_from_probabilities(&self.position, &self.momentum, h, shots, seed)
    }
}
