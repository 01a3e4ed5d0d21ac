//! Classical optimizers for variational energies.

mod adam;
mod simplex;
mod spsa;

pub use adam::adam_minimize;
pub use simplex::nelder_mead_minimize;
pub use spsa::spsa_minimize;

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzSpec;
use crate::error::{Error, Result};
use crate::exec::derive_seed;
use crate::noise::{NoiseModel, NoisyDistributions};
use crate::problems::{self, Hamiltonian};
use crate::qsim::{self, QuantumState};

/// Something to minimize over real parameters.
pub trait Objective {
    fn dim(&self) -> usize;

    /// The value the optimizer sees. May be stochastic; successive calls draw fresh noise.
    fn estimate(&mut self, theta: &[f64]) -> Result<f64>;

    /// Noise-free value, when the objective can provide one.
    fn exact(&mut self, _theta: &[f64]) -> Result<Option<f64>> {
        Ok(None)
    }

    /// Whether [`Objective::estimate`] is already noise-free.
    fn is_exact(&self) -> bool {
        false
    }

    /// Gradient estimate built from [`Objective::estimate`] by the parameter-shift rule.
    fn gradient(&mut self, theta: &[f64]) -> Result<Vec<f64>> {
        parameter_shift_gradient(&mut |t: &[f64]| self.estimate(t), theta)
    }
}

/// `∂E/∂θ_k = [E(θ + π/2 e_k) - E(θ - π/2 e_k)] / 2`, exact when each `θ_k` enters through a
/// single `RY(θ_k)`.
pub fn parameter_shift_gradient(
    energy: &mut dyn FnMut(&[f64]) -> Result<f64>,
    theta: &[f64],
) -> Result<Vec<f64>> {
    let mut shifted = theta.to_vec();
    let mut grad = Vec::with_capacity(theta.len());
    for k in 0..theta.len() {
        shifted[k] = theta[k] + FRAC_PI_2;
        let plus = energy(&shifted)?;
        shifted[k] = theta[k] - FRAC_PI_2;
        let minus = energy(&shifted)?;
        shifted[k] = theta[k];
        grad.push(0.5 * (plus - minus));
    }
    Ok(grad)
}

/// Energy of an ansatz state under a grid Hamiltonian.
///
/// With `shots == 0` every evaluation is exact. Otherwise each evaluation samples the position
/// and momentum circuits `shots` times from its own derived seed. An optional noise model
/// replaces the ideal output distributions by density-matrix ones.
#[derive(Debug, Clone)]
pub struct VariationalEnergy<'a> {
    spec: AnsatzSpec,
    hamiltonian: &'a Hamiltonian,
    shots: u64,
    seed: u64,
    noise: Option<NoiseModel>,
    calls: u64,
    lowest_exact: f64,
}

impl<'a> VariationalEnergy<'a> {
    pub fn new(spec: AnsatzSpec, hamiltonian: &'a Hamiltonian, shots: u64, seed: u64) -> Result<Self> {
        spec.validate()?;
        if spec.n_qubits != hamiltonian.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: hamiltonian.n_qubits(),
                got: spec.n_qubits,
            });
        }
        Ok(VariationalEnergy {
            spec,
            hamiltonian,
            shots,
            seed,
            noise: None,
            calls: 0,
            lowest_exact: f64::INFINITY,
        })
    }

    pub fn with_noise(mut self, model: NoiseModel) -> Result<Self> {
        model.validate()?;
        self.noise = Some(model);
        Ok(self)
    }

    pub fn spec(&self) -> &AnsatzSpec {
        &self.spec
    }

    pub fn state(&self, theta: &[f64]) -> Result<QuantumState> {
        let circuit = self.spec.build(theta)?;
        qsim::run_circuit(&circuit, &QuantumState::zero(self.spec.n_qubits)?)
    }

    /// Lowest noiseless energy computed so far (every evaluation in exact mode, every recorded
    /// iterate otherwise).
    pub fn lowest_exact(&self) -> f64 {
        self.lowest_exact
    }

    /// Estimator calls made so far.
    pub fn calls(&self) -> u64 {
        self.calls
    }

    fn exact_value(&mut self, theta: &[f64]) -> Result<f64> {
        let e = problems::exact_energy(&self.state(theta)?, self.hamiltonian)?.value;
        self.lowest_exact = self.lowest_exact.min(e);
        Ok(e)
    }
}

impl Objective for VariationalEnergy<'_> {
    fn dim(&self) -> usize {
        self.spec.parameter_count()
    }

    fn estimate(&mut self, theta: &[f64]) -> Result<f64> {
        let call = self.calls;
        self.calls += 1;
        match (&self.noise, self.shots) {
            (None, 0) => self.exact_value(theta),
            (None, shots) => {
                let seed = derive_seed(self.seed, &[call]);
                Ok(problems::sampled_energy(&self.state(theta)?, self.hamiltonian, shots, seed)?.value)
            }
            (Some(model), shots) => {
                let dist = NoisyDistributions::compute(&self.spec.build(theta)?, model)?;
                if shots == 0 {
                    Ok(dist.expected_energy(self.hamiltonian))
                } else {
                    let seed = derive_seed(self.seed, &[call]);
                    Ok(dist.sampled_energy(self.hamiltonian, shots, seed)?.value)
                }
            }
        }
    }

    fn exact(&mut self, theta: &[f64]) -> Result<Option<f64>> {
        self.exact_value(theta).map(Some)
    }

    fn is_exact(&self) -> bool {
        self.shots == 0 && self.noise.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Adam,
    Spsa,
    NelderMead,
}

impl Method {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "adam" => Some(Method::Adam),
            "spsa" => Some(Method::Spsa),
            "nelder_mead" | "nelder-mead" | "nm" => Some(Method::NelderMead),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Adam => "adam",
            Method::Spsa => "spsa",
            Method::NelderMead => "nelder_mead",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdamParams {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Learning rate at iteration `k` is `learning_rate / (1 + k/decay_iterations)`;
    /// `None` keeps it constant.
    pub decay_iterations: Option<f64>,
}

impl Default for AdamParams {
    fn default() -> Self {
        AdamParams {
            learning_rate: 0.05,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            decay_iterations: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpsaParams {
    /// Step gain numerator; `None` calibrates it so the first step has size `target_step`.
    pub a: Option<f64>,
    pub c: f64,
    pub stability: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub target_step: f64,
    pub calibration_samples: usize,
}

impl Default for SpsaParams {
    fn default() -> Self {
        SpsaParams {
            a: None,
            c: 0.1,
            stability: 30.0,
            alpha: 0.602,
            gamma: 0.101,
            target_step: 0.1,
            calibration_samples: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NelderMeadParams {
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Stops once the simplex's value spread and size both fall below this.
    pub tolerance: f64,
}

impl Default for NelderMeadParams {
    fn default() -> Self {
        NelderMeadParams {
            initial_step: 0.5,
            tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub method: Method,
    pub max_iterations: usize,
    /// Initial parameters are drawn uniformly from `[-init_range, init_range]`.
    pub init_range: f64,
    pub adam: AdamParams,
    pub spsa: SpsaParams,
    pub nelder_mead: NelderMeadParams,
    /// Also record the noiseless energy of every iterate when the estimate is stochastic.
    pub record_exact: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self::for_method(Method::Adam)
    }
}

impl OptimizerConfig {
    pub fn for_method(method: Method) -> Self {
        OptimizerConfig {
            method,
            max_iterations: match method {
                Method::Adam => 300,
                Method::Spsa | Method::NelderMead => 500,
            },
            init_range: 0.1,
            adam: AdamParams::default(),
            spsa: SpsaParams::default(),
            nelder_mead: NelderMeadParams::default(),
            record_exact: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        // Written so that NaN fails every check.
        let positive = |x: f64| x > 0.0;
        if self.max_iterations == 0 {
            return Err(Error::config("optimizer.max_iterations", "must be positive"));
        }
        if !positive(self.adam.learning_rate) {
            return Err(Error::config("optimizer.adam.learning_rate", "must be positive"));
        }
        if !(0.0..1.0).contains(&self.adam.beta1) || !(0.0..1.0).contains(&self.adam.beta2) {
            return Err(Error::config("optimizer.adam", "betas must lie in [0, 1)"));
        }
        if matches!(self.adam.decay_iterations, Some(d) if !positive(d)) {
            return Err(Error::config(
                "optimizer.adam.decay_iterations",
                "must be positive",
            ));
        }
        if !positive(self.spsa.c) || matches!(self.spsa.a, Some(a) if !positive(a)) {
            return Err(Error::config("optimizer.spsa", "gains a and c must be positive"));
        }
        if !positive(self.nelder_mead.initial_step) {
            return Err(Error::config(
                "optimizer.nelder_mead.initial_step",
                "must be positive",
            ));
        }
        if self.init_range.is_nan() || self.init_range < 0.0 {
            return Err(Error::config("optimizer.init_range", "must be non-negative"));
        }
        Ok(())
    }

    /// Seeded uniform draw in `[-init_range, init_range]^dim`.
    pub fn initial_point(&self, dim: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..dim)
            .map(|_| {
                if self.init_range > 0.0 {
                    rng.random_range(-self.init_range..=self.init_range)
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// Runs the configured method.
pub fn minimize(
    objective: &mut dyn Objective,
    theta0: &[f64],
    config: &OptimizerConfig,
    rng_seed: u64,
) -> Result<Trajectory> {
    config.validate()?;
    match config.method {
        Method::Adam => adam_minimize(objective, theta0, config),
        Method::Spsa => spsa_minimize(objective, theta0, config, rng_seed),
        Method::NelderMead => nelder_mead_minimize(objective, theta0, config),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub theta: Vec<f64>,
    pub estimate: f64,
    pub exact: Option<f64>,
    pub gradient_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub records: Vec<IterationRecord>,
    pub theta_opt: Vec<f64>,
    /// Final estimate of the objective at `theta_opt`.
    pub energy_opt: f64,
    pub evaluations: u64,
}

impl Trajectory {
    /// `iteration,sampled_energy,exact_energy,gradient_norm`, blanks for missing values.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "sampled_energy", "exact_energy", "gradient_norm"])?;
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
        for r in &self.records {
            w.write_record([
                r.iteration.to_string(),
                format!("{:.17e}", r.estimate),
                fmt(r.exact),
                fmt(r.gradient_norm),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shared bookkeeping for the iterative methods.
pub(crate) struct Recorder<'o> {
    objective: &'o mut dyn Objective,
    record_exact: bool,
    records: Vec<IterationRecord>,
    evaluations: u64,
}

impl<'o> Recorder<'o> {
    pub(crate) fn new(objective: &'o mut dyn Objective, config: &OptimizerConfig) -> Self {
        Recorder {
            objective,
            record_exact: config.record_exact,
            records: Vec::new(),
            evaluations: 0,
        }
    }

    pub(crate) fn objective(&mut self) -> &mut dyn Objective {
        self.objective
    }

    pub(crate) fn iterations(&self) -> usize {
        self.records.len()
    }

    pub(crate) fn estimate(&mut self, theta: &[f64], iteration: usize) -> Result<f64> {
        self.evaluations += 1;
        let e = self.objective.estimate(theta)?;
        if !e.is_finite() {
            return Err(Error::NonFiniteEnergy { iteration });
        }
        Ok(e)
    }

    pub(crate) fn gradient(&mut self, theta: &[f64], iteration: usize) -> Result<Vec<f64>> {
        self.evaluations += 2 * theta.len() as u64;
        let g = self.objective.gradient(theta)?;
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEnergy { iteration });
        }
        Ok(g)
    }

    pub(crate) fn record(
        &mut self,
        iteration: usize,
        theta: &[f64],
        estimate: f64,
        gradient_norm: Option<f64>,
    ) -> Result<()> {
        let exact = if self.objective.is_exact() {
            Some(estimate)
        } else if self.record_exact {
            self.objective.exact(theta)?
        } else {
            None
        };
        self.records.push(IterationRecord {
            iteration,
            theta: theta.to_vec(),
            estimate,
            exact,
            gradient_norm,
        });
        Ok(())
    }

    /// Evaluates the objective once more at the final point and closes the trajectory.
    pub(crate) fn finish(mut self, theta_opt: Vec<f64>, iteration: usize) -> Result<Trajectory> {
        let energy_opt = self.estimate(&theta_opt, iteration)?;
        self.record(iteration, &theta_opt, energy_opt, None)?;
        Ok(Trajectory {
            records: self.records,
            theta_opt,
            energy_opt,
            evaluations: self.evaluations,
        })
    }
}

pub(crate) fn check_start(objective: &dyn Objective, theta0: &[f64]) -> Result<()> {
    if theta0.len() != objective.dim() {
        return Err(Error::ParameterCount {
            expected: objective.dim(),
            got: theta0.len(),
        });
    }
    Ok(())
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// `Σ w_k (θ_k - t_k)²` with its exact gradient.
    pub struct Quadratic {
        pub target: Vec<f64>,
        pub weights: Vec<f64>,
    }

    impl Objective for Quadratic {
        fn dim(&self) -> usize {
            self.target.len()
        }

        fn estimate(&mut self, theta: &[f64]) -> Result<f64> {
            Ok(theta
                .iter()
                .zip(&self.target)
                .zip(&self.weights)
                .map(|((x, t), w)| w * (x - t).powi(2))
                .sum())
        }

        fn is_exact(&self) -> bool {
            true
        }

        fn gradient(&mut self, theta: &[f64]) -> Result<Vec<f64>> {
            Ok(theta
                .iter()
                .zip(&self.target)
                .zip(&self.weights)
                .map(|((x, t), w)| 2.0 * w * (x - t))
                .collect())
        }
    }
}
