//! Figures of merit and aggregation over repetitions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{self, encode_function};
use crate::noise::DensityState;
use crate::problems::{solve_dense, Hamiltonian, Problem, ReferenceSolution};
use crate::qsim::QuantumState;

/// Register size used for the continuous fidelity.
pub const CONTINUUM_QUBITS: usize = 12;

/// Largest grid diagonalized densely when building a continuum reference; finer grids are
/// reached by spectral interpolation of that solution.
const DENSE_QUBITS: usize = 9;

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// `⟨b|ρ|b⟩`.
pub fn mixed_fidelity(rho: &DensityState, b: &QuantumState) -> Result<f64> {
    rho.expectation_of(b.amplitudes())
}

/// Continuum ground state sampled on grids aligned with an `n`-qubit problem grid.
#[derive(Debug, Clone)]
pub struct ContinuousReference {
    problem: Problem,
    n_qubits: usize,
    target_qubits: usize,
    /// Normalized samples on the `target_qubits` refinement of the problem grid.
    fine: Vec<Complex64>,
    /// Normalized samples on the problem grid itself.
    coarse: QuantumState,
}

impl ContinuousReference {
    /// Reference for F^∞ at [`CONTINUUM_QUBITS`].
    pub fn new(problem: &Problem, n_qubits: usize) -> Result<Self> {
        Self::with_target(problem, n_qubits, CONTINUUM_QUBITS)
    }

    /// The oscillator uses its closed-form ground state. Otherwise the Hamiltonian is
    /// diagonalized on a refinement of the problem grid with up to 9 qubits and the
    /// eigenvector is spectrally interpolated to `target_qubits`.
    pub fn with_target(problem: &Problem, n_qubits: usize, target_qubits: usize) -> Result<Self> {
        if target_qubits < n_qubits {
            return Err(Error::InvalidArgument(format!(
                "continuum target {target_qubits} below register size {n_qubits}"
            )));
        }
        if target_qubits > qsim_cap() {
            return Err(Error::TooManyQubits(target_qubits));
        }
        let grid = problem.grid(n_qubits)?;
        let fine_grid = grid.refine(target_qubits - n_qubits)?;
        let fine = match problem.analytic_ground_state() {
            Some(f) => encode_function(f, &fine_grid)?.into_amplitudes(),
            None => {
                let solve_qubits = DENSE_QUBITS.min(target_qubits).max(n_qubits);
                let h = Hamiltonian::on_grid(problem, grid.refine(solve_qubits - n_qubits)?);
                let sol = solve_dense(problem, &h)?;
                let mid: Vec<Complex64> = sol.ground.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                fourier::interpolate_classical(&mid, target_qubits - solve_qubits)?
            }
        };
        let stride = 1usize << (target_qubits - n_qubits);
        let coarse = QuantumState::normalized(fine.iter().step_by(stride).copied().collect())?;
        Ok(ContinuousReference {
            problem: *problem,
            n_qubits,
            target_qubits,
            fine,
            coarse,
        })
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn target_qubits(&self) -> usize {
        self.target_qubits
    }

    /// Continuum solution sampled on the register grid.
    pub fn coarse(&self) -> &QuantumState {
        &self.coarse
    }

    fn check(&self, dim: usize) -> Result<()> {
        if dim != 1 << self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.n_qubits,
                got: dim,
            });
        }
        Ok(())
    }

    /// `1 - F^(n)`: overlap with the continuum solution sampled on the register grid.
    pub fn infidelity_n(&self, state: &QuantumState) -> Result<f64> {
        self.check(state.dim())?;
        Ok(clamp_unit(1.0 - fidelity(&self.coarse, state)?))
    }

    /// `1 - F^∞`: interpolate the state to the fine grid and compare.
    pub fn infidelity_inf(&self, state: &QuantumState) -> Result<f64> {
        self.check(state.dim())?;
        let up = fourier::interpolate_classical(state.amplitudes(), self.target_qubits - self.n_qubits)?;
        let ip: Complex64 = self.fine.iter().zip(&up).map(|(g, f)| g.conj() * f).sum();
        Ok(clamp_unit(1.0 - ip.norm_sqr()))
    }

    pub fn infidelity_n_mixed(&self, rho: &DensityState) -> Result<f64> {
        self.check(rho.dim())?;
        Ok(clamp_unit(1.0 - mixed_fidelity(rho, &self.coarse)?))
    }

    /// Mixed-state `1 - F^∞`, using `⟨g|A ρ A†|g⟩ = ⟨A†g|ρ|A†g⟩` with `A` the interpolation
    /// isometry.
    pub fn infidelity_inf_mixed(&self, rho: &DensityState) -> Result<f64> {
        self.check(rho.dim())?;
        let pulled = fourier::interpolation_adjoint(&self.fine, self.n_qubits)?;
        Ok(clamp_unit(1.0 - rho.expectation_of(&pulled)?))
    }
}

fn qsim_cap() -> usize {
    crate::qsim::MAX_QUBITS
}

fn clamp_unit(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// `1 - F^∞` of an `n`-qubit state for `problem`, interpolated to [`CONTINUUM_QUBITS`].
pub fn continuous_infidelity(state: &QuantumState, problem: &Problem) -> Result<f64> {
    ContinuousReference::new(problem, state.n_qubits())?.infidelity_inf(state)
}

/// `|E_tn - E_opt| / (E_1 - E_0)` with all reference energies on the same grid.
pub fn epsilon(energy_opt: f64, reference: &ReferenceSolution) -> Result<f64> {
    let gap = reference.gap();
    if gap.abs() <= 1e-14 * reference.e0.abs().max(1.0) {
        return Err(Error::DegenerateGap);
    }
    Ok(((reference.e0 - energy_opt) / gap).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub median: f64,
    /// Population standard deviation about the mean.
    pub std: f64,
    pub count: usize,
}

pub fn aggregate(values: &[f64]) -> Result<Aggregate> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("cannot aggregate an empty list".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    Ok(Aggregate {
        median,
        std: var.sqrt(),
        count: n,
    })
}

/// Spearman rank correlation (average ranks for ties).
pub fn rank_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::InvalidArgument(
            "need two equal-length lists of ≥ 2 values".into(),
        ));
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - mean) * (y - mean)).sum();
    let va: f64 = ra.iter().map(|x| (x - mean).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mean).powi(2)).sum();
    Ok(cov / (va * vb).sqrt())
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            out[idx[k]] = rank;
        }
        i = j + 1;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeritReport {
    pub infidelity_n: f64,
    pub infidelity_inf: f64,
    /// Rescaled error of the optimizer's final energy estimate.
    pub epsilon: f64,
    /// Rescaled error of the exact energy at the final parameters.
    pub epsilon_exact: f64,
    pub energy_opt: f64,
    pub energy_exact: f64,
    pub e0: f64,
    pub e1: f64,
}

impl MeritReport {
    pub fn evaluate(
        state: &QuantumState,
        energy_opt: f64,
        energy_exact: f64,
        reference: &ReferenceSolution,
        continuum: &ContinuousReference,
    ) -> Result<Self> {
        Ok(MeritReport {
            infidelity_n: continuum.infidelity_n(state)?,
            infidelity_inf: continuum.infidelity_inf(state)?,
            epsilon: epsilon(energy_opt, reference)?,
            epsilon_exact: epsilon(energy_exact, reference)?,
            energy_opt,
            energy_exact,
            e0: reference.e0,
            e1: reference.e1,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::reference_solve;
    use crate::qsim::{apply_gate, Gate};

    #[test]
    fn pure_fidelity_examples() {
        let z = QuantumState::zero(1).unwrap();
        let o = QuantumState::basis(1, 1).unwrap();
        let plus = apply_gate(&z, &Gate::h(0)).unwrap();
        assert!((fidelity(&z, &z).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&z, &o).unwrap(), 0.0);
        assert!((fidelity(&plus, &z).unwrap() - 0.5).abs() < 1e-15);
        assert!(fidelity(&z, &QuantumState::zero(2).unwrap()).is_err());
    }

    #[test]
    fn mixed_fidelity_of_pure_projector() {
        let plus = apply_gate(&QuantumState::zero(1).unwrap(), &Gate::h(0)).unwrap();
        let rho = DensityState::from_pure(&plus);
        assert!((mixed_fidelity(&rho, &plus).unwrap() - 1.0).abs() < 1e-14);
        let z = QuantumState::zero(1).unwrap();
        assert!((mixed_fidelity(&rho, &z).unwrap() - 0.5).abs() < 1e-14);
    }

    fn floor(problem: Problem, n: usize) -> f64 {
        let r = reference_solve(&problem, n).unwrap();
        ContinuousReference::new(&problem, n)
            .unwrap()
            .infidelity_inf(&r.ground_state())
            .unwrap()
    }

    #[test]
    fn grid_ground_states_reproduce_table_floors() {
        let cases = [
            (Problem::harmonic_oscillator(), 2, 3.19e-2, 0.02),
            (Problem::harmonic_oscillator(), 3, 5.89e-5, 0.02),
            (Problem::transmon(), 2, 1.59e-1, 0.01),
            (Problem::transmon(), 3, 1.28e-3, 0.02),
            (Problem::flux_qubit(), 2, 9.92e-2, 0.01),
            (Problem::flux_qubit(), 3, 6.64e-2, 0.01),
            (Problem::flux_qubit(), 4, 4.35e-5, 0.03),
        ];
        for (p, n, expect, rel) in cases {
            let got = floor(p, n);
            assert!((got - expect).abs() / expect < rel, "{} n={n}: {got:e}", p.name());
        }
    }

    #[test]
    fn reference_at_full_resolution_has_zero_infidelity() {
        let p = Problem::harmonic_oscillator();
        let c = ContinuousReference::with_target(&p, 6, 6).unwrap();
        assert!(c.infidelity_inf(c.coarse()).unwrap() < 1e-12);
        assert!(c.infidelity_n(c.coarse()).unwrap() < 1e-12);
    }

    #[test]
    fn continuum_target_is_converged() {
        for (p, n) in [(Problem::harmonic_oscillator(), 3), (Problem::flux_qubit(), 4)] {
            let r = reference_solve(&p, n).unwrap();
            let a = ContinuousReference::with_target(&p, n, 12).unwrap();
            let b = ContinuousReference::with_target(&p, n, 13).unwrap();
            let fa = a.infidelity_inf(&r.ground_state()).unwrap();
            let fb = b.infidelity_inf(&r.ground_state()).unwrap();
            assert!((fa - fb).abs() / fa < 0.1, "{fa:e} vs {fb:e}");
        }
    }

    #[test]
    fn mixed_and_pure_paths_agree() {
        let p = Problem::transmon();
        let r = reference_solve(&p, 3).unwrap();
        let c = ContinuousReference::new(&p, 3).unwrap();
        let s = r.ground_state();
        let rho = DensityState::from_pure(&s);
        assert!((c.infidelity_inf(&s).unwrap() - c.infidelity_inf_mixed(&rho).unwrap()).abs() < 1e-12);
        assert!((c.infidelity_n(&s).unwrap() - c.infidelity_n_mixed(&rho).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn epsilon_examples() {
        let r = reference_solve(&Problem::harmonic_oscillator(), 4).unwrap();
        assert_eq!(epsilon(r.e0, &r).unwrap(), 0.0);
        let e = epsilon(r.e0 + 0.1, &r).unwrap();
        assert!((e - 0.1 / r.gap()).abs() < 1e-14 && (e - 0.1).abs() < 0.01);

        let flux = reference_solve(&Problem::flux_qubit(), 4).unwrap();
        let tr = reference_solve(&Problem::transmon(), 4).unwrap();
        assert!(epsilon(flux.e0 + 0.01, &flux).unwrap() > epsilon(tr.e0 + 0.01, &tr).unwrap());

        let mut degenerate = r.clone();
        degenerate.e1 = degenerate.e0;
        assert!(matches!(epsilon(0.0, &degenerate), Err(Error::DegenerateGap)));
    }

    #[test]
    fn aggregate_examples() {
        let a = aggregate(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(a.median, 2.0);
        assert!((a.std - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let c = aggregate(&[4.5; 6]).unwrap();
        assert_eq!((c.median, c.std), (4.5, 0.0));
        assert_eq!(aggregate(&[1.0, 5.0, 2.0, 3.0]).unwrap().median, 2.5);
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn rank_correlation_examples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert!((rank_correlation(&a, &[10.0, 20.0, 30.0, 40.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((rank_correlation(&a, &[4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
    }
}
