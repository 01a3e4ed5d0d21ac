//! Dense density matrices and the channels applied after each gate.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qsim::{self, Gate, QuantumState};

/// Largest register for density-matrix simulation.
pub const MAX_DENSITY_QUBITS: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `ρ` stored row-major. Read as a `2n`-qubit vector, row (ket) bits are qubits `0..n` and
/// column (bra) bits are qubits `n..2n`, so `UρU†` is `U` on the ket half and `conj(U)` on
/// the bra half.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    n_qubits: usize,
    rho: Vec<Complex64>,
}

impl DensityState {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::try_from_pure(&QuantumState::zero(n_qubits)?)
    }

    /// `|ψ⟩⟨ψ|`. Panics beyond [`MAX_DENSITY_QUBITS`]; use [`DensityState::try_from_pure`] to
    /// handle that case.
    pub fn from_pure(psi: &QuantumState) -> Self {
        Self::try_from_pure(psi).expect("register too large for a density matrix")
    }

    pub fn try_from_pure(psi: &QuantumState) -> Result<Self> {
        let n = psi.n_qubits();
        if n > MAX_DENSITY_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        let a = psi.amplitudes();
        let mut rho = Vec::with_capacity(a.len() * a.len());
        for r in a {
            rho.extend(a.iter().map(|c| r * c.conj()));
        }
        Ok(DensityState { n_qubits: n, rho })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.rho[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.element(i, i)).sum()
    }

    /// Computational-basis outcome distribution.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.element(i, i).re.max(0.0)).collect()
    }

    /// `⟨v|ρ|v⟩` for an arbitrary (not necessarily normalized) vector.
    pub fn expectation_of(&self, v: &[Complex64]) -> Result<f64> {
        let dim = self.dim();
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
        let mut acc = ZERO;
        for (r, vr) in v.iter().enumerate() {
            let row = &self.rho[r * dim..(r + 1) * dim];
            let inner: Complex64 = row.iter().zip(v).map(|(x, vc)| x * vc).sum();
            acc += vr.conj() * inner;
        }
        Ok(acc.re)
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.element(r, c) - self.element(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |r, c| {
            0.5 * (self.element(r, c) + self.element(c, r).conj())
        });
        SymmetricEigen::new(m)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn apply_unitary(&mut self, gate: &Gate) {
        let n = self.n_qubits;
        qsim::apply_gate_raw(&mut self.rho, 2 * n, gate);
        qsim::apply_gate_raw(&mut self.rho, 2 * n, &gate.conjugate().shifted(n));
    }

    fn masks(&self, q: usize) -> (usize, usize) {
        let n = self.n_qubits;
        let bit = 1usize << (n - 1 - q);
        (bit * self.dim(), bit)
    }

    /// Amplitude damping with decay probability `gamma` on qubit `q`.
    pub(crate) fn amplitude_damp(&mut self, q: usize, gamma: f64) {
        if gamma <= 0.0 {
            return;
        }
        let (rm, cm) = self.masks(q);
        let keep = (1.0 - gamma).sqrt();
        for i in 0..self.rho.len() {
            let (r1, c1) = (i & rm != 0, i & cm != 0);
            match (r1, c1) {
                (false, false) => {
                    let excited = self.rho[i | rm | cm];
                    self.rho[i] += excited * gamma;
                }
                (true, true) => self.rho[i] *= 1.0 - gamma,
                _ => self.rho[i] *= keep,
            }
        }
    }

    /// Multiplies coherences of qubit `q` by `factor`.
    pub(crate) fn dephase(&mut self, q: usize, factor: f64) {
        if factor >= 1.0 {
            return;
        }
        let (rm, cm) = self.masks(q);
        for (i, v) in self.rho.iter_mut().enumerate() {
            if (i & rm != 0) != (i & cm != 0) {
                *v *= factor;
            }
        }
    }

    /// With probability `p`, replaces the joint state of `qubits` by the maximally mixed state.
    pub(crate) fn depolarize(&mut self, qubits: &[usize], p: f64) {
        if p <= 0.0 {
            return;
        }
        let (rm, cm) = qubits.iter().fold((0, 0), |(a, b), &q| {
            let (r, c) = self.masks(q);
            (a | r, b | c)
        });
        let span = (1u64 << qubits.len()) as f64;
        // Partial trace over `qubits`, indexed by the element with those bits cleared.
        let mut reduced = vec![ZERO; self.rho.len()];
        for (i, v) in self.rho.iter().enumerate() {
            if self.same_bits(i, rm, cm) {
                reduced[i & !(rm | cm)] += v;
            }
        }
        for i in 0..self.rho.len() {
            let mixed = if self.same_bits(i, rm, cm) {
                reduced[i & !(rm | cm)] / span
            } else {
                ZERO
            };
            self.rho[i] = self.rho[i] * (1.0 - p) + mixed * p;
        }
    }

    /// Row bits under `rm` equal column bits under `cm`.
    fn same_bits(&self, i: usize, rm: usize, cm: usize) -> bool {
        let row_bits = (i & rm) / self.dim();
        row_bits == i & cm
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{run_circuit, Circuit};

    fn random_state(n: usize) -> QuantumState {
        let raw: Vec<Complex64> = (0..1 << n)
            .map(|i| Complex64::new(((i * 37 % 11) as f64).sin(), ((i * 13 % 7) as f64).cos()))
            .collect();
        QuantumState::normalized(raw).unwrap()
    }

    #[test]
    fn unitary_action_matches_statevector() {
        let psi = random_state(3);
        let mut c = Circuit::new(3);
        c.push(Gate::h(0)).unwrap();
        c.push(Gate::cphase(0, 2, 0.7)).unwrap();
        c.push(Gate::ry(1, -0.4)).unwrap();
        c.push(Gate::swap(1, 2)).unwrap();
        c.push(Gate::cnot(2, 0)).unwrap();
        let out = run_circuit(&c, &psi).unwrap();
        let mut rho = DensityState::from_pure(&psi);
        for g in c.gates() {
            rho.apply_unitary(g);
        }
        let expect = DensityState::from_pure(&out);
        for (a, b) in rho.rho.iter().zip(&expect.rho) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn damping_of_excited_state() {
        let mut rho = DensityState::from_pure(&QuantumState::basis(2, 0b01).unwrap());
        rho.amplitude_damp(1, 0.3);
        assert!((rho.element(1, 1).re - 0.7).abs() < 1e-15);
        assert!((rho.element(0, 0).re - 0.3).abs() < 1e-15);
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn channels_preserve_trace_and_positivity() {
        let mut rho = DensityState::from_pure(&random_state(3));
        rho.amplitude_damp(0, 0.2);
        rho.dephase(1, 0.6);
        rho.depolarize(&[2], 0.3);
        rho.depolarize(&[0, 2], 0.1);
        assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(rho.hermiticity_error() < 1e-12);
        assert!(rho.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn full_depolarization_gives_mixed_state() {
        let mut rho = DensityState::from_pure(&random_state(2));
        rho.depolarize(&[0, 1], 1.0);
        for r in 0..4 {
            for c in 0..4 {
                let e = if r == c { 0.25 } else { 0.0 };
                assert!((rho.element(r, c) - Complex64::new(e, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn expectation_of_matches_projector() {
        let psi = random_state(2);
        let rho = DensityState::from_pure(&psi);
        assert!((rho.expectation_of(psi.amplitudes()).unwrap() - 1.0).abs() < 1e-13);
        assert!(DensityState::try_from_pure(&QuantumState::zero(9).unwrap()).is_err());
    }
}
