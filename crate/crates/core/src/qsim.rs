//! Minimal dense statevector simulator.
//!
//! Basis index `s` is read with qubit 0 as the most significant bit:
//! `s = s_0 s_1 … s_{n-1}`. Qubit `q` therefore lives at bit `n - 1 - q`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ops::Range;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register the dense backend accepts.
pub const MAX_QUBITS: usize = 14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl QuantumState {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: index,
            });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Wraps raw amplitudes. The length must be a power of two; no normalization is applied.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n_qubits = log2_exact(amps.len())?;
        check_size(n_qubits)?;
        Ok(Self { n_qubits, amps })
    }

    /// Wraps amplitudes after rescaling them to unit norm.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        normalize(&mut amps)?;
        Self::from_amplitudes(amps)
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::normalized(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QuantumState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Tensor product with `self` on the most significant qubits.
    pub fn tensor(&self, low: &QuantumState) -> Result<QuantumState> {
        check_size(self.n_qubits + low.n_qubits)?;
        let mut amps = Vec::with_capacity(self.dim() * low.dim());
        for a in &self.amps {
            amps.extend(low.amps.iter().map(|b| a * b));
        }
        Ok(QuantumState {
            n_qubits: self.n_qubits + low.n_qubits,
            amps,
        })
    }

    /// Prepends `m` ancilla qubits in `|0⟩` as the most significant qubits.
    pub fn with_zero_ancillas(&self, m: usize) -> Result<QuantumState> {
        check_size(self.n_qubits + m)?;
        let mut amps = vec![ZERO; self.dim() << m];
        amps[..self.dim()].copy_from_slice(&self.amps);
        Ok(QuantumState {
            n_qubits: self.n_qubits + m,
            amps,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    Ry(f64),
    X,
    H,
    /// Phase `e^{iθ}` on `|11⟩` of (control, target).
    CPhase(f64),
    Cnot,
    /// Exchanges `target` and `control` (the second qubit is stored in `control`).
    Swap,
}

impl GateKind {
    pub fn is_two_qubit(&self) -> bool {
        matches!(self, GateKind::CPhase(_) | GateKind::Cnot | GateKind::Swap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
    /// Physical duration in seconds. `None` defers to the noise model's per-class default.
    pub duration: Option<f64>,
}

impl Gate {
    fn single(kind: GateKind, target: usize) -> Self {
        Gate {
            kind,
            target,
            control: None,
            duration: None,
        }
    }

    fn pair(kind: GateKind, control: usize, target: usize) -> Self {
        Gate {
            kind,
            target,
            control: Some(control),
            duration: None,
        }
    }

    pub fn ry(target: usize, theta: f64) -> Self {
        Self::single(GateKind::Ry(theta), target)
    }

    pub fn x(target: usize) -> Self {
        Self::single(GateKind::X, target)
    }

    pub fn h(target: usize) -> Self {
        Self::single(GateKind::H, target)
    }

    pub fn cphase(control: usize, target: usize, theta: f64) -> Self {
        Self::pair(GateKind::CPhase(theta), control, target)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::pair(GateKind::Cnot, control, target)
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::pair(GateKind::Swap, b, a)
    }

    pub fn with_duration(mut self, seconds: f64) -> Self {
        self.duration = Some(seconds);
        self
    }

    /// Qubits the gate acts on.
    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        std::iter::once(self.target).chain(self.control)
    }

    pub fn inverse(&self) -> Gate {
        let kind = match self.kind {
            GateKind::Ry(t) => GateKind::Ry(-t),
            GateKind::CPhase(t) => GateKind::CPhase(-t),
            k => k,
        };
        Gate { kind, ..*self }
    }

    /// Complex conjugate of the gate's matrix, i.e. the gate acting on bra indices.
    pub(crate) fn conjugate(&self) -> Gate {
        match self.kind {
            GateKind::CPhase(t) => Gate {
                kind: GateKind::CPhase(-t),
                ..*self
            },
            _ => *self,
        }
    }

    /// Same gate with all qubit indices shifted by `offset`.
    pub fn shifted(&self, offset: usize) -> Gate {
        Gate {
            target: self.target + offset,
            control: self.control.map(|c| c + offset),
            ..*self
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
        }
        match (self.kind.is_two_qubit(), self.control) {
            (true, None) => Err(Error::InvalidArgument(format!(
                "{:?} needs a second qubit",
                self.kind
            ))),
            (false, Some(_)) => Err(Error::InvalidArgument(format!(
                "{:?} is a single-qubit gate",
                self.kind
            ))),
            (_, Some(c)) if c == self.target => Err(Error::ControlIsTarget(c)),
            _ => match self.kind {
                GateKind::Ry(t) | GateKind::CPhase(t) if !t.is_finite() => {
                    Err(Error::InvalidArgument("non-finite gate angle".into()))
                }
                _ => Ok(()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(self)
    }

    /// Appends every gate of `other`, shifted so its qubit 0 lands on `offset`.
    pub fn append(&mut self, other: &Circuit, offset: usize) -> Result<&mut Self> {
        for g in &other.gates {
            self.push(g.shifted(offset))?;
        }
        Ok(self)
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind == GateKind::Cnot).count()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind.is_two_qubit()).count()
    }

    /// Dense unitary, column `r` being the image of `|r⟩`.
    pub fn unitary(&self) -> Result<Vec<Vec<Complex64>>> {
        let dim = 1usize << self.n_qubits;
        let mut cols = Vec::with_capacity(dim);
        for r in 0..dim {
            let out = run_circuit(self, &QuantumState::basis(self.n_qubits, r)?)?;
            cols.push(out.amps);
        }
        Ok(cols)
    }
}

/// Returns `U·state`.
pub fn apply_gate(state: &QuantumState, gate: &Gate) -> Result<QuantumState> {
    gate.validate(state.n_qubits)?;
    let mut out = state.clone();
    apply_gate_raw(&mut out.amps, out.n_qubits, gate);
    Ok(out)
}

pub fn run_circuit(circuit: &Circuit, initial: &QuantumState) -> Result<QuantumState> {
    if circuit.n_qubits != initial.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: circuit.n_qubits,
            got: initial.n_qubits,
        });
    }
    let mut out = initial.clone();
    for g in &circuit.gates {
        apply_gate_raw(&mut out.amps, out.n_qubits, g);
    }
    Ok(out)
}

/// In-place gate action on an amplitude vector of `n_qubits`. Indices must be valid.
pub(crate) fn apply_gate_raw(amps: &mut [Complex64], n_qubits: usize, gate: &Gate) {
    let mask = |q: usize| 1usize << (n_qubits - 1 - q);
    let t = mask(gate.target);
    match gate.kind {
        GateKind::Ry(theta) => {
            let (s, c) = (theta / 2.0).sin_cos();
            apply_real_2x2(amps, t, [[c, -s], [s, c]]);
        }
        GateKind::H => {
            let h = FRAC_1_SQRT_2;
            apply_real_2x2(amps, t, [[h, h], [h, -h]]);
        }
        GateKind::X => {
            for i in 0..amps.len() {
                if i & t == 0 {
                    amps.swap(i, i | t);
                }
            }
        }
        GateKind::Cnot => {
            let c = mask(gate.control.expect("validated"));
            for i in 0..amps.len() {
                if i & c != 0 && i & t == 0 {
                    amps.swap(i, i | t);
                }
            }
        }
        GateKind::CPhase(theta) => {
            let c = mask(gate.control.expect("validated"));
            let phase = Complex64::from_polar(1.0, theta);
            for (i, a) in amps.iter_mut().enumerate() {
                if i & c != 0 && i & t != 0 {
                    *a *= phase;
                }
            }
        }
        GateKind::Swap => {
            let o = mask(gate.control.expect("validated"));
            for i in 0..amps.len() {
                if i & t != 0 && i & o == 0 {
                    amps.swap(i, (i & !t) | o);
                }
            }
        }
    }
}

fn apply_real_2x2(amps: &mut [Complex64], t: usize, m: [[f64; 2]; 2]) {
    for i in 0..amps.len() {
        if i & t == 0 {
            let j = i | t;
            let (a0, a1) = (amps[i], amps[j]);
            amps[i] = a0 * m[0][0] + a1 * m[0][1];
            amps[j] = a0 * m[1][0] + a1 * m[1][1];
        }
    }
}

/// QFT over the contiguous sub-register `qubits` of an `n_total`-qubit circuit.
///
/// Maps `|r⟩ ↦ 2^{-k/2} Σ_s e^{+2πi r s / 2^k} |s⟩` on the `k` sub-register qubits (first qubit of
/// the range most significant), identity elsewhere. Final SWAPs are included, so the matrix is
/// the DFT itself rather than its bit-reversed form.
pub fn qft_circuit(n_total: usize, qubits: Range<usize>) -> Result<Circuit> {
    qft_circuit_signed(n_total, qubits, 1.0)
}

/// `sign = -1` flips every controlled-phase angle. Only used to exercise the validation suite.
pub(crate) fn qft_circuit_signed(n_total: usize, qubits: Range<usize>, sign: f64) -> Result<Circuit> {
    if qubits.is_empty() {
        return Err(Error::InvalidArgument("empty QFT sub-register".into()));
    }
    if qubits.end > n_total {
        return Err(Error::QubitOutOfRange {
            index: qubits.end - 1,
            n_qubits: n_total,
        });
    }
    let q: Vec<usize> = qubits.collect();
    let k = q.len();
    let mut c = Circuit::new(n_total);
    for j in 0..k {
        c.push(Gate::h(q[j]))?;
        for l in j + 1..k {
            let angle = sign * 2.0 * PI / (1u64 << (l - j + 1)) as f64;
            c.push(Gate::cphase(q[l], q[j], angle))?;
        }
    }
    for j in 0..k / 2 {
        c.push(Gate::swap(q[j], q[k - 1 - j]))?;
    }
    Ok(c)
}

/// Draws `shots` computational-basis outcomes and returns counts per basis index.
pub fn sample(state: &QuantumState, shots: u64, rng_seed: u64) -> Result<Vec<u64>> {
    sample_distribution(&state.probabilities(), shots, rng_seed)
}

/// Multinomial draw from an arbitrary distribution, via a chain of conditional binomials.
/// Equivalent in law to `shots` i.i.d. categorical draws.
pub fn sample_distribution(probs: &[f64], shots: u64, rng_seed: u64) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let total: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::ZeroNorm);
    }
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut mass = total;
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let p = p.max(0.0);
        if i + 1 == probs.len() || p >= mass {
            counts[i] = remaining;
            break;
        }
        let q = (p / mass).clamp(0.0, 1.0);
        let k = if q == 0.0 {
            0
        } else {
            Binomial::new(remaining, q)
                .expect("probability in [0, 1]")
                .sample(&mut rng)
        };
        counts[i] = k;
        remaining -= k;
        mass -= p;
    }
    Ok(counts)
}

/// `Σ_s diag_s |amp_s|²`.
pub fn expectation_diagonal(state: &QuantumState, diag: &[f64]) -> Result<f64> {
    if diag.len() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            got: diag.len(),
        });
    }
    Ok(state.amps.iter().zip(diag).map(|(a, d)| a.norm_sqr() * d).sum())
}

pub(crate) fn normalize(amps: &mut [Complex64]) -> Result<()> {
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroNorm);
    }
    amps.iter_mut().for_each(|a| *a /= norm);
    Ok(())
}

fn check_size(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_QUBITS {
        Err(Error::TooManyQubits(n_qubits))
    } else {
        Ok(())
    }
}

pub(crate) fn log2_exact(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "length {len} is not a power of two"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn ry_pi_flips_zero() {
        let s = apply_gate(&QuantumState::zero(1).unwrap(), &Gate::ry(0, PI)).unwrap();
        assert!(close(s.amplitudes(), &[ZERO, ONE], 1e-15));
    }

    #[test]
    fn cnot_on_10() {
        let s = QuantumState::basis(2, 0b10).unwrap();
        let out = apply_gate(&s, &Gate::cnot(0, 1)).unwrap();
        assert_eq!(out, QuantumState::basis(2, 0b11).unwrap());
    }

    #[test]
    fn hadamard_on_zero() {
        let s = apply_gate(&QuantumState::zero(1).unwrap(), &Gate::h(0)).unwrap();
        let h = FRAC_1_SQRT_2;
        assert!(close(s.amplitudes(), &[c(h, 0.0), c(h, 0.0)], 1e-15));
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn swap_exchanges_qubits() {
        let s = QuantumState::basis(3, 0b100).unwrap();
        let out = apply_gate(&s, &Gate::swap(0, 2)).unwrap();
        assert_eq!(out, QuantumState::basis(3, 0b001).unwrap());
    }

    #[test]
    fn gate_validation() {
        let mut circ = Circuit::new(2);
        assert!(matches!(
            circ.push(Gate::x(2)),
            Err(Error::QubitOutOfRange { index: 2, .. })
        ));
        assert!(matches!(
            circ.push(Gate::cnot(1, 1)),
            Err(Error::ControlIsTarget(1))
        ));
        assert!(circ.push(Gate::ry(0, f64::NAN)).is_err());
        let s = QuantumState::zero(1).unwrap();
        assert!(apply_gate(&s, &Gate::x(1)).is_err());
    }

    #[test]
    fn run_circuit_checks_width() {
        let circ = Circuit::new(2);
        let s = QuantumState::zero(3).unwrap();
        assert!(matches!(
            run_circuit(&circ, &s),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn empty_circuit_is_identity() {
        let s = QuantumState::from_real(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(run_circuit(&Circuit::new(2), &s).unwrap(), s);
    }

    #[test]
    fn ry_composition() {
        let (a, b) = (0.37, -1.21);
        let mut circ = Circuit::new(1);
        circ.push(Gate::ry(0, a)).unwrap().push(Gate::ry(0, b)).unwrap();
        let mut single = Circuit::new(1);
        single.push(Gate::ry(0, a + b)).unwrap();
        let z = QuantumState::zero(1).unwrap();
        let x = run_circuit(&circ, &z).unwrap();
        let y = run_circuit(&single, &z).unwrap();
        assert!(close(x.amplitudes(), y.amplitudes(), 1e-12));
    }

    #[test]
    fn qft_single_qubit_is_hadamard() {
        let q = qft_circuit(1, 0..1).unwrap();
        assert_eq!(q.gates(), &[Gate::h(0)]);
    }

    #[test]
    fn qft_of_zero_is_uniform() {
        for n in 1..=6 {
            let out = run_circuit(&qft_circuit(n, 0..n).unwrap(), &QuantumState::zero(n).unwrap()).unwrap();
            let a = (1.0 / (1u64 << n) as f64).sqrt();
            assert!(out.amplitudes().iter().all(|x| (x - c(a, 0.0)).norm() < 1e-12));
        }
    }

    #[test]
    fn qft_two_qubits_on_01() {
        let out = run_circuit(
            &qft_circuit(2, 0..2).unwrap(),
            &QuantumState::basis(2, 1).unwrap(),
        )
        .unwrap();
        let expect = [c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)];
        assert!(close(out.amplitudes(), &expect, 1e-12));
    }

    #[test]
    fn qft_matches_dft_matrix() {
        // Oracle: the DFT matrix entry e^{2πi r s / N}/√N written out directly.
        for n in 1..=6 {
            let dim = 1usize << n;
            let u = qft_circuit(n, 0..n).unwrap().unitary().unwrap();
            for (r, col) in u.iter().enumerate() {
                for (s, v) in col.iter().enumerate() {
                    let phase = 2.0 * PI * ((r * s) % dim) as f64 / dim as f64;
                    let expect = Complex64::from_polar(1.0 / (dim as f64).sqrt(), phase);
                    assert!((v - expect).norm() < 1e-10, "n={n} r={r} s={s}");
                }
            }
        }
    }

    #[test]
    fn qft_times_inverse_is_identity() {
        for n in 1..=6 {
            let q = qft_circuit(n, 0..n).unwrap();
            let mut both = q.clone();
            both.append(&q.inverse(), 0).unwrap();
            for (r, col) in both.unitary().unwrap().iter().enumerate() {
                for (s, v) in col.iter().enumerate() {
                    let expect = if r == s { ONE } else { ZERO };
                    assert!((v - expect).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn qft_on_subregister_leaves_rest_alone() {
        // QFT on qubits 1..3 of a 3-qubit register: MSB untouched.
        let q = qft_circuit(3, 1..3).unwrap();
        let out = run_circuit(&q, &QuantumState::basis(3, 0b101).unwrap()).unwrap();
        let sub = run_circuit(
            &qft_circuit(2, 0..2).unwrap(),
            &QuantumState::basis(2, 0b01).unwrap(),
        )
        .unwrap();
        let expect = QuantumState::basis(1, 1).unwrap().tensor(&sub).unwrap();
        assert!(close(out.amplitudes(), expect.amplitudes(), 1e-12));
        assert!(qft_circuit(3, 2..2).is_err());
        assert!(qft_circuit(3, 1..4).is_err());
    }

    #[test]
    fn sample_deterministic_state() {
        let s = QuantumState::basis(1, 1).unwrap();
        assert_eq!(sample(&s, 100, 3).unwrap(), vec![0, 100]);
    }

    #[test]
    fn sample_uniform_within_five_sigma() {
        let s = QuantumState::from_real(&[1.0; 4]).unwrap();
        let counts = sample(&s, 8192, 11).unwrap();
        let sigma = (8192.0f64 * 0.25 * 0.75).sqrt();
        assert_eq!(counts.iter().sum::<u64>(), 8192);
        for &k in &counts {
            assert!((k as f64 - 2048.0).abs() < 5.0 * sigma);
        }
    }

    #[test]
    fn sample_is_seed_deterministic() {
        let s = QuantumState::from_real(&[0.3, 0.1, 0.5, 0.2, 0.7, 0.1, 0.05, 0.2]).unwrap();
        assert_eq!(sample(&s, 1000, 42).unwrap(), sample(&s, 1000, 42).unwrap());
        assert!(matches!(sample(&s, 0, 1), Err(Error::ZeroShots)));
    }

    #[test]
    fn diagonal_expectations() {
        let plus = apply_gate(&QuantumState::zero(1).unwrap(), &Gate::h(0)).unwrap();
        assert_eq!(expectation_diagonal(&plus, &[0.0, 0.0]).unwrap(), 0.0);
        assert!((expectation_diagonal(&plus, &[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((expectation_diagonal(&plus, &[0.0, 2.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(expectation_diagonal(&plus, &[1.0]).is_err());
    }

    #[test]
    fn register_cap() {
        assert!(matches!(QuantumState::zero(15), Err(Error::TooManyQubits(15))));
        assert!(QuantumState::from_amplitudes(vec![ONE; 3]).is_err());
    }
}
