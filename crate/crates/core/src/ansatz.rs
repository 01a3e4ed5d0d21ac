//! Variational circuit families.
//!
//! Every parameter enters through exactly one `RY` gate, so parameter-shift gradients apply
//! and all states are real.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{Circuit, Gate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// Layers of single-qubit `RY` followed by all-to-all CNOTs, closed by a final `RY` layer.
    Ry { depth: usize },
    /// Cascade of uniformly controlled `RY` rotations in Gray-code order.
    Zgr,
}

/// Sign of the symmetrized function under `x → -x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    #[default]
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub family: Family,
    pub n_qubits: usize,
    #[serde(default = "default_true")]
    pub symmetrized: bool,
    #[serde(default)]
    pub parity: Parity,
}

fn default_true() -> bool {
    true
}

impl AnsatzSpec {
    pub fn new(family: Family, n_qubits: usize, symmetrized: bool) -> Self {
        AnsatzSpec {
            family,
            n_qubits,
            symmetrized,
            parity: Parity::Even,
        }
    }

    /// Qubits seen by the inner (unsymmetrized) family.
    pub fn inner_qubits(&self) -> usize {
        if self.symmetrized {
            self.n_qubits.saturating_sub(1)
        } else {
            self.n_qubits
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.inner_qubits() == 0 {
            return Err(Error::InvalidArgument(format!(
                "{} ansatz needs at least {} qubits",
                self,
                if self.symmetrized { 2 } else { 1 }
            )));
        }
        Ok(())
    }

    pub fn parameter_count(&self) -> usize {
        let n = self.inner_qubits();
        match self.family {
            Family::Ry { depth } => (depth + 1) * n,
            Family::Zgr => (1usize << n) - 1,
        }
    }

    pub fn cnot_count(&self) -> usize {
        let n = self.inner_qubits();
        let inner = match self.family {
            Family::Ry { depth } => depth * n * n.saturating_sub(1) / 2,
            Family::Zgr => (1usize << n) - 2,
        };
        inner + if self.symmetrized { n } else { 0 }
    }

    pub fn build(&self, theta: &[f64]) -> Result<Circuit> {
        self.validate()?;
        let n = self.inner_qubits();
        let inner = match self.family {
            Family::Ry { depth } => ry_ansatz(n, depth, theta)?,
            Family::Zgr => zgr_ansatz(n, theta)?,
        };
        if self.symmetrized {
            symmetrize(&inner, self.parity)
        } else {
            Ok(inner)
        }
    }
}

impl fmt::Display for AnsatzSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Ry { depth } => write!(f, "RY{depth}"),
            Family::Zgr => write!(f, "ZGR"),
        }
    }
}

fn check_len(theta: &[f64], expected: usize) -> Result<()> {
    if theta.len() != expected {
        return Err(Error::ParameterCount {
            expected,
            got: theta.len(),
        });
    }
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("non-finite parameter".into()));
    }
    Ok(())
}

/// `depth` blocks of [RY layer, CNOT(c, t) for all c < t], then a final RY layer.
/// Parameters are ordered layer by layer, qubit 0 first.
pub fn ry_ansatz(n: usize, depth: usize, theta: &[f64]) -> Result<Circuit> {
    check_len(theta, (depth + 1) * n)?;
    let mut c = Circuit::new(n);
    let mut params = theta.iter();
    for layer in 0..=depth {
        for q in 0..n {
            c.push(Gate::ry(q, *params.next().expect("length checked")))?;
        }
        if layer < depth {
            for ctrl in 0..n {
                for tgt in ctrl + 1..n {
                    c.push(Gate::cnot(ctrl, tgt))?;
                }
            }
        }
    }
    Ok(c)
}

/// Level `i` rotates qubit `i` conditioned on qubits `0..i` with `2^i` angles. Each level is
/// the Gray-code form of a uniformly controlled `RY`: for `z = 1..=2^i`, `RY(θ_{i,z-1})` then
/// a CNOT onto qubit `i` controlled by the bit that flips between `z-1` and `z` (the closing
/// CNOT at `z = 2^i` reuses the top control so the parity returns to zero). Level 0 is a bare
/// `RY`.
pub fn zgr_ansatz(n: usize, theta: &[f64]) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::InvalidArgument("ZGR needs at least one qubit".into()));
    }
    check_len(theta, (1usize << n) - 1)?;
    let mut c = Circuit::new(n);
    let mut params = theta.iter();
    c.push(Gate::ry(0, *params.next().expect("length checked")))?;
    for i in 1..n {
        for z in 1..=(1usize << i) {
            c.push(Gate::ry(i, *params.next().expect("length checked")))?;
            let flipped = (z ^ (z - 1)).ilog2() as usize;
            let bit = flipped.min(i - 1);
            c.push(Gate::cnot(i - 1 - bit, i))?;
        }
    }
    Ok(c)
}

/// Extends an `(n-1)`-qubit circuit preparing `f` on the positive half-grid to an `n`-qubit
/// circuit preparing the even (or odd) extension: `amp(1 s) = ± amp(0 s̄)`.
///
/// The new qubit 0 is put in `|+⟩`; while it reads 0 every inner qubit is flipped (index
/// reversal). The odd sign is a `Z = H X H` on qubit 0.
pub fn symmetrize(inner: &Circuit, parity: Parity) -> Result<Circuit> {
    let n = inner.n_qubits() + 1;
    let mut c = Circuit::new(n);
    c.push(Gate::h(0))?;
    c.append(inner, 1)?;
    c.push(Gate::x(0))?;
    for k in 1..n {
        c.push(Gate::cnot(0, k))?;
    }
    c.push(Gate::x(0))?;
    if parity == Parity::Odd {
        c.push(Gate::h(0))?.push(Gate::x(0))?.push(Gate::h(0))?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{run_circuit, QuantumState};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_theta(count: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| rng.random_range(-3.0..3.0)).collect()
    }

    fn prepare(spec: &AnsatzSpec, theta: &[f64]) -> QuantumState {
        let c = spec.build(theta).unwrap();
        run_circuit(&c, &QuantumState::zero(spec.n_qubits).unwrap()).unwrap()
    }

    #[test]
    fn table_accounting() {
        // (qubits, family, parameters, CNOTs) for the symmetrized circuits.
        let rows = [
            (2, Family::Ry { depth: 1 }, 2, 1),
            (2, Family::Ry { depth: 2 }, 3, 1),
            (2, Family::Zgr, 1, 1),
            (3, Family::Ry { depth: 1 }, 4, 3),
            (3, Family::Ry { depth: 2 }, 6, 4),
            (3, Family::Zgr, 3, 4),
            (4, Family::Ry { depth: 1 }, 6, 6),
            (4, Family::Ry { depth: 2 }, 9, 9),
            (4, Family::Zgr, 7, 9),
            (5, Family::Ry { depth: 1 }, 8, 10),
            (5, Family::Ry { depth: 2 }, 12, 16),
            (5, Family::Zgr, 15, 18),
            (6, Family::Ry { depth: 1 }, 10, 15),
            (6, Family::Ry { depth: 2 }, 15, 25),
            (6, Family::Zgr, 31, 35),
        ];
        for (n, family, params, cnots) in rows {
            let spec = AnsatzSpec::new(family, n, true);
            assert_eq!(spec.parameter_count(), params, "{n} {spec}");
            assert_eq!(spec.cnot_count(), cnots, "{n} {spec}");
            let circ = spec.build(&vec![0.1; params]).unwrap();
            assert_eq!(circ.cnot_count(), cnots, "{n} {spec}");
        }
    }

    #[test]
    fn unsymmetrized_counts() {
        let spec = AnsatzSpec::new(Family::Ry { depth: 1 }, 2, false);
        assert_eq!((spec.parameter_count(), spec.cnot_count()), (4, 1));
        let c = zgr_ansatz(1, &[0.3]).unwrap();
        assert_eq!((c.len(), c.cnot_count()), (1, 0));
        for n in 1..=6 {
            let c = zgr_ansatz(n, &vec![0.0; (1 << n) - 1]).unwrap();
            assert_eq!(c.cnot_count(), (1 << n) - 2);
        }
    }

    #[test]
    fn wrong_parameter_length() {
        assert!(matches!(
            ry_ansatz(3, 1, &[0.0; 5]),
            Err(Error::ParameterCount { expected: 6, got: 5 })
        ));
        assert!(zgr_ansatz(3, &[0.0; 6]).is_err());
        assert!(AnsatzSpec::new(Family::Zgr, 1, true).build(&[]).is_err());
    }

    #[test]
    fn zero_angles_give_zero_state() {
        let zero = QuantumState::zero(4).unwrap();
        for family in [Family::Ry { depth: 2 }, Family::Zgr] {
            let spec = AnsatzSpec::new(family, 4, false);
            assert_eq!(prepare(&spec, &vec![0.0; spec.parameter_count()]), zero);
        }
    }

    #[test]
    fn states_are_real() {
        for (seed, family) in [Family::Ry { depth: 2 }, Family::Zgr].into_iter().enumerate() {
            for sym in [false, true] {
                let spec = AnsatzSpec::new(family, 5, sym);
                let s = prepare(&spec, &random_theta(spec.parameter_count(), seed as u64));
                assert!(s.amplitudes().iter().all(|a| a.im.abs() < 1e-14));
            }
        }
    }

    #[test]
    fn symmetrized_states_have_parity() {
        for parity in [Parity::Even, Parity::Odd] {
            let sign = if parity == Parity::Even { 1.0 } else { -1.0 };
            for (seed, family) in [Family::Zgr, Family::Ry { depth: 1 }, Family::Ry { depth: 2 }]
                .into_iter()
                .enumerate()
            {
                for n in 2..=5 {
                    let mut spec = AnsatzSpec::new(family, n, true);
                    spec.parity = parity;
                    let theta = random_theta(spec.parameter_count(), 10 * n as u64 + seed as u64);
                    let a = prepare(&spec, &theta).into_amplitudes();
                    let half = a.len() / 2;
                    for s in 0..half {
                        let mirrored = half - 1 - s;
                        assert!((a[half + s] - sign * a[mirrored]).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn zgr_reaches_every_real_state_locally() {
        // Full-rank Jacobian of θ ↦ state means the 2^n - 1 angles span the real unit sphere.
        let n = 3;
        let dim = 1 << n;
        let theta = random_theta(dim - 1, 5);
        let spec = AnsatzSpec::new(Family::Zgr, n, false);
        let h = 1e-6;
        let mut jac = nalgebra::DMatrix::<f64>::zeros(dim, dim - 1);
        for k in 0..dim - 1 {
            let mut plus = theta.clone();
            let mut minus = theta.clone();
            plus[k] += h;
            minus[k] -= h;
            let sp = prepare(&spec, &plus);
            let sm = prepare(&spec, &minus);
            for r in 0..dim {
                jac[(r, k)] = (sp.amplitudes()[r].re - sm.amplitudes()[r].re) / (2.0 * h);
            }
        }
        let sv = jac.singular_values();
        assert!(sv.iter().all(|&s| s > 1e-6), "{sv:?}");
    }
}
