//! Benchmark Hamiltonians `D(p) + V(x)` and their energy estimators.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::derive_seed;
use crate::fourier::{self, Grid};
use crate::qsim::{self, QuantumState};

/// Largest register the dense reference solver accepts.
pub const MAX_REFERENCE_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Problem {
    HarmonicOscillator {
        #[serde(default = "one")]
        mass: f64,
        #[serde(default = "one")]
        omega: f64,
        #[serde(default = "one")]
        hbar: f64,
    },
    Transmon {
        #[serde(default = "one")]
        ej: f64,
        #[serde(default = "fiftieth")]
        ec: f64,
    },
    FluxQubit {
        #[serde(default = "one")]
        ej: f64,
        #[serde(default = "fiftieth")]
        ec: f64,
        #[serde(default = "default_alpha")]
        alpha: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn fiftieth() -> f64 {
    1.0 / 50.0
}

fn default_alpha() -> f64 {
    0.7
}

impl Problem {
    pub fn harmonic_oscillator() -> Self {
        Problem::HarmonicOscillator {
            mass: 1.0,
            omega: 1.0,
            hbar: 1.0,
        }
    }

    pub fn transmon() -> Self {
        Problem::Transmon {
            ej: 1.0,
            ec: fiftieth(),
        }
    }

    pub fn flux_qubit() -> Self {
        Problem::FluxQubit {
            ej: 1.0,
            ec: fiftieth(),
            alpha: default_alpha(),
        }
    }

    /// Parses the short names used on the command line.
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "harmonic_oscillator" | "ho" => Some(Self::harmonic_oscillator()),
            "transmon" => Some(Self::transmon()),
            "flux_qubit" | "flux" => Some(Self::flux_qubit()),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Problem::HarmonicOscillator { .. } => "harmonic_oscillator",
            Problem::Transmon { .. } => "transmon",
            Problem::FluxQubit { .. } => "flux_qubit",
        }
    }

    /// Name plus parameters, safe for file names.
    pub fn key(&self) -> String {
        match *self {
            Problem::HarmonicOscillator { mass, omega, hbar } => {
                format!("harmonic_oscillator_m{mass}_w{omega}_h{hbar}")
            }
            Problem::Transmon { ej, ec } => format!("transmon_ej{ej}_ec{ec}"),
            Problem::FluxQubit { ej, ec, alpha } => format!("flux_qubit_ej{ej}_ec{ec}_a{alpha}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Problem::HarmonicOscillator { mass, omega, hbar } => {
                [mass, omega, hbar].iter().all(|v| v.is_finite() && *v > 0.0)
            }
            Problem::Transmon { ej, ec } => ej.is_finite() && ec.is_finite() && ec > 0.0,
            Problem::FluxQubit { ej, ec, alpha } => {
                ej.is_finite() && ec.is_finite() && ec > 0.0 && alpha.is_finite() && alpha > -0.5
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config("problem", format!("invalid parameters {self:?}")))
        }
    }

    pub fn potential(&self, x: f64) -> f64 {
        match *self {
            Problem::HarmonicOscillator { mass, omega, .. } => 0.5 * mass * omega * omega * x * x,
            Problem::Transmon { ej, .. } => -ej * x.cos(),
            Problem::FluxQubit { ej, alpha, .. } => -ej * (2.0 * x.cos() - alpha * (2.0 * x).cos()),
        }
    }

    /// Fourier symbol of the kinetic term.
    pub fn kinetic(&self, p: f64) -> f64 {
        match *self {
            Problem::HarmonicOscillator { mass, hbar, .. } => hbar * hbar * p * p / (2.0 * mass),
            Problem::Transmon { ec, .. } => 4.0 * ec * p * p,
            Problem::FluxQubit { ec, alpha, .. } => ec * p * p / (0.5 + alpha),
        }
    }

    /// Domain discretization for an `n`-qubit register.
    ///
    /// Oscillator: `2^n` points spanning `[-L_x/2, L_x/2]` endpoints included, with
    /// `L_x = sqrt(2π 2^n)` oscillator lengths. This is a symmetric periodic grid of period
    /// `L_x N/(N-1)`. Transmon and flux qubit: the periodic phase interval `[-π, π)`.
    pub fn grid(&self, n: usize) -> Result<Grid> {
        if n == 0 {
            return Err(Error::InvalidArgument("at least one qubit is required".into()));
        }
        match *self {
            Problem::HarmonicOscillator { mass, omega, hbar } => {
                let len = 1usize << n;
                let scale = (hbar / (mass * omega)).sqrt();
                let span = (2.0 * PI * len as f64).sqrt() * scale;
                let period = if len > 1 {
                    span * len as f64 / (len - 1) as f64
                } else {
                    span
                };
                Grid::symmetric(period, n)
            }
            Problem::Transmon { .. } | Problem::FluxQubit { .. } => Grid::symmetric(2.0 * PI, n),
        }
    }

    /// Closed-form continuum ground state, when known.
    pub fn analytic_ground_state(&self) -> Option<impl Fn(f64) -> f64> {
        match *self {
            Problem::HarmonicOscillator { mass, omega, hbar } => {
                let beta2 = mass * omega / hbar;
                let norm = (beta2 / PI).powf(0.25);
                Some(move |x: f64| norm * (-beta2 * x * x / 2.0).exp())
            }
            _ => None,
        }
    }
}

/// Diagonal position and momentum representations on one grid.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub grid: Grid,
    pub v_diag: Vec<f64>,
    /// `D(p_s)` in register order.
    pub d_diag: Vec<f64>,
}

impl Hamiltonian {
    pub fn on_grid(problem: &Problem, grid: Grid) -> Self {
        let v_diag = grid.points().iter().map(|&x| problem.potential(x)).collect();
        let d_diag = grid.momenta().iter().map(|&p| problem.kinetic(p)).collect();
        Hamiltonian { grid, v_diag, d_diag }
    }

    pub fn n_qubits(&self) -> usize {
        self.grid.n_qubits()
    }

    pub fn dim(&self) -> usize {
        self.v_diag.len()
    }

    /// Real symmetric matrix `F† diag(D) F + diag(V)`.
    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let kernel: Vec<f64> = (0..n)
            .map(|d| {
                self.d_diag
                    .iter()
                    .enumerate()
                    .map(|(s, dv)| dv * (2.0 * PI * ((s * d) % n) as f64 / n as f64).cos())
                    .sum::<f64>()
                    / n as f64
            })
            .collect();
        let mut h = DMatrix::from_fn(n, n, |r, c| kernel[r.abs_diff(c)]);
        for (i, v) in self.v_diag.iter().enumerate() {
            h[(i, i)] += v;
        }
        // Exact symmetry against round-off in the kernel sums.
        let ht = h.transpose();
        (h + ht) * 0.5
    }
}

pub fn build_hamiltonian(problem: &Problem, n: usize) -> Result<Hamiltonian> {
    problem.validate()?;
    Ok(Hamiltonian::on_grid(problem, problem.grid(n)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub value: f64,
    pub v_part: f64,
    pub d_part: f64,
    /// Shots per expectation circuit; 0 for exact evaluation.
    pub shots_per_term: u64,
}

impl EnergyEstimate {
    fn new(v_part: f64, d_part: f64, shots_per_term: u64) -> Self {
        EnergyEstimate {
            value: v_part + d_part,
            v_part,
            d_part,
            shots_per_term,
        }
    }
}

fn check_dim(state: &QuantumState, h: &Hamiltonian) -> Result<()> {
    if state.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: state.dim(),
        });
    }
    Ok(())
}

/// Momentum-register probabilities `|QFT(f)_s|²`.
pub fn momentum_probabilities(state: &QuantumState) -> Result<Vec<f64>> {
    Ok(fourier::qft_vec(state.amplitudes())?
        .iter()
        .map(Complex64::norm_sqr)
        .collect())
}

/// `⟨f|V|f⟩ + ⟨QFT f|D|QFT f⟩`.
pub fn exact_energy(state: &QuantumState, h: &Hamiltonian) -> Result<EnergyEstimate> {
    check_dim(state, h)?;
    let v = qsim::expectation_diagonal(state, &h.v_diag)?;
    let d = dot(&momentum_probabilities(state)?, &h.d_diag);
    Ok(EnergyEstimate::new(v, d, 0))
}

/// Shot estimate: `shots` samples of the position circuit and `shots` of the momentum circuit,
/// each with its own stream derived from `rng_seed`.
pub fn sampled_energy(
    state: &QuantumState,
    h: &Hamiltonian,
    shots: u64,
    rng_seed: u64,
) -> Result<EnergyEstimate> {
    check_dim(state, h)?;
    sampled_energy_from_probabilities(
        &state.probabilities(),
        &momentum_probabilities(state)?,
        h,
        shots,
        rng_seed,
    )
}

/// Shot estimate from precomputed outcome distributions of the two measurement circuits.
pub fn sampled_energy_from_probabilities(
    position: &[f64],
    momentum: &[f64],
    h: &Hamiltonian,
    shots: u64,
    rng_seed: u64,
) -> Result<EnergyEstimate> {
    let pos = qsim::sample_distribution(position, shots, derive_seed(rng_seed, &[0]))?;
    let mom = qsim::sample_distribution(momentum, shots, derive_seed(rng_seed, &[1]))?;
    energy_from_counts(&pos, &mom, h)
}

pub fn energy_from_counts(position: &[u64], momentum: &[u64], h: &Hamiltonian) -> Result<EnergyEstimate> {
    if position.len() != h.dim() || momentum.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: position.len().min(momentum.len()),
        });
    }
    let mean = |counts: &[u64], diag: &[f64]| -> Result<(f64, u64)> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::ZeroShots);
        }
        let sum: f64 = counts.iter().zip(diag).map(|(&c, d)| c as f64 * d).sum();
        Ok((sum / total as f64, total))
    };
    let (v, shots) = mean(position, &h.v_diag)?;
    let (d, _) = mean(momentum, &h.d_diag)?;
    Ok(EnergyEstimate::new(v, d, shots))
}

/// Single-shot variances of the position and momentum estimators.
pub fn estimator_variances(state: &QuantumState, h: &Hamiltonian) -> Result<(f64, f64)> {
    check_dim(state, h)?;
    let var = |p: &[f64], d: &[f64]| {
        let m = dot(p, d);
        p.iter().zip(d).map(|(pi, di)| pi * (di - m).powi(2)).sum::<f64>()
    };
    Ok((
        var(&state.probabilities(), &h.v_diag),
        var(&momentum_probabilities(state)?, &h.d_diag),
    ))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Two lowest eigenpairs of a grid Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSolution {
    pub problem: Problem,
    pub n_qubits: usize,
    pub e0: f64,
    pub e1: f64,
    /// Normalized, real, with its largest-magnitude entry positive.
    pub ground: Vec<f64>,
}

impl ReferenceSolution {
    pub fn gap(&self) -> f64 {
        self.e1 - self.e0
    }

    pub fn ground_state(&self) -> QuantumState {
        QuantumState::from_real(&self.ground).expect("reference vector is normalized")
    }
}

/// Dense diagonalization of the `n`-qubit Hamiltonian of `problem`.
pub fn reference_solve(problem: &Problem, n: usize) -> Result<ReferenceSolution> {
    let h = build_hamiltonian(problem, n)?;
    solve_dense(problem, &h)
}

/// Dense diagonalization of an arbitrary grid Hamiltonian of `problem`.
pub fn solve_dense(problem: &Problem, h: &Hamiltonian) -> Result<ReferenceSolution> {
    let n = h.n_qubits();
    if n > MAX_REFERENCE_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    if h.dim() < 2 {
        return Err(Error::InvalidArgument("need at least two levels".into()));
    }
    let eig = SymmetricEigen::new(h.dense());
    let mut order: Vec<usize> = (0..h.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let (i0, i1) = (order[0], order[1]);
    let mut ground: Vec<f64> = eig.eigenvectors.column(i0).iter().copied().collect();
    let norm = ground.iter().map(|v| v * v).sum::<f64>().sqrt();
    let peak = ground
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    let sign = peak.signum() / norm;
    ground.iter_mut().for_each(|v| *v *= sign);
    Ok(ReferenceSolution {
        problem: *problem,
        n_qubits: n,
        e0: eig.eigenvalues[i0],
        e1: eig.eigenvalues[i1],
        ground,
    })
}

/// Reference solutions persisted as JSON, one file per `(problem, n)`.
#[derive(Debug, Clone)]
pub struct ReferenceCache {
    dir: PathBuf,
}

impl ReferenceCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ReferenceCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, problem: &Problem, n: usize) -> PathBuf {
        self.dir.join(format!("{}_n{n}.json", problem.key()))
    }

    /// Loads a cached solution or solves and stores it. Unreadable cache files are replaced.
    pub fn get(&self, problem: &Problem, n: usize) -> Result<ReferenceSolution> {
        let path = self.path(problem, n);
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(sol) = serde_json::from_str::<ReferenceSolution>(&text) {
                if sol.problem == *problem && sol.n_qubits == n {
                    return Ok(sol);
                }
            }
        }
        let sol = reference_solve(problem, n)?;
        fs::create_dir_all(&self.dir)?;
        fs::write(&path, serde_json::to_string(&sol)?)?;
        Ok(sol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::encode_function;

    #[test]
    fn oscillator_grid() {
        let g = Problem::harmonic_oscillator().grid(3).unwrap();
        let span = (16.0 * PI).sqrt();
        assert!((span - 7.0898).abs() < 1e-4);
        assert!((g.point(0) + span / 2.0).abs() < 1e-12);
        assert!((g.point(7) - span / 2.0).abs() < 1e-12);
        assert!((g.dx() - span / 7.0).abs() < 1e-12);
    }

    #[test]
    fn transmon_grid_spans_two_pi() {
        for n in 1..=6 {
            let g = Problem::transmon().grid(n).unwrap();
            assert!((g.length() - 2.0 * PI).abs() < 1e-15);
            assert!((g.point(0) + PI - g.dx() / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn flux_potential_minima() {
        // Stationary points of V: sin φ (2 - 4α cos φ) = 0, so cos φ = 1/(2α).
        let phi = (1.0f64 / 1.4).acos();
        assert!((phi - 0.7754).abs() < 1e-3);
        let p = Problem::flux_qubit();
        let h = 1e-5;
        let slope = (p.potential(phi + h) - p.potential(phi - h)) / (2.0 * h);
        assert!(slope.abs() < 1e-8);
        assert!(p.potential(phi) < p.potential(0.0));
        let hm = build_hamiltonian(&p, 4).unwrap();
        let (imin, _) = hm
            .v_diag
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert!((hm.grid.point(imin).abs() - phi).abs() < hm.grid.dx());
    }

    #[test]
    fn potential_only_on_basis_states() {
        let h = build_hamiltonian(&Problem::transmon(), 3).unwrap();
        for s in 0..8 {
            let e = exact_energy(&QuantumState::basis(3, s).unwrap(), &h).unwrap();
            assert_eq!(e.v_part, h.v_diag[s]);
            assert!((e.value - e.v_part - e.d_part).abs() < 1e-15);
        }
    }

    #[test]
    fn oscillator_energy_of_sampled_gaussian() {
        let p = Problem::harmonic_oscillator();
        let h = build_hamiltonian(&p, 6).unwrap();
        let f = p.analytic_ground_state().unwrap();
        let s = encode_function(f, &h.grid).unwrap();
        let e = exact_energy(&s, &h).unwrap();
        assert!((e.value - 0.5).abs() < 5e-3, "{}", e.value);
    }

    #[test]
    fn quantum_path_matches_dense_form() {
        // Plancherel: the QFT-based kinetic energy equals the dense quadratic form.
        for p in [
            Problem::harmonic_oscillator(),
            Problem::transmon(),
            Problem::flux_qubit(),
        ] {
            let h = build_hamiltonian(&p, 4).unwrap();
            let raw: Vec<f64> = (0..16).map(|i| ((i * 7 % 5) as f64 - 2.0) * 0.3 + 0.1).collect();
            let s = QuantumState::from_real(&raw).unwrap();
            let v: Vec<f64> = s.amplitudes().iter().map(|a| a.re).collect();
            let dense = h.dense();
            let form = (0..16)
                .map(|r| (0..16).map(|c| v[r] * dense[(r, c)] * v[c]).sum::<f64>())
                .sum::<f64>();
            let e = exact_energy(&s, &h).unwrap();
            assert!((form - e.value).abs() < 1e-10);
        }
    }

    #[test]
    fn circuit_qft_agrees_with_fft_in_energy() {
        let h = build_hamiltonian(&Problem::flux_qubit(), 3).unwrap();
        let s = QuantumState::from_real(&[0.1, 0.5, -0.2, 0.7, 0.3, 0.0, 0.2, -0.1]).unwrap();
        let q = qsim::run_circuit(&qsim::qft_circuit(3, 0..3).unwrap(), &s).unwrap();
        let d = qsim::expectation_diagonal(&q, &h.d_diag).unwrap();
        assert!((d - exact_energy(&s, &h).unwrap().d_part).abs() < 1e-12);
    }

    #[test]
    fn flux_reference_is_an_eigenpair() {
        let r = reference_solve(&Problem::flux_qubit(), 4).unwrap();
        let h = build_hamiltonian(&Problem::flux_qubit(), 4).unwrap();
        let e = exact_energy(&r.ground_state(), &h).unwrap();
        assert!((e.value - r.e0).abs() < 1e-10);
        assert!(r.gap() > 0.0 && r.gap() < 0.1);
    }

    #[test]
    fn oscillator_reference_spectrum() {
        let r = reference_solve(&Problem::harmonic_oscillator(), 6).unwrap();
        assert!((r.e0 - 0.5).abs() < 1e-3, "{}", r.e0);
        assert!((r.e1 - 1.5).abs() < 5e-3, "{}", r.e1);
        let r3 = reference_solve(&Problem::harmonic_oscillator(), 3).unwrap();
        assert!((r3.e0 - 0.50020).abs() < 1e-4 && (r3.e1 - 1.49641).abs() < 1e-4);
    }

    #[test]
    fn transmon_gap_near_plasma_frequency() {
        let r = reference_solve(&Problem::transmon(), 6).unwrap();
        let omega = (8.0f64 * fiftieth()).sqrt();
        assert!((r.gap() - omega).abs() / omega < 0.15, "gap {}", r.gap());
    }

    #[test]
    fn flux_ground_state_has_two_lobes() {
        let r = reference_solve(&Problem::flux_qubit(), 5).unwrap();
        let g = Problem::flux_qubit().grid(5).unwrap();
        let peak = r
            .ground
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        // Tunnelling pulls the maxima slightly inside the potential minima.
        assert!(
            (g.point(peak).abs() - 0.775).abs() < 0.3,
            "peak at {}",
            g.point(peak)
        );
        // The centre is a local dip between the lobes.
        assert!(r.ground[16] < r.ground[peak]);
        assert!((r.ground[15] - r.ground[16]).abs() < 1e-10);
    }

    #[test]
    fn sampled_energy_basics() {
        let h = build_hamiltonian(&Problem::harmonic_oscillator(), 3).unwrap();
        let basis = QuantumState::basis(3, 2).unwrap();
        let e = sampled_energy(&basis, &h, 50, 9).unwrap();
        assert_eq!(e.v_part, h.v_diag[2]);
        assert_eq!(e.shots_per_term, 50);
        assert!(matches!(sampled_energy(&basis, &h, 0, 9), Err(Error::ZeroShots)));
        assert_eq!(
            sampled_energy(&basis, &h, 50, 9).unwrap(),
            sampled_energy(&basis, &h, 50, 9).unwrap()
        );
    }

    #[test]
    fn sampled_energy_within_shot_noise() {
        let p = Problem::harmonic_oscillator();
        let h = build_hamiltonian(&p, 3).unwrap();
        let s = encode_function(p.analytic_ground_state().unwrap(), &h.grid).unwrap();
        let exact = exact_energy(&s, &h).unwrap().value;
        let (vv, vd) = estimator_variances(&s, &h).unwrap();
        let bound = 5.0 * (vv.sqrt() + vd.sqrt()) / 8192f64.sqrt();
        let inside = (0..200)
            .filter(|&seed| (sampled_energy(&s, &h, 8192, seed).unwrap().value - exact).abs() < bound)
            .count();
        assert!(inside >= 198, "{inside}/200");
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ReferenceCache::new(dir.path());
        let a = cache.get(&Problem::transmon(), 3).unwrap();
        let b = cache.get(&Problem::transmon(), 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn problem_names_and_validation() {
        assert_eq!(Problem::from_name("flux"), Some(Problem::flux_qubit()));
        assert!(Problem::from_name("nope").is_none());
        let bad = Problem::HarmonicOscillator {
            mass: -1.0,
            omega: 1.0,
            hbar: 1.0,
        };
        assert!(build_hamiltonian(&bad, 3).is_err());
        let p: Problem = toml::from_str("name = \"flux_qubit\"").unwrap();
        assert_eq!(p, Problem::flux_qubit());
    }
}
