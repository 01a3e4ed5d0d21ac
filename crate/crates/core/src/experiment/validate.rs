use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ansatz::{AnsatzSpec, Family};
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::fourier::{self, spectral_error_report, Centering, Grid, Interpolant, Smoothness};
use crate::optimize::{Objective, VariationalEnergy};
use crate::problems::{build_hamiltonian, Problem};
use crate::qsim::{self, QuantumState};

/// Deliberate bugs for checking that the suite catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Every controlled-phase angle of the QFT has the wrong sign.
    QftPhaseSign,
    /// Register indices above `N/2` are read as positive momenta.
    MomentumOrdering,
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qft-phase-sign" => Ok(Fault::QftPhaseSign),
            "momentum-ordering" => Ok(Fault::MomentumOrdering),
            other => Err(Error::config(
                "inject",
                format!("unknown fault {other:?}; expected qft-phase-sign or momentum-ordering"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{verdict}  {:width$}  {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

fn check(name: &'static str, outcome: Result<(bool, String)>) -> Check {
    match outcome {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn phase_sign(fault: Option<Fault>) -> f64 {
    if fault == Some(Fault::QftPhaseSign) {
        -1.0
    } else {
        1.0
    }
}

fn random_state(n: usize, complex: bool, rng: &mut ChaCha8Rng) -> Result<QuantumState> {
    let amps = (0..1usize << n)
        .map(|_| {
            let re = rng.random_range(-1.0..1.0);
            let im = if complex { rng.random_range(-1.0..1.0) } else { 0.0 };
            Complex64::new(re, im)
        })
        .collect();
    QuantumState::normalized(amps)
}

/// QFT circuits on 1..=6 qubits against the DFT matrix `e^{+2πirs/N}/√N`.
fn qft_unitarity(fault: Option<Fault>) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 1..=6usize {
        let dim = 1usize << n;
        let u = qsim::qft_circuit_signed(n, 0..n, phase_sign(fault))?.unitary()?;
        let scale = 1.0 / (dim as f64).sqrt();
        for (r, col) in u.iter().enumerate() {
            for (s, v) in col.iter().enumerate() {
                let expect = Complex64::from_polar(scale, 2.0 * PI * ((r * s) % dim) as f64 / dim as f64);
                worst = worst.max((v - expect).norm());
            }
        }
    }
    Ok((worst < 1e-10, format!("max |U - DFT| = {worst:.2e} for n ≤ 6")))
}

/// Circuit interpolation against classical zero padding for n ≤ 5, m ≤ 7, plus the gate budget.
fn interpolation_equivalence(fault: Option<Fault>) -> Result<(bool, String)> {
    let pairs: Vec<(usize, usize)> = (1..=5).flat_map(|n| (0..=7).map(move |m| (n, m))).collect();
    let results = map_indexed(pairs.len(), |i| -> Result<(f64, bool)> {
        let (n, m) = pairs[i];
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + i as u64);
        let circuit = fourier::interpolate_position_circuit_signed(n, m, phase_sign(fault))?;
        let within_budget = circuit.len() <= (n + m) * (n + m) + 2 * (n + m);
        let mut worst = 0.0f64;
        for complex in [false, true] {
            let s = random_state(n, complex, &mut rng)?;
            let out = qsim::run_circuit(&circuit, &s.with_zero_ancillas(m)?)?;
            let classical = fourier::interpolate_classical(s.amplitudes(), m)?;
            for (a, b) in out.amplitudes().iter().zip(&classical) {
                worst = worst.max((a - b).norm());
            }
        }
        Ok((worst, within_budget))
    });
    let mut worst = 0.0f64;
    let mut budget = true;
    for r in results {
        let (w, b) = r?;
        worst = worst.max(w);
        budget &= b;
    }
    Ok((
        worst < 1e-10 && budget,
        format!("max deviation {worst:.2e} over n ≤ 5, m ≤ 7; gate count within (n+m)²+2(n+m): {budget}"),
    ))
}

/// A sum of all `N` grid plane waves is reproduced exactly between grid points.
fn nyquist_exactness(fault: Option<Fault>) -> Result<(bool, String)> {
    let grid = Grid::new(-1.0, 2.0, 4, Centering::Left)?;
    let p = grid.momenta();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let weights: Vec<Complex64> = p
        .iter()
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let f = |x: f64| -> Complex64 {
        p.iter()
            .zip(&weights)
            .map(|(pk, w)| w * Complex64::from_polar(1.0, -pk * x))
            .sum()
    };
    let state = QuantumState::from_amplitudes(grid.points().into_iter().map(f).collect())?;
    let momenta = match fault {
        Some(Fault::MomentumOrdering) => {
            let dp = grid.momentum_grid().dp;
            (0..grid.len()).map(|s| s as f64 * dp).collect()
        }
        _ => p.clone(),
    };
    let interp = Interpolant::with_momenta(&state, &grid, momenta)?;
    let worst = (0..200)
        .map(|i| {
            let x = -1.0 + 3.0 * (i as f64 * 0.618_033_988_7).fract();
            (interp.eval(x) - f(x)).norm()
        })
        .fold(0.0, f64::max);
    Ok((worst < 1e-10, format!("max off-grid error {worst:.2e} at N = 16")))
}

/// Parameter shift against central differences on 50 random ansatz/problem/θ draws.
fn gradient_check() -> Result<(bool, String)> {
    let results = map_indexed(50, |i| -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + i as u64);
        let problem = match i % 3 {
            0 => Problem::harmonic_oscillator(),
            1 => Problem::transmon(),
            _ => Problem::flux_qubit(),
        };
        let n = rng.random_range(2..=4);
        let family = match rng.random_range(0..3) {
            0 => Family::Zgr,
            d => Family::Ry { depth: d },
        };
        let spec = AnsatzSpec::new(family, n, rng.random::<bool>());
        let h = build_hamiltonian(&problem, n)?;
        let mut obj = VariationalEnergy::new(spec, &h, 0, 0)?;
        let theta: Vec<f64> = (0..obj.dim()).map(|_| rng.random_range(-PI..PI)).collect();
        let grad = obj.gradient(&theta)?;
        let step = 1e-5;
        let mut worst = 0.0f64;
        for k in 0..theta.len() {
            let mut plus = theta.clone();
            let mut minus = theta.clone();
            plus[k] += step;
            minus[k] -= step;
            let fd = (obj.estimate(&plus)? - obj.estimate(&minus)?) / (2.0 * step);
            worst = worst.max((fd - grad[k]).abs());
        }
        Ok(worst)
    });
    let mut worst = 0.0f64;
    for r in results {
        worst = worst.max(r?);
    }
    Ok((
        worst < 1e-6,
        format!("max |shift - FD| = {worst:.2e} over 50 draws"),
    ))
}

fn bernoulli(order: u32, x: f64) -> f64 {
    let t = x / (2.0 * PI);
    match order {
        2 => t * t - t + 1.0 / 6.0,
        3 => t.powi(3) - 1.5 * t * t + 0.5 * t,
        _ => t.powi(4) - 2.0 * t.powi(3) + t * t - 1.0 / 30.0,
    }
}

fn spectral_analytic() -> Result<(bool, String)> {
    let f = |x: f64| 1.0 / (1.0 - 0.5 * x.cos());
    let r = spectral_error_report(&f, None, Smoothness::Analytic, &[2, 3, 4, 5])?;
    let (slope, r2) = r.exponential_fit();
    Ok((
        slope < 0.0 && r2 > 0.99,
        format!("log-error slope {slope:.3} per point, R² = {r2:.5}"),
    ))
}

fn spectral_algebraic() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for m in 1..=3u32 {
        let f = move |x: f64| bernoulli(m + 1, x);
        let r = spectral_error_report(&f, None, Smoothness::Derivatives(m), &[4, 5, 6, 7, 8, 9])?;
        let order = r.algebraic_order();
        ok &= (order - m as f64).abs() <= 0.5;
        parts.push(format!("m={m}: {order:.3}"));
    }
    Ok((ok, format!("fitted orders {}", parts.join(", "))))
}

fn spectral_gibbs() -> Result<(bool, String)> {
    let step = |x: f64| {
        if x < PI {
            1.0
        } else if x == PI {
            0.5
        } else {
            0.0
        }
    };
    let r = spectral_error_report(&step, None, Smoothness::Discontinuous, &[10])?;
    let overshoot = r.rows[0].overshoot.unwrap_or(f64::NAN);
    Ok((
        (overshoot - 0.0895).abs() <= 0.005,
        format!("overshoot {overshoot:.4} at N = 1024"),
    ))
}

/// Symmetrized parameter and CNOT counts for 2–6 qubits.
pub const TABLE_ROWS: [(usize, Family, usize, usize); 15] = [
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

fn table_accounting() -> Result<(bool, String)> {
    let mut matched = 0;
    for (n, family, params, cnots) in TABLE_ROWS {
        let spec = AnsatzSpec::new(family, n, true);
        let built = spec.build(&vec![0.3; spec.parameter_count()])?;
        if spec.parameter_count() == params && built.cnot_count() == cnots {
            matched += 1;
        }
    }
    Ok((
        matched == TABLE_ROWS.len(),
        format!("{matched}/{} rows match", TABLE_ROWS.len()),
    ))
}

/// Runs every check; `fault` injects one deliberate bug.
pub fn run_validation(fault: Option<Fault>) -> ValidationReport {
    ValidationReport {
        checks: vec![
            check("qft-unitarity", qft_unitarity(fault)),
            check("interpolation-equivalence", interpolation_equivalence(fault)),
            check("nyquist-exactness", nyquist_exactness(fault)),
            check("gradient-shift-rule", gradient_check()),
            check("spectral-analytic", spectral_analytic()),
            check("spectral-algebraic", spectral_algebraic()),
            check("spectral-gibbs", spectral_gibbs()),
            check("table-accounting", table_accounting()),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn status(report: &ValidationReport, name: &str) -> bool {
        report.checks.iter().find(|c| c.name == name).unwrap().passed
    }

    #[test]
    fn clean_suite_passes() {
        let r = run_validation(None);
        assert!(r.passed(), "\n{r}");
    }

    #[test]
    fn injected_faults_are_caught() {
        let r = run_validation(Some(Fault::QftPhaseSign));
        assert!(!status(&r, "interpolation-equivalence"));
        let r = run_validation(Some(Fault::MomentumOrdering));
        assert!(!status(&r, "nyquist-exactness"));
        assert!(status(&r, "interpolation-equivalence"));
        assert!("bogus".parse::<Fault>().is_err());
    }
}
