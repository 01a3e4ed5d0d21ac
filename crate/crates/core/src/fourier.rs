//! Grids, register encoding, momentum ordering and Fourier interpolation.
//!
//! Sign convention: the register QFT maps `|r⟩ ↦ N^{-1/2} Σ_s e^{+2πi rs/N} |s⟩`, so a plane
//! wave `e^{-i p_k x}` sampled on the grid lands on momentum index `k`. The continuous
//! interpolant is `I(x) = N^{-1/2} Σ_k c_k e^{-i p_k (x - x_0)}` with `c = QFT(f)`, which
//! round-trips `encode → QFT → reconstruct` back to the samples.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{self, Circuit, Gate, QuantumState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    /// `x_s = a + sΔx`.
    Left,
    /// `x_s = (a+b)/2 + (s + ½ - N/2)Δx`, mirror-symmetric about the interval centre.
    Symmetric,
}

/// Periodic 1-D grid of `2^n` points on `[a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    a: f64,
    b: f64,
    n_qubits: usize,
    centering: Centering,
}

impl Grid {
    pub fn new(a: f64, b: f64, n_qubits: usize, centering: Centering) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidArgument(format!(
                "grid needs finite a < b, got [{a}, {b})"
            )));
        }
        if n_qubits > 30 {
            return Err(Error::TooManyQubits(n_qubits));
        }
        Ok(Grid {
            a,
            b,
            n_qubits,
            centering,
        })
    }

    /// Symmetric grid on `[-length/2, length/2)`.
    pub fn symmetric(length: f64, n_qubits: usize) -> Result<Self> {
        Self::new(-length / 2.0, length / 2.0, n_qubits, Centering::Symmetric)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn centering(&self) -> Centering {
        self.centering
    }

    pub fn len(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Period `L_x = b - a`.
    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.len() as f64
    }

    pub fn point(&self, s: usize) -> f64 {
        match self.centering {
            Centering::Left => self.a + s as f64 * self.dx(),
            Centering::Symmetric => {
                let centre = 0.5 * (self.a + self.b);
                centre + (s as f64 + 0.5 - self.len() as f64 / 2.0) * self.dx()
            }
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|s| self.point(s)).collect()
    }

    /// Same period, `2^m` times more points, sharing the first point `x_0`. Every original
    /// point is a point of the refined grid, which is what interpolation produces.
    pub fn refine(&self, m: usize) -> Result<Grid> {
        let x0 = self.point(0);
        Grid::new(x0, x0 + self.length(), self.n_qubits + m, Centering::Left)
    }

    pub fn momentum_grid(&self) -> MomentumGrid {
        MomentumGrid::new(self.dx(), self.n_qubits)
    }

    pub fn momenta(&self) -> Vec<f64> {
        self.momentum_grid().p
    }
}

/// Conjugate momenta in register order.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    pub p: Vec<f64>,
    pub dp: f64,
}

impl MomentumGrid {
    pub fn new(dx: f64, n_qubits: usize) -> Self {
        let n = 1usize << n_qubits;
        let dp = 2.0 * PI / (dx * n as f64);
        let p = (0..n)
            .map(|s| {
                if s < n / 2 {
                    dp * s as f64
                } else {
                    dp * (s as f64 - n as f64)
                }
            })
            .collect();
        MomentumGrid { p, dp }
    }

    /// `L_p = N Δp`; every momentum lies in `[-L_p/2, L_p/2)`.
    pub fn length(&self) -> f64 {
        self.dp * self.p.len() as f64
    }
}

/// Samples `f` on the grid and normalizes: `amp_s = f(x_s) / sqrt(Σ|f|²)`.
pub fn encode_function(f: impl Fn(f64) -> f64, grid: &Grid) -> Result<QuantumState> {
    encode_complex(|x| Complex64::new(f(x), 0.0), grid)
}

pub fn encode_complex(f: impl Fn(f64) -> Complex64, grid: &Grid) -> Result<QuantumState> {
    let samples: Vec<Complex64> = grid.points().into_iter().map(f).collect();
    if samples.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::InvalidArgument(
            "function is not finite on the grid".into(),
        ));
    }
    QuantumState::normalized(samples)
}

/// Encodes `f(x_1, …, x_d)` on a product grid; the first grid occupies the most significant
/// qubits.
pub fn encode_function_nd(f: impl Fn(&[f64]) -> f64, grids: &[Grid]) -> Result<QuantumState> {
    if grids.is_empty() {
        return Err(Error::InvalidArgument("no grids given".into()));
    }
    let axes: Vec<Vec<f64>> = grids.iter().map(Grid::points).collect();
    let total: usize = axes.iter().map(Vec::len).product();
    let mut x = vec![0.0; grids.len()];
    let mut samples = Vec::with_capacity(total);
    for mut idx in 0..total {
        for d in (0..grids.len()).rev() {
            let len = axes[d].len();
            x[d] = axes[d][idx % len];
            idx /= len;
        }
        samples.push(Complex64::new(f(&x), 0.0));
    }
    QuantumState::normalized(samples)
}

/// Smallest `n` with `2^n ≥ L_x L_p / 2π`.
pub fn min_qubits(lx: f64, lp: f64) -> Result<usize> {
    if !(lx > 0.0 && lp > 0.0 && lx.is_finite() && lp.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "lengths must be positive, got L_x={lx}, L_p={lp}"
        )));
    }
    let log = (lx * lp / (2.0 * PI)).log2();
    // Tolerate round-off when the product is an exact power of two.
    Ok((log - 1e-9).ceil().max(0.0) as usize)
}

/// Position-space interpolation circuit on `n + m` qubits. Ancillas are qubits `0..m` and
/// must start in `|0⟩`; the data register is `m..m+n`.
///
/// `QFT_n` on the data, then CNOTs from the data MSB into every ancilla so that negative
/// momenta `s ≥ 2^{n-1}` move to `s + 2^{n+m} - 2^n`, then `QFT⁻¹_{n+m}`.
pub fn interpolate_position_circuit(n: usize, m: usize) -> Result<Circuit> {
    interpolate_position_circuit_signed(n, m, 1.0)
}

pub(crate) fn interpolate_position_circuit_signed(n: usize, m: usize, sign: f64) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::InvalidArgument("interpolation needs n ≥ 1".into()));
    }
    let total = n + m;
    let mut c = Circuit::new(total);
    c.append(&qsim::qft_circuit_signed(total, m..total, sign)?, 0)?;
    for ancilla in 0..m {
        c.push(Gate::cnot(m, ancilla))?;
    }
    c.append(&qsim::qft_circuit_signed(total, 0..total, sign)?.inverse(), 0)?;
    Ok(c)
}

/// `QFT_{n+m}(|0⟩^{⊗m} ⊗ |f⟩)`: the momentum representation of `f` on a grid extended to
/// `2^m` periods, i.e. with momentum spacing `Δp / 2^m`.
pub fn interpolate_momentum(state: &QuantumState, m: usize) -> Result<QuantumState> {
    let padded = state.with_zero_ancillas(m)?;
    let n = padded.n_qubits();
    qsim::run_circuit(&qsim::qft_circuit(n, 0..n)?, &padded)
}

/// Classical reference for the interpolation circuit: DFT, zero-pad the spectrum (the Nyquist
/// term stays with the negative half), inverse DFT, renormalize.
pub fn interpolate_classical(samples: &[Complex64], m: usize) -> Result<Vec<Complex64>> {
    let mut fine = pad_spectrum(&qft_vec(samples)?, m)?;
    inverse_qft_in_place(&mut fine);
    qsim::normalize(&mut fine)?;
    Ok(fine)
}

/// Adjoint of the (isometric) interpolation map from `n` to `n + m` qubits. For normalized
/// `f`, `|⟨g|I f⟩|² = |⟨I† g|f⟩|²`, which lets mixed states be compared against fine-grid
/// references without interpolating a density matrix.
pub fn interpolation_adjoint(fine: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    let big = qsim::log2_exact(fine.len())?;
    if n == 0 || n > big {
        return Err(Error::InvalidArgument(format!(
            "cannot restrict {big} qubits to {n}"
        )));
    }
    let spec = qft_vec(fine)?;
    let small = 1usize << n;
    let shift = fine.len() - small;
    let mut coarse: Vec<Complex64> = (0..small)
        .map(|s| if s < small / 2 { spec[s] } else { spec[s + shift] })
        .collect();
    inverse_qft_in_place(&mut coarse);
    Ok(coarse)
}

fn pad_spectrum(spec: &[Complex64], m: usize) -> Result<Vec<Complex64>> {
    let n = spec.len();
    let big = n << m;
    if qsim::log2_exact(n)? + m > 30 {
        return Err(Error::TooManyQubits(qsim::log2_exact(n)? + m));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); big];
    for (s, v) in spec.iter().enumerate() {
        let k = if s < n / 2 { s } else { s + big - n };
        out[k] = *v;
    }
    Ok(out)
}

fn planned(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    FftPlanner::new().plan_fft(len, direction)
}

/// Unitary DFT with the register sign, `e^{+2πi rs/N}/√N`.
pub(crate) fn qft_in_place(v: &mut [Complex64]) {
    let scale = 1.0 / (v.len() as f64).sqrt();
    planned(v.len(), FftDirection::Inverse).process(v);
    v.iter_mut().for_each(|a| *a *= scale);
}

pub(crate) fn inverse_qft_in_place(v: &mut [Complex64]) {
    let scale = 1.0 / (v.len() as f64).sqrt();
    planned(v.len(), FftDirection::Forward).process(v);
    v.iter_mut().for_each(|a| *a *= scale);
}

pub(crate) fn qft_vec(v: &[Complex64]) -> Result<Vec<Complex64>> {
    qsim::log2_exact(v.len())?;
    let mut out = v.to_vec();
    qft_in_place(&mut out);
    Ok(out)
}

/// Trigonometric interpolant of a register state over its grid.
#[derive(Debug, Clone)]
pub struct Interpolant {
    coeffs: Vec<Complex64>,
    momenta: Vec<f64>,
    x0: f64,
}

impl Interpolant {
    pub fn new(state: &QuantumState, grid: &Grid) -> Result<Self> {
        Self::with_momenta(state, grid, grid.momenta())
    }

    /// Uses an explicit momentum assignment per register index.
    pub fn with_momenta(state: &QuantumState, grid: &Grid, momenta: Vec<f64>) -> Result<Self> {
        if state.dim() != grid.len() || momenta.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: state.dim().min(momenta.len()),
            });
        }
        let scale = 1.0 / (grid.len() as f64).sqrt();
        let coeffs = qft_vec(state.amplitudes())?
            .into_iter()
            .map(|c| c * scale)
            .collect();
        Ok(Interpolant {
            coeffs,
            momenta,
            x0: grid.point(0),
        })
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let d = x - self.x0;
        self.coeffs
            .iter()
            .zip(&self.momenta)
            .map(|(c, p)| c * Complex64::from_polar(1.0, -p * d))
            .sum()
    }
}

/// Evaluates the interpolant of `state` at `x`; equals the normalized sample at grid points.
pub fn reconstruct_continuous(state: &QuantumState, grid: &Grid, x: f64) -> Result<Complex64> {
    Ok(Interpolant::new(state, grid)?.eval(x))
}

/// Regularity class of a test function on `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    /// Periodic and analytic in a strip: error decays like `e^{-rN}`.
    Analytic,
    /// Periodic with a jump in the `m`-th derivative: error decays like `N^{-m}`.
    Derivatives(u32),
    /// Jump discontinuity: reports the Gibbs overshoot.
    Discontinuous,
}

/// Points in the reference quadrature for the spectral-error suite.
pub const REFERENCE_POINTS: usize = 1 << 14;

#[derive(Debug, Clone, Serialize)]
pub struct SpectralRow {
    pub n_points: usize,
    pub interp_l2: f64,
    pub interp_max: f64,
    /// `‖f' - D_N f‖₂`, when a derivative was supplied.
    pub deriv_l2: Option<f64>,
    /// Overshoot of the truncated Fourier series past the jump, relative to the jump height.
    pub overshoot: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub rows: Vec<SpectralRow>,
}

impl SpectralReport {
    /// Least-squares line through `(N, ln ‖f - I_N f‖₂)`: returns `(slope, r²)`.
    pub fn exponential_fit(&self) -> (f64, f64) {
        let xs: Vec<f64> = self.rows.iter().map(|r| r.n_points as f64).collect();
        let ys: Vec<f64> = self.rows.iter().map(|r| r.interp_l2.ln()).collect();
        linear_fit(&xs, &ys)
    }

    /// Fitted algebraic order `-d ln‖f - I_N f‖_∞ / d ln N`.
    pub fn algebraic_order(&self) -> f64 {
        let xs: Vec<f64> = self.rows.iter().map(|r| (r.n_points as f64).ln()).collect();
        let ys: Vec<f64> = self.rows.iter().map(|r| r.interp_max.ln()).collect();
        -linear_fit(&xs, &ys).0
    }

    /// Fitted order of the derivative error, when derivatives were supplied.
    pub fn derivative_order(&self) -> Option<f64> {
        let ys: Option<Vec<f64>> = self.rows.iter().map(|r| r.deriv_l2.map(f64::ln)).collect();
        let xs: Vec<f64> = self.rows.iter().map(|r| (r.n_points as f64).ln()).collect();
        ys.map(|ys| -linear_fit(&xs, &ys).0)
    }
}

/// Interpolation, differentiation and Gibbs errors of `f` on `[0, 2π)` for `N = 2^n`.
///
/// Norms are evaluated on a `2^14`-point reference grid aligned with every coarse grid.
pub fn spectral_error_report(
    f: &dyn Fn(f64) -> f64,
    derivative: Option<&dyn Fn(f64) -> f64>,
    class: Smoothness,
    n_list: &[usize],
) -> Result<SpectralReport> {
    let big = REFERENCE_POINTS;
    let fine_x: Vec<f64> = (0..big).map(|i| 2.0 * PI * i as f64 / big as f64).collect();
    let truth: Vec<f64> = fine_x.iter().map(|&x| f(x)).collect();
    let truth_d: Option<Vec<f64>> = derivative.map(|d| fine_x.iter().map(|&x| d(x)).collect());
    let weight = 2.0 * PI / big as f64;

    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let len = 1usize << n;
        if n == 0 || len > big / 2 {
            return Err(Error::InvalidArgument(format!(
                "N = 2^{n} outside the supported range"
            )));
        }
        let stride = big / len;
        let mut spec: Vec<Complex64> = (0..len).map(|j| Complex64::new(truth[j * stride], 0.0)).collect();
        planned(len, FftDirection::Forward).process(&mut spec);

        let interp = synthesize(&spec, big, len, |_, c| c);
        let interp_l2 = (truth
            .iter()
            .zip(&interp)
            .map(|(t, i)| (t - i).powi(2))
            .sum::<f64>()
            * weight)
            .sqrt();
        let interp_max = truth
            .iter()
            .zip(&interp)
            .map(|(t, i)| (t - i).abs())
            .fold(0.0, f64::max);

        let deriv_l2 = truth_d.as_ref().map(|td| {
            let d = synthesize(&spec, big, len, |k, c| {
                if 2 * k.unsigned_abs() as usize == len {
                    Complex64::new(0.0, 0.0)
                } else {
                    c * Complex64::new(0.0, k as f64)
                }
            });
            (td.iter().zip(&d).map(|(t, i)| (t - i).powi(2)).sum::<f64>() * weight).sqrt()
        });

        let overshoot = (class == Smoothness::Discontinuous).then(|| gibbs_overshoot(&truth, len));
        rows.push(SpectralRow {
            n_points: len,
            interp_l2,
            interp_max,
            deriv_l2,
            overshoot,
        });
    }
    Ok(SpectralReport { rows })
}

/// Places coarse coefficients (unnormalized forward DFT of `len` samples) on a `big`-point
/// spectrum, applies `map(k, c)` with signed wavenumber `k`, and returns the real part of the
/// synthesized function.
fn synthesize(
    spec: &[Complex64],
    big: usize,
    len: usize,
    map: impl Fn(i64, Complex64) -> Complex64,
) -> Vec<f64> {
    let mut out = vec![Complex64::new(0.0, 0.0); big];
    for (s, c) in spec.iter().enumerate() {
        let k = if s < len / 2 {
            s as i64
        } else {
            s as i64 - len as i64
        };
        let idx = if k >= 0 {
            k as usize
        } else {
            (big as i64 + k) as usize
        };
        out[idx] = map(k, *c) / len as f64;
    }
    planned(big, FftDirection::Inverse).process(&mut out);
    out.into_iter().map(|c| c.re).collect()
}

/// Overshoot of the partial Fourier sum `P_N f` (modes `|k| ≤ N/2`) relative to the jump.
fn gibbs_overshoot(truth: &[f64], len: usize) -> f64 {
    let big = truth.len();
    let mut spec: Vec<Complex64> = truth.iter().map(|&t| Complex64::new(t, 0.0)).collect();
    planned(big, FftDirection::Forward).process(&mut spec);
    let half = len / 2;
    for (s, c) in spec.iter_mut().enumerate() {
        let k = if s < big / 2 { s } else { big - s };
        if k > half {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    planned(big, FftDirection::Inverse).process(&mut spec);
    let partial_max = spec.iter().map(|c| c.re / big as f64).fold(f64::MIN, f64::max);
    let hi = truth.iter().copied().fold(f64::MIN, f64::max);
    let lo = truth.iter().copied().fold(f64::MAX, f64::min);
    (partial_max - hi) / (hi - lo)
}

/// Ordinary least squares `y ≈ slope·x + c`; returns `(slope, r²)`.
pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}
