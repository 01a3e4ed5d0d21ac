//! Zero-noise extrapolation in `λ = 1/T1`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZneMode {
    /// Unweighted least-squares polynomial of the given degree.
    LeastSquares { degree: usize },
    /// Exact interpolation through every point (degree = points - 1).
    Richardson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZneFit {
    /// Extrapolated value at `1/T1 → 0`.
    pub e0: f64,
    /// Polynomial coefficients in `λ/λ_scale`, constant term first.
    pub coefficients: Vec<f64>,
    /// Largest `1/T1` among the fitted points; the fit variable is `λ/λ_scale ∈ (0, 1]`.
    pub lambda_scale: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub points_used: usize,
}

impl ZneFit {
    /// Evaluates the fitted curve at a given `T1`.
    pub fn eval(&self, t1: f64) -> f64 {
        let x = 1.0 / t1 / self.lambda_scale;
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Fits `E(T1) = E0 + Σ_k ε_k / T1^k` to `(T1, E)` pairs with `T1 ≥ validity_floor`.
pub fn zne_extrapolate(points: &[(f64, f64)], mode: ZneMode, validity_floor: f64) -> Result<ZneFit> {
    let mut used: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &(t1, e) in points {
        if !(t1.is_finite() && t1 > 0.0 && e.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid point ({t1}, {e})")));
        }
        if used.iter().any(|&(u, _)| u == t1) {
            return Err(Error::DuplicateT1(t1));
        }
        if t1 >= validity_floor {
            used.push((t1, e));
        }
    }
    let degree = match mode {
        ZneMode::LeastSquares { degree } => degree,
        ZneMode::Richardson => used.len().saturating_sub(1),
    };
    if degree > MAX_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "degree {degree} exceeds the maximum of {MAX_DEGREE}"
        )));
    }
    if used.len() < degree + 1 || used.is_empty() {
        return Err(Error::InsufficientPoints {
            needed: degree + 1,
            got: used.len(),
        });
    }
    let scale = used.iter().map(|&(t1, _)| 1.0 / t1).fold(0.0, f64::max);
    let a = DMatrix::from_fn(used.len(), degree + 1, |i, k| {
        (1.0 / used[i].0 / scale).powi(k as i32)
    });
    let b = DVector::from_iterator(used.len(), used.iter().map(|&(_, e)| e));
    let coeffs = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidArgument(format!("ill-conditioned fit: {e}")))?;
    let resid = &a * &coeffs - &b;
    Ok(ZneFit {
        e0: coeffs[0],
        coefficients: coeffs.iter().copied().collect(),
        lambda_scale: scale,
        residual: (resid.norm_squared() / used.len() as f64).sqrt(),
        points_used: used.len(),
    })
}
