use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::exec::derive_seed;

use super::{check_start, norm, Objective, OptimizerConfig, Recorder, Trajectory};

fn perturbation(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

/// Simultaneous-perturbation stochastic approximation with gains
/// `a_k = a / (k + 1 + A)^α` and `c_k = c / (k + 1)^γ`. Two estimator calls per iteration;
/// `θ_opt` is the last iterate.
pub fn spsa_minimize(
    objective: &mut dyn Objective,
    theta0: &[f64],
    config: &OptimizerConfig,
    rng_seed: u64,
) -> Result<Trajectory> {
    check_start(objective, theta0)?;
    let p = config.spsa;
    let dim = theta0.len();
    let mut rec = Recorder::new(objective, config);
    let mut theta = theta0.to_vec();

    let probe = |rec: &mut Recorder, theta: &[f64], delta: &[f64], ck: f64, k: usize| -> Result<f64> {
        let plus: Vec<f64> = theta.iter().zip(delta).map(|(t, d)| t + ck * d).collect();
        let minus: Vec<f64> = theta.iter().zip(delta).map(|(t, d)| t - ck * d).collect();
        let ep = rec.estimate(&plus, k)?;
        let em = rec.estimate(&minus, k)?;
        Ok((ep - em) / (2.0 * ck))
    };

    let a = match p.a {
        Some(a) => a,
        None => {
            // Mean magnitude of the first gradient estimate, from independent perturbations.
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(rng_seed, &[u64::MAX]));
            let samples = p.calibration_samples.max(1);
            let mut mean = 0.0;
            for _ in 0..samples {
                let delta = perturbation(&mut rng, dim);
                mean += probe(&mut rec, &theta, &delta, p.c, 0)?.abs();
            }
            mean /= samples as f64;
            if mean > 0.0 {
                p.target_step * (1.0 + p.stability).powf(p.alpha) / mean
            } else {
                p.target_step
            }
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for k in 0..config.max_iterations {
        let ak = a / (k as f64 + 1.0 + p.stability).powf(p.alpha);
        let ck = p.c / (k as f64 + 1.0).powf(p.gamma);
        let delta = perturbation(&mut rng, dim);
        let slope = probe(&mut rec, &theta, &delta, ck, k)?;
        let grad: Vec<f64> = delta.iter().map(|d| slope * d).collect();
        if config.record_exact || rec.objective().is_exact() {
            let e = match rec.objective().exact(&theta)? {
                Some(e) => e,
                None => rec.estimate(&theta, k)?,
            };
            rec.record(k, &theta, e, Some(norm(&grad)))?;
        }
        for (t, g) in theta.iter_mut().zip(&grad) {
            *t -= ak * g;
        }
    }
    rec.finish(theta, config.max_iterations)
}
