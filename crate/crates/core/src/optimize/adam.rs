use crate::error::Result;

use super::{check_start, norm, Objective, OptimizerConfig, Recorder, Trajectory};

/// Adam on parameter-shift gradients. Iterate `k` is recorded with the estimate and gradient
/// evaluated there; `θ_opt` is the last iterate.
pub fn adam_minimize(
    objective: &mut dyn Objective,
    theta0: &[f64],
    config: &OptimizerConfig,
) -> Result<Trajectory> {
    check_start(objective, theta0)?;
    let p = config.adam;
    let mut rec = Recorder::new(objective, config);
    let mut theta = theta0.to_vec();
    let mut m = vec![0.0; theta.len()];
    let mut v = vec![0.0; theta.len()];
    let (mut b1t, mut b2t) = (1.0, 1.0);
    for k in 0..config.max_iterations {
        let grad = rec.gradient(&theta, k)?;
        let energy = if rec.objective().is_exact() || config.record_exact {
            Some(rec.estimate(&theta, k)?)
        } else {
            None
        };
        if let Some(e) = energy {
            rec.record(k, &theta, e, Some(norm(&grad)))?;
        }
        b1t *= p.beta1;
        b2t *= p.beta2;
        let lr = match p.decay_iterations {
            Some(d) => p.learning_rate / (1.0 + k as f64 / d),
            None => p.learning_rate,
        };
        for i in 0..theta.len() {
            m[i] = p.beta1 * m[i] + (1.0 - p.beta1) * grad[i];
            v[i] = p.beta2 * v[i] + (1.0 - p.beta2) * grad[i] * grad[i];
            let m_hat = m[i] / (1.0 - b1t);
            let v_hat = v[i] / (1.0 - b2t);
            theta[i] -= lr * m_hat / (v_hat.sqrt() + p.epsilon);
        }
    }
    let last = config.max_iterations;
    rec.finish(theta, last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::test_support::Quadratic;
    use crate::optimize::Method;

    #[test]
    fn converges_on_quadratic() {
        let mut q = Quadratic {
            target: vec![0.0],
            weights: vec![1.0],
        };
        let mut cfg = OptimizerConfig::for_method(Method::Adam);
        cfg.max_iterations = 500;
        cfg.adam.decay_iterations = Some(20.0);
        let t = adam_minimize(&mut q, &[0.8], &cfg).unwrap();
        assert!(t.theta_opt[0].abs() < 1e-6, "{:?}", t.theta_opt);
        assert!(t.records.len() <= cfg.max_iterations + 1);
    }

    #[test]
    fn rejects_wrong_start() {
        let mut q = Quadratic {
            target: vec![0.0, 0.0],
            weights: vec![1.0, 1.0],
        };
        assert!(adam_minimize(&mut q, &[0.1], &OptimizerConfig::default()).is_err());
    }
}
