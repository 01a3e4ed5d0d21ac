use crate::error::Result;

use super::{check_start, Objective, OptimizerConfig, Recorder, Trajectory};

/// Nelder–Mead with dimension-adaptive coefficients. Each iteration records the best vertex;
/// `θ_opt` is the best vertex at exit.
pub fn nelder_mead_minimize(
    objective: &mut dyn Objective,
    theta0: &[f64],
    config: &OptimizerConfig,
) -> Result<Trajectory> {
    check_start(objective, theta0)?;
    let n = theta0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };
    let p = config.nelder_mead;
    let mut rec = Recorder::new(objective, config);

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((theta0.to_vec(), rec.estimate(theta0, 0)?));
    for i in 0..n {
        let mut v = theta0.to_vec();
        v[i] += p.initial_step;
        let f = rec.estimate(&v, 0)?;
        simplex.push((v, f));
    }

    for k in 0..config.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, fbest) = simplex[0].clone();
        rec.record(k, &best, fbest, None)?;

        let spread = simplex[n].1 - fbest;
        let size = simplex[1..]
            .iter()
            .map(|(v, _)| {
                v.iter()
                    .zip(&best)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= p.tolerance && size <= p.tolerance {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(v, _)| v[j]).sum::<f64>() / nf)
            .collect();
        let toward = |coef: f64, worst: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(worst)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };
        let worst = simplex[n].0.clone();
        let fworst = simplex[n].1;
        let fsecond = simplex[n - 1].1;

        let xr = toward(alpha, &worst);
        let fr = rec.estimate(&xr, k)?;
        if fr < fbest {
            let xe = toward(beta, &worst);
            let fe = rec.estimate(&xe, k)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < fsecond {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < fworst {
            let xc = toward(gamma, &worst);
            let fc = rec.estimate(&xc, k)?;
            (xc, fc)
        } else {
            let xc = toward(-gamma, &worst);
            let fc = rec.estimate(&xc, k)?;
            (xc, fc)
        };
        if fc < fr.min(fworst) {
            simplex[n] = (xc, fc);
            continue;
        }
        for vertex in simplex.iter_mut().skip(1) {
            let v: Vec<f64> = best
                .iter()
                .zip(&vertex.0)
                .map(|(b, x)| b + delta * (x - b))
                .collect();
            let f = rec.estimate(&v, k)?;
            *vertex = (v, f);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let last = rec.iterations();
    rec.finish(simplex.swap_remove(0).0, last)
}
