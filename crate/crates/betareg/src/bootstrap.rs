//! Nonparametric pairs bootstrap for coefficient uncertainty: rows are
//! resampled with replacement, the estimator is refitted, and t-values plus a
//! bootstrap total MSE (centered at the full-sample estimate) are reported.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::estimators::EstimatorSpec;
use crate::pipeline::{fit_estimator, FitOptions};
use crate::rng::Rng;

/// Bootstrap summary for one estimator.
#[derive(Clone, Debug)]
pub struct BootstrapMetrics {
    pub label: String,
    /// Full-sample estimates on the original variable scale.
    pub estimates: Vec<f64>,
    pub phi: f64,
    /// Bootstrap standard deviation per coefficient (denominator B-1).
    pub sd: Vec<f64>,
    /// estimate / bootstrap sd; infinite when the sd is exactly zero.
    pub t_values: Vec<f64>,
    /// Sum over coefficients of the mean squared bootstrap deviation from
    /// the full-sample estimate.
    pub tmse: f64,
    pub resamples: usize,
    /// Resamples redrawn because their fit failed to converge.
    pub redraws: usize,
}

/// Runs a pairs bootstrap with `resamples` accepted replicates.
///
/// Each attempt draws from its own seed substream, so results are
/// deterministic for a given seed even when failed resamples are redrawn.
/// The total attempt budget is twice the requested resamples.
pub fn bootstrap_metrics(
    ds: &Dataset,
    spec: &EstimatorSpec,
    resamples: usize,
    seed: u64,
    opts: &FitOptions,
) -> Result<BootstrapMetrics> {
    if resamples == 0 {
        return Err(Error::InvalidInput("bootstrap needs at least 1 resample".into()));
    }
    let full = fit_estimator(ds, spec, opts)?;
    let n = ds.n();
    let p1 = ds.n_params();
    let cap = 2 * resamples;
    let mut attempts = 0usize;
    let mut accepted: Vec<Vec<f64>> = Vec::with_capacity(resamples);

    while accepted.len() < resamples {
        if attempts >= cap {
            return Err(Error::RedrawCapExceeded {
                attempts,
                requested: resamples,
            });
        }
        let mut rng = Rng::substream(seed, attempts as u64);
        attempts += 1;
        let rows: Vec<usize> = (0..n).map(|_| rng.below(n)).collect();
        let resample = match ds.select_rows(&rows) {
            Ok(r) => r,
            Err(_) => continue,
        };
        match fit_estimator(&resample, spec, opts) {
            Ok(fit) if fit.converged => accepted.push(fit.coef.beta),
            _ => continue,
        }
    }

    let b = accepted.len() as f64;
    let mut sd = Vec::with_capacity(p1);
    let mut tmse = 0.0;
    for j in 0..p1 {
        let mean_j = accepted.iter().map(|r| r[j]).sum::<f64>() / b;
        let ss: f64 = accepted.iter().map(|r| (r[j] - mean_j) * (r[j] - mean_j)).sum();
        let var = if accepted.len() > 1 { ss / (b - 1.0) } else { 0.0 };
        sd.push(var.sqrt());
        let dev: f64 = accepted
            .iter()
            .map(|r| (r[j] - full.coef.beta[j]) * (r[j] - full.coef.beta[j]))
            .sum();
        tmse += dev / b;
    }
    let t_values = full
        .coef
        .beta
        .iter()
        .zip(&sd)
        .map(|(est, s)| if *s == 0.0 { est.signum() * f64::INFINITY } else { est / s })
        .collect();

    Ok(BootstrapMetrics {
        label: spec.label(),
        estimates: full.coef.beta.clone(),
        phi: full.coef.phi,
        sd,
        t_values,
        tmse,
        resamples: accepted.len(),
        redraws: attempts - accepted.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::linalg::Mat;
    use crate::model::mean_from_eta;
    use crate::rng::Rng;

    fn simulated(seed: u64, n: usize, beta: &[f64], phi: f64) -> Dataset {
        let mut rng = Rng::new(seed);
        let p = beta.len() - 1;
        let mut rows = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let mut row = vec![1.0];
            row.extend((0..p).map(|_| rng.normal()));
            let eta: f64 = row.iter().zip(beta).map(|(x, b)| x * b).sum();
            let mu = mean_from_eta(eta).unwrap();
            let mut y = rng.beta(mu * phi, (1.0 - mu) * phi);
            while !(y > 0.0 && y < 1.0) {
                y = rng.beta(mu * phi, (1.0 - mu) * phi);
            }
            rows.push(row);
            ys.push(y);
        }
        let names = std::iter::once("intercept".to_string())
            .chain((0..p).map(|j| format!("x{j}")))
            .collect();
        Dataset::new(Mat::from_rows(&rows).unwrap(), ys, names).unwrap()
    }

    #[test]
    fn same_seed_gives_identical_metrics() {
        let ds = simulated(1, 60, &[0.2, 0.5, -0.3], 6.0);
        let opts = FitOptions::default();
        let a = bootstrap_metrics(&ds, &EstimatorSpec::Ml, 50, 7, &opts).unwrap();
        let b = bootstrap_metrics(&ds, &EstimatorSpec::Ml, 50, 7, &opts).unwrap();
        assert_eq!(a.sd, b.sd);
        assert_eq!(a.t_values, b.t_values);
        assert_eq!(a.tmse, b.tmse);
    }

    #[test]
    fn zero_sd_flags_infinite_t_value() {
        // a single resample has no spread: sd 0, t-values flagged infinite
        let ds = simulated(5, 40, &[0.3, 0.6], 6.0);
        let m = bootstrap_metrics(&ds, &EstimatorSpec::Ml, 1, 11, &FitOptions::default()).unwrap();
        assert!(m.sd.iter().all(|s| *s == 0.0));
        assert!(m.t_values.iter().all(|t| t.is_infinite()));
    }

    #[test]
    fn sds_are_positive_and_shrink_with_information() {
        let ds = simulated(2, 120, &[0.2, 0.5], 8.0);
        let opts = FitOptions::default();
        let m = bootstrap_metrics(&ds, &EstimatorSpec::Ml, 60, 3, &opts).unwrap();
        assert!(m.sd.iter().all(|s| *s > 0.0));
        assert!(m.tmse > 0.0);
        assert_eq!(m.resamples, 60);
        // slope t-value should be clearly significant for this strong signal
        assert!(m.t_values[1].abs() > 2.0);
    }
}
