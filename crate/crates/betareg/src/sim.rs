//! Monte Carlo engine: equicorrelated Gaussian designs, beta-distributed
//! responses, and replicated estimator comparisons scored by per-coefficient
//! and total mean squared error plus exact-zero selection rates.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, Mat};
use crate::model::mean_from_eta;
use crate::pipeline::{fit_estimators, FitOptions};
use crate::rng::Rng;
use crate::estimators::EstimatorSpec;

const BOUNDARY_REDRAWS: usize = 100;

/// One simulation cell: sample size, coefficient layout, precision,
/// equicorrelation level, replication count and the estimators to compare.
#[derive(Clone, Debug)]
pub struct SimDesign {
    pub n: usize,
    pub p_slopes: usize,
    /// Trailing slopes whose true value is zero.
    pub zero_tail: usize,
    pub phi: f64,
    pub rho: f64,
    pub n_reps: usize,
    pub seed: u64,
    pub estimators: Vec<EstimatorSpec>,
    pub options: FitOptions,
}

impl SimDesign {
    pub fn validate(&self) -> Result<()> {
        if self.p_slopes == 0 || self.zero_tail >= self.p_slopes {
            return Err(Error::InvalidInput(format!(
                "zero_tail {} must be smaller than p_slopes {}",
                self.zero_tail, self.p_slopes
            )));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::InvalidInput(format!(
                "equicorrelation {} must lie in [0, 1)",
                self.rho
            )));
        }
        if self.n_reps == 0 {
            return Err(Error::InvalidInput("n_reps must be at least 1".into()));
        }
        if !(self.phi > 0.0 && self.phi.is_finite()) {
            return Err(Error::InvalidInput("phi must be positive".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidInput("no estimators requested".into()));
        }
        Ok(())
    }
}

/// Monte Carlo summary for one estimator.
#[derive(Clone, Debug)]
pub struct EstimatorSim {
    pub label: String,
    pub mse_per_coef: Vec<f64>,
    pub tmse: f64,
    pub failures: usize,
    /// Percent of replications with every truly-zero coefficient estimated
    /// exactly zero (populated when the design has a zero tail).
    pub all_zero_rate: Option<f64>,
    /// Percent with at least one truly-zero coefficient at exactly zero.
    pub any_zero_rate: Option<f64>,
}

/// Full result of [`run_experiment`].
#[derive(Clone, Debug)]
pub struct SimResult {
    pub true_beta: Vec<f64>,
    pub estimators: Vec<EstimatorSim>,
}

/// Generating coefficients: zero intercept, `zero_tail` trailing zero slopes,
/// and the remaining slopes equal with unit squared sum.
pub fn true_coefficients(p_slopes: usize, zero_tail: usize) -> Vec<f64> {
    assert!(zero_tail < p_slopes, "zero_tail must be below p_slopes");
    let active = p_slopes - zero_tail;
    let value = 1.0 / (active as f64).sqrt();
    let mut beta = vec![0.0; p_slopes + 1];
    for b in beta.iter_mut().skip(1).take(active) {
        *b = value;
    }
    beta
}

/// Draws an n x (p_slopes + 1) design: intercept column plus standard-normal
/// predictors with common pairwise correlation `rho`, built through the
/// Cholesky factor of the equicorrelation matrix.
pub fn generate_design(n: usize, p_slopes: usize, rho: f64, rng: &mut Rng) -> Result<Mat> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidInput(format!(
            "equicorrelation {rho} must lie in [0, 1)"
        )));
    }
    let mut corr = Mat::zeros(p_slopes, p_slopes);
    for i in 0..p_slopes {
        for j in 0..p_slopes {
            corr.set(i, j, if i == j { 1.0 } else { rho });
        }
    }
    let chol = cholesky(&corr, 1e-14)
        .ok_or_else(|| Error::InvalidInput("equicorrelation matrix not positive definite".into()))?;
    let mut design = Mat::zeros(n, p_slopes + 1);
    let mut raw = vec![0.0; p_slopes];
    for t in 0..n {
        design.set(t, 0, 1.0);
        for r in raw.iter_mut() {
            *r = rng.normal();
        }
        for j in 0..p_slopes {
            let mut v = 0.0;
            for k in 0..=j {
                v += chol.get(j, k) * raw[k];
            }
            design.set(t, j + 1, v);
        }
    }
    Ok(design)
}

/// Draws beta-distributed responses with mean logistic(x'beta) and precision
/// phi, redrawing (up to a cap) any draw that lands on the boundary of (0,1).
pub fn generate_response(x: &Mat, beta: &[f64], phi: f64, rng: &mut Rng) -> Result<Vec<f64>> {
    assert_eq!(x.ncols(), beta.len());
    let mut out = Vec::with_capacity(x.nrows());
    for t in 0..x.nrows() {
        let eta: f64 = x.row(t).iter().zip(beta).map(|(a, b)| a * b).sum();
        let mu = mean_from_eta(eta)?;
        let a = mu * phi;
        let b = (1.0 - mu) * phi;
        let mut accepted = None;
        for _ in 0..BOUNDARY_REDRAWS {
            let y = rng.beta(a, b);
            if y > 0.0 && y < 1.0 && y.is_finite() {
                accepted = Some(y);
                break;
            }
        }
        match accepted {
            Some(y) => out.push(y),
            None => {
                return Err(Error::BoundaryDraw {
                    observation: t,
                    attempts: BOUNDARY_REDRAWS,
                })
            }
        }
    }
    Ok(out)
}

/// Exact-zero selection percentages over per-replication zero patterns: the
/// share with every pattern entry true, and the share with at least one.
pub fn selection_rate_summary(patterns: &[Vec<bool>]) -> (f64, f64) {
    if patterns.is_empty() {
        return (0.0, 0.0);
    }
    let total = patterns.len() as f64;
    let all = patterns.iter().filter(|p| p.iter().all(|&z| z)).count() as f64;
    let any = patterns.iter().filter(|p| p.iter().any(|&z| z)).count() as f64;
    (100.0 * all / total, 100.0 * any / total)
}

/// Runs the full replication loop.
///
/// Every replication draws a fresh design and response from its own seed
/// substream and hands the identical dataset to every estimator, so
/// estimator comparisons are paired. Fits that error or do not converge are
/// counted as failures and excluded from the MSE averages; the selection
/// denominators stay at `n_reps`. A replication whose response draw exhausts
/// the boundary redraw cap (extreme means at small phi leave no headroom
/// inside (0,1) at f64 resolution) is counted as a failure for every
/// estimator rather than aborting the experiment.
pub fn run_experiment(design: &SimDesign) -> Result<SimResult> {
    design.validate()?;
    let beta_true = true_coefficients(design.p_slopes, design.zero_tail);
    let p1 = design.p_slopes + 1;
    let names: Vec<String> = std::iter::once("intercept".to_string())
        .chain((1..=design.p_slopes).map(|j| format!("x{j}")))
        .collect();

    let n_est = design.estimators.len();
    // per-replication squared-error slots, reduced sequentially afterwards
    let mut sq_errors: Vec<Vec<Option<Vec<f64>>>> = vec![vec![None; design.n_reps]; n_est];
    let mut zero_patterns: Vec<Vec<Vec<bool>>> =
        vec![vec![vec![false; design.zero_tail]; design.n_reps]; n_est];

    for rep in 0..design.n_reps {
        let mut rng = Rng::substream(design.seed, rep as u64);
        let x = generate_design(design.n, design.p_slopes, design.rho, &mut rng)?;
        let y = match generate_response(&x, &beta_true, design.phi, &mut rng) {
            Ok(y) => y,
            Err(Error::BoundaryDraw { .. }) => continue,
            Err(e) => return Err(e),
        };
        let ds = Dataset::new(x, y, names.clone())?;
        let fits = fit_estimators(&ds, &design.estimators, &design.options);
        for (e, fit) in fits.into_iter().enumerate() {
            if let Ok(result) = fit {
                if result.converged {
                    let errs: Vec<f64> = result
                        .coef
                        .beta
                        .iter()
                        .zip(&beta_true)
                        .map(|(est, tr)| (est - tr) * (est - tr))
                        .collect();
                    sq_errors[e][rep] = Some(errs);
                    for (i, slot) in zero_patterns[e][rep].iter_mut().enumerate() {
                        let col = p1 - design.zero_tail + i;
                        *slot = result.coef.beta[col] == 0.0;
                    }
                }
            }
        }
    }

    let mut estimators = Vec::with_capacity(n_est);
    for (e, spec) in design.estimators.iter().enumerate() {
        let succeeded: Vec<&Vec<f64>> = sq_errors[e].iter().flatten().collect();
        let failures = design.n_reps - succeeded.len();
        if succeeded.is_empty() {
            return Err(Error::DegenerateFit(format!(
                "estimator {} failed in every replication",
                spec.label()
            )));
        }
        let mut mse = vec![0.0; p1];
        for errs in &succeeded {
            for (m, s) in mse.iter_mut().zip(errs.iter()) {
                *m += s;
            }
        }
        for m in mse.iter_mut() {
            *m /= succeeded.len() as f64;
        }
        let tmse = mse.iter().sum();
        let (all_zero_rate, any_zero_rate) = if design.zero_tail > 0 {
            let (all, any) = selection_rate_summary(&zero_patterns[e]);
            (Some(all), Some(any))
        } else {
            (None, None)
        };
        estimators.push(EstimatorSim {
            label: spec.label(),
            mse_per_coef: mse,
            tmse,
            failures,
            all_zero_rate,
            any_zero_rate,
        });
    }

    Ok(SimResult {
        true_beta: beta_true,
        estimators,
    })
}
