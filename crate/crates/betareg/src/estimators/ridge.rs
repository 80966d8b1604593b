//! Closed-form ridge shrinkage of the maximum-likelihood estimate, with the
//! shrinkage parameter chosen from the eigenstructure of the weighted Gram
//! matrix.

use crate::dataset::{Coefficients, Dataset};
use crate::error::{Error, Result};
use crate::linalg::{solve_sym, sym_eigen, Mat, PIVOT_TOL};
use crate::model::{log_likelihood, working_quantities};

use super::{FitResult, Method, RidgeSelector};

/// Shrinkage parameter from canonical quantities: `lambdas` are the
/// eigenvalues (descending) of the slope block of X'WX and `gammas` the
/// maximum-likelihood slopes rotated into that eigenbasis.
pub fn ridge_k_from_canonical(
    selector: &RidgeSelector,
    phi: f64,
    lambdas: &[f64],
    gammas: &[f64],
) -> Result<f64> {
    selector.validate()?;
    if let RidgeSelector::Fixed(k) = selector {
        return Ok(*k);
    }
    let sq: Vec<f64> = gammas.iter().map(|g| g * g).collect();
    let nonzero: Vec<f64> = sq.iter().copied().filter(|&g| g > 0.0).collect();
    if nonzero.is_empty() {
        return Err(Error::DegenerateGamma);
    }
    let g_max = nonzero.iter().fold(0.0f64, |m, &g| m.max(g));
    let g_min = nonzero.iter().fold(f64::INFINITY, |m, g| m.min(*g));
    let k = match selector {
        RidgeSelector::Hk => 1.0 / (phi * g_max),
        RidgeSelector::Med => {
            let mut vals: Vec<f64> = nonzero.iter().map(|g| (1.0 / (phi * g)).sqrt()).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let m = vals.len();
            if m % 2 == 1 {
                vals[m / 2]
            } else {
                0.5 * (vals[m / 2 - 1] + vals[m / 2])
            }
        }
        RidgeSelector::Max => {
            let lambda_max = lambdas.iter().fold(f64::NEG_INFINITY, |m, l| m.max(*l));
            lambda_max / (phi * g_max)
        }
        RidgeSelector::Min => {
            let lambda_min = lambdas.iter().fold(f64::INFINITY, |m, l| m.min(*l));
            lambda_min / (phi * g_min)
        }
        RidgeSelector::Fixed(_) => unreachable!(),
    };
    Ok(k.max(0.0))
}

/// Picks the shrinkage parameter for the given selector from the eigenvalues
/// of the intercept-free block of X'WX (W at the maximum-likelihood solution)
/// and the rotated maximum-likelihood slopes.
pub fn select_ridge_k(selector: &RidgeSelector, ml: &FitResult, ds: &Dataset) -> Result<f64> {
    selector.validate()?;
    if let RidgeSelector::Fixed(k) = selector {
        return Ok(*k);
    }
    let p1 = ds.n_params();
    if p1 < 2 {
        return Err(Error::InvalidInput(
            "shrinkage selectors need at least one slope".into(),
        ));
    }
    let wq = working_quantities(ds, &ml.coef)?;
    let gram = ds.design().xt_w_x(&wq.w_diag);
    let slope_idx: Vec<usize> = (1..p1).collect();
    let slopes_gram = gram.principal_submatrix(&slope_idx);
    let (lambdas, q) = sym_eigen(&slopes_gram);
    let p = slope_idx.len();
    let mut gammas = vec![0.0; p];
    for (j, g) in gammas.iter_mut().enumerate() {
        for i in 0..p {
            *g += q.get(i, j) * ml.coef.beta[i + 1];
        }
    }
    ridge_k_from_canonical(selector, ml.coef.phi, &lambdas, &gammas)
}

/// Ridge estimate `(X'WX + kI)^-1 X'WX beta_ml` with W evaluated at the
/// maximum-likelihood solution and phi held at its ML value.
///
/// Expects `ml` fitted on this (typically standardized) dataset; scale
/// back-transformation is the pipeline's job. The degenerate flag can only
/// arise at k = 0 on a rank-deficient design, where the pseudo-inverse is
/// used.
pub fn fit_ridge(ds: &Dataset, selector: &RidgeSelector, ml: &FitResult) -> Result<FitResult> {
    let k = select_ridge_k(selector, ml, ds)?;
    let p1 = ds.n_params();
    let wq = working_quantities(ds, &ml.coef)?;
    let gram = ds.design().xt_w_x(&wq.w_diag);
    let rhs = gram.mat_vec(&ml.coef.beta);
    let mut system = Mat::zeros(p1, p1);
    for i in 0..p1 {
        for j in 0..p1 {
            system.set(i, j, gram.get(i, j));
        }
        system.set(i, i, gram.get(i, i) + k);
    }
    let solve = solve_sym(&system, &rhs, PIVOT_TOL)?;
    let coef = Coefficients::new(solve.solution, ml.coef.phi)?;
    let loglik = log_likelihood(ds, &coef)?;
    Ok(FitResult {
        coef,
        coef_standardized: None,
        method: Method::Ridge,
        penalty_k: k,
        iterations: 1,
        converged: ml.converged,
        degenerate: solve.degenerate,
        loglik,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::estimators::fit_ml;
    use crate::linalg::Mat;
    use crate::model::mean_from_eta;
    use crate::rng::Rng;

    fn simulated(seed: u64, n: usize, beta: &[f64], phi: f64, rho: f64) -> Dataset {
        let mut rng = Rng::new(seed);
        let p = beta.len() - 1;
        let mut rows = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let shared = rng.normal();
            let mut row = vec![1.0];
            row.extend(
                (0..p).map(|_| rho.sqrt() * shared + (1.0 - rho).sqrt() * rng.normal()),
            );
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
    fn canonical_formulas() {
        // phi = 1, gamma = (2, 1, 1) -> k_hk = 1/4
        let k = ridge_k_from_canonical(&RidgeSelector::Hk, 1.0, &[3.0, 2.0, 1.0], &[2.0, 1.0, 1.0])
            .unwrap();
        assert!((k - 0.25).abs() < 1e-15);
        // phi = 1, gamma = (1, 1, 1) -> k_med = 1
        let k = ridge_k_from_canonical(&RidgeSelector::Med, 1.0, &[3.0, 2.0, 1.0], &[1.0, 1.0, 1.0])
            .unwrap();
        assert!((k - 1.0).abs() < 1e-15);
        // k_max and k_min with distinct entries
        let k = ridge_k_from_canonical(&RidgeSelector::Max, 2.0, &[5.0, 1.0], &[3.0, 0.5]).unwrap();
        assert!((k - 5.0 / (2.0 * 9.0)).abs() < 1e-15);
        let k = ridge_k_from_canonical(&RidgeSelector::Min, 2.0, &[5.0, 1.0], &[3.0, 0.5]).unwrap();
        assert!((k - 1.0 / (2.0 * 0.25)).abs() < 1e-15);
        // zeros excluded; all-zero errors
        let k = ridge_k_from_canonical(&RidgeSelector::Med, 1.0, &[2.0, 1.0], &[0.0, 2.0]).unwrap();
        assert!((k - 0.5).abs() < 1e-15);
        assert!(matches!(
            ridge_k_from_canonical(&RidgeSelector::Hk, 1.0, &[2.0, 1.0], &[0.0, 0.0]),
            Err(Error::DegenerateGamma)
        ));
        // fixed passes through
        let k = ridge_k_from_canonical(&RidgeSelector::Fixed(0.37), 1.0, &[1.0], &[1.0]).unwrap();
        assert_eq!(k, 0.37);
    }

    #[test]
    fn zero_penalty_reproduces_ml() {
        for seed in [1u64, 2, 3] {
            let ds = simulated(seed, 40, &[0.1, 0.5, -0.3], 5.0, 0.3);
            let ml = fit_ml(&ds, 1e-8, 100).unwrap();
            let ridge = fit_ridge(&ds, &RidgeSelector::Fixed(0.0), &ml).unwrap();
            for (r, m) in ridge.coef.beta.iter().zip(&ml.coef.beta) {
                assert!((r - m).abs() < 1e-10, "{r} vs {m}");
            }
        }
    }

    #[test]
    fn huge_penalty_shrinks_everything() {
        let ds = simulated(5, 40, &[0.1, 0.5, -0.3], 5.0, 0.3);
        let ml = fit_ml(&ds, 1e-8, 100).unwrap();
        let ridge = fit_ridge(&ds, &RidgeSelector::Fixed(1e12), &ml).unwrap();
        for b in &ridge.coef.beta {
            assert!(b.abs() < 1e-6, "coefficient {b} not shrunk");
        }
    }

    #[test]
    fn coefficient_norm_is_nonincreasing_in_k() {
        let ds = simulated(9, 50, &[0.2, 0.6, -0.4, 0.3], 4.0, 0.8);
        let ml = fit_ml(&ds, 1e-8, 100).unwrap();
        let mut last = f64::INFINITY;
        for i in 0..50 {
            let k = 1e-3 * (10f64).powf(5.0 * i as f64 / 49.0);
            let fit = fit_ridge(&ds, &RidgeSelector::Fixed(k), &ml).unwrap();
            let norm: f64 = fit.coef.beta.iter().map(|b| b * b).sum::<f64>().sqrt();
            assert!(norm <= last + 1e-10, "norm increased at k={k}");
            last = norm;
        }
    }

    #[test]
    fn ridge_path_is_continuous_in_k() {
        let ds = simulated(12, 40, &[0.0, 0.5, -0.5], 5.0, 0.6);
        let ml = fit_ml(&ds, 1e-8, 100).unwrap();
        let mut prev: Option<Vec<f64>> = None;
        for i in 0..100 {
            let k = 0.5 * i as f64 / 99.0;
            let fit = fit_ridge(&ds, &RidgeSelector::Fixed(k), &ml).unwrap();
            if let Some(p) = prev {
                let jump: f64 = fit
                    .coef
                    .beta
                    .iter()
                    .zip(&p)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                assert!(jump < 0.05, "discontinuity at k={k}: {jump}");
            }
            prev = Some(fit.coef.beta.clone());
        }
    }

    #[test]
    fn rank_deficient_design_is_regularized_at_positive_k() {
        // duplicated predictor: singular at k = 0 (pseudo-inverse, flagged),
        // an ordinary solve at any k > 0
        let base = simulated(21, 30, &[0.1, 0.5], 5.0, 0.0);
        let mut rows = Vec::new();
        for t in 0..base.n() {
            let r = base.design().row(t);
            rows.push(vec![r[0], r[1], r[1]]);
        }
        let ds = Dataset::new(
            Mat::from_rows(&rows).unwrap(),
            base.response().to_vec(),
            vec!["intercept".into(), "x".into(), "x_copy".into()],
        )
        .unwrap();
        let ml = fit_ml(&ds, 1e-8, 100).unwrap();
        assert!(ml.degenerate);
        let at_zero = fit_ridge(&ds, &RidgeSelector::Fixed(0.0), &ml).unwrap();
        assert!(at_zero.degenerate);
        let regularized = fit_ridge(&ds, &RidgeSelector::Fixed(0.05), &ml).unwrap();
        assert!(!regularized.degenerate);
        assert!(regularized.coef.beta.iter().all(|b| b.is_finite()));
    }

    #[test]
    fn selectors_produce_positive_penalties() {
        let ds = simulated(14, 60, &[0.1, 0.4, -0.2, 0.3], 5.0, 0.7);
        let ml = fit_ml(&ds, 1e-8, 100).unwrap();
        for sel in [
            RidgeSelector::Hk,
            RidgeSelector::Med,
            RidgeSelector::Max,
            RidgeSelector::Min,
        ] {
            let k = select_ridge_k(&sel, &ml, &ds).unwrap();
            assert!(k > 0.0 && k.is_finite(), "{sel:?} gave {k}");
        }
    }
}
