//! Coordinate-descent lasso on the local weighted quadratic approximation of
//! the log-likelihood, with the precision re-optimized after every sweep and
//! the penalty chosen by out-of-fold likelihood cross-validation.

use crate::dataset::{Coefficients, Dataset};
use crate::error::{Error, Result};
use crate::model::{log_likelihood, working_quantities, WorkingQuantities};
use crate::special::{digamma, soft_threshold, trigamma};

use super::{fit_ml, FitResult, LassoConfig, Method};

const ML_TOL: f64 = 1e-8;
const ML_MAX_ITER: usize = 100;

/// Working response `z = eta + W^-1 T (ystar - mustar)`.
///
/// This is the Newton linearization `eta - l''(eta)^-1 l'(eta)` with
/// `l'(eta) = phi T (ystar - mustar)` and `l''(eta) = -phi W`; the correction
/// therefore enters with a plus sign.
pub fn working_response(wq: &WorkingQuantities) -> Vec<f64> {
    wq.eta
        .iter()
        .zip(&wq.t_diag)
        .zip(&wq.w_diag)
        .zip(wq.ystar.iter().zip(&wq.mustar))
        .map(|(((eta, t), w), (ys, ms))| eta + t / w * (ys - ms))
        .collect()
}

/// Single-coordinate penalized update: the exact minimizer of the local
/// one-dimensional quadratic plus `k |beta_j|`, holding every other
/// coefficient at its current value. Pass k = 0 for unpenalized columns.
pub fn coordinate_update(
    ds: &Dataset,
    wq: &WorkingQuantities,
    beta: &[f64],
    j: usize,
    k: f64,
    phi: f64,
) -> Result<f64> {
    let n = ds.n() as f64;
    let z = working_response(wq);
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, zt) in z.iter().enumerate() {
        let x = ds.design().get(t, j);
        let w = wq.w_diag[t];
        let mut partial = 0.0;
        for (jj, b) in beta.iter().enumerate() {
            if jj != j {
                partial += ds.design().get(t, jj) * b;
            }
        }
        num += w * x * (zt - partial);
        den += w * x * x;
    }
    num *= phi / n;
    den *= phi / n;
    if den == 0.0 {
        return Err(Error::ZeroCurvature { column: j });
    }
    Ok(soft_threshold(num, k) / den)
}

/// Re-optimizes the precision with the slopes held fixed. The penalty is
/// constant in phi, so this maximizes the log-likelihood over phi > 0 by a
/// safeguarded Newton ascent; if no improving step exists the current value
/// is returned unchanged.
pub fn update_phi_penalized(
    ds: &Dataset,
    beta: &[f64],
    _k: f64,
    phi_current: f64,
) -> Result<f64> {
    let n = ds.n();
    let coef = Coefficients::new(beta.to_vec(), phi_current)?;
    let wq = working_quantities(ds, &coef)?;
    let mu = wq.mu;
    let ln_y: Vec<f64> = ds.response().iter().map(|y| y.ln()).collect();
    let ln_1my: Vec<f64> = ds.response().iter().map(|y| (1.0 - y).ln()).collect();
    let ystar = wq.ystar;

    let loglik_at = |phi: f64| -> Result<f64> {
        let lg_phi = crate::special::log_gamma(phi)?;
        let mut total = 0.0;
        for t in 0..n {
            let a = mu[t] * phi;
            let b = (1.0 - mu[t]) * phi;
            total += lg_phi - crate::special::log_gamma(a)? - crate::special::log_gamma(b)?
                + (a - 1.0) * ln_y[t]
                + (b - 1.0) * ln_1my[t];
        }
        Ok(total)
    };

    // score and expected information in phi at fixed mu
    let derivatives_at = |phi: f64| -> Result<(f64, f64)> {
        let psi_phi = digamma(phi)?;
        let tri_phi = trigamma(phi)?;
        let mut u = 0.0;
        let mut info = 0.0;
        for t in 0..n {
            let a = mu[t] * phi;
            let b = (1.0 - mu[t]) * phi;
            let mustar = digamma(a)? - digamma(b)?;
            u += psi_phi - digamma(b)? + mu[t] * (ystar[t] - mustar) + ln_1my[t];
            info += mu[t] * mu[t] * trigamma(a)?
                + (1.0 - mu[t]) * (1.0 - mu[t]) * trigamma(b)?
                - tri_phi;
        }
        Ok((u, info))
    };

    let mut phi = phi_current;
    let mut ll = loglik_at(phi)?;
    for _ in 0..50 {
        let (u, info) = derivatives_at(phi)?;
        if !u.is_finite() || !info.is_finite() {
            break;
        }
        let delta = if info > 0.0 { u / info } else { u.signum() * 0.5 * phi };
        if delta == 0.0 {
            break;
        }
        let mut step = delta;
        let mut accepted = 0.0;
        for _ in 0..30 {
            let cand = phi + step;
            if cand > 0.0 {
                if let Ok(cand_ll) = loglik_at(cand) {
                    if cand_ll.is_finite() && cand_ll >= ll {
                        phi = cand;
                        ll = cand_ll;
                        accepted = step;
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        if accepted == 0.0 {
            break;
        }
        if accepted.abs() < 1e-9 * (1.0 + phi) {
            break;
        }
    }
    Ok(phi)
}

/// Penalty at or above which every penalized coefficient is driven to an
/// exact zero: `max_j |(phi/n) X_j' W z|` evaluated at the initializer.
pub fn universal_penalty(ds: &Dataset, ml: &FitResult, cfg: &LassoConfig) -> Result<f64> {
    let wq = working_quantities(ds, &ml.coef)?;
    let z = working_response(&wq);
    let n = ds.n() as f64;
    let phi = ml.coef.phi;
    let first = if cfg.penalize_intercept { 0 } else { 1 };
    let mut k_max = 0.0f64;
    for j in first..ds.n_params() {
        let mut s = 0.0;
        for (t, zt) in z.iter().enumerate() {
            s += wq.w_diag[t] * ds.design().get(t, j) * zt;
        }
        k_max = k_max.max((phi / n * s).abs());
    }
    Ok(k_max)
}

/// Coordinate-descent lasso fit at penalty `k`, initialized at the
/// maximum-likelihood estimate.
pub fn fit_lasso(ds: &Dataset, k: f64, cfg: &LassoConfig, ml: &FitResult) -> Result<FitResult> {
    fit_lasso_from(ds, k, cfg, &ml.coef)
}

/// Coordinate-descent lasso fit from an explicit start (used for warm starts
/// along a descending penalty grid).
///
/// Each sweep refreshes the weights and working response at the current
/// (beta, phi), cycles through all columns in order (the intercept
/// unpenalized unless configured otherwise), then re-optimizes phi.
/// Terminates when the largest coordinate change falls below `cfg.tol`.
pub fn fit_lasso_from(
    ds: &Dataset,
    k: f64,
    cfg: &LassoConfig,
    start: &Coefficients,
) -> Result<FitResult> {
    cfg.validate()?;
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "lasso penalty must be finite and nonnegative, got {k}"
        )));
    }
    let n = ds.n();
    let nf = n as f64;
    let mut beta = start.beta.clone();
    let mut phi = start.phi;
    let mut converged = false;
    let mut degenerate = false;
    let mut sweeps = 0usize;

    for sweep in 1..=cfg.max_sweeps {
        let coef = Coefficients::new(beta.clone(), phi)?;
        let wq = working_quantities(ds, &coef)?;
        let z = working_response(&wq);
        let xb = ds.design().mat_vec(&beta);
        let mut resid: Vec<f64> = z.iter().zip(&xb).map(|(zi, xi)| zi - xi).collect();

        let mut max_delta = 0.0f64;
        for (j, bj) in beta.iter_mut().enumerate() {
            let kj = if j == 0 && !cfg.penalize_intercept {
                0.0
            } else {
                k
            };
            let mut num = 0.0;
            let mut den = 0.0;
            for t in 0..n {
                let x = ds.design().get(t, j);
                let w = wq.w_diag[t];
                num += w * x * (resid[t] + x * *bj);
                den += w * x * x;
            }
            num *= phi / nf;
            den *= phi / nf;
            let new_bj = if den == 0.0 {
                degenerate = true;
                0.0
            } else {
                soft_threshold(num, kj) / den
            };
            let delta = new_bj - *bj;
            if delta != 0.0 {
                for (t, r) in resid.iter_mut().enumerate() {
                    *r -= ds.design().get(t, j) * delta;
                }
            }
            max_delta = max_delta.max(delta.abs());
            *bj = new_bj;
        }

        phi = update_phi_penalized(ds, &beta, k, phi)?;
        sweeps = sweep;
        if max_delta < cfg.tol {
            converged = true;
            break;
        }
    }

    let coef = Coefficients::new(beta, phi)?;
    let loglik = log_likelihood(ds, &coef)?;
    Ok(FitResult {
        coef,
        coef_standardized: None,
        method: Method::Lasso,
        penalty_k: k,
        iterations: sweeps,
        converged,
        degenerate,
        loglik,
    })
}

/// One point of the cross-validation loss curve.
#[derive(Clone, Debug)]
pub struct CvPoint {
    pub k: f64,
    /// Mean out-of-fold negative log-likelihood per held-out row.
    pub mean_loss: f64,
    /// Standard deviation of the per-fold mean losses.
    pub fold_sd: f64,
}

/// Outcome of the penalty cross-validation.
#[derive(Clone, Debug)]
pub struct CvSelection {
    /// The chosen penalty (see [`super::CvRule`]).
    pub k: f64,
    /// Loss curve in grid order.
    pub curve: Vec<CvPoint>,
    /// Folds dropped because their training fit failed.
    pub skipped_folds: usize,
}

/// Cross-validates the lasso penalty over a descending grid.
///
/// Folds are assigned deterministically by row index modulo `cv_folds`.
/// Held-out rows are scored by the negative log-likelihood at the fold fit's
/// own coefficients and precision; fits are warm-started down the grid
/// within each fold. The configured [`super::CvRule`] turns the loss curve
/// into a single penalty.
pub fn select_lasso_k_cv(ds: &Dataset, cfg: &LassoConfig) -> Result<CvSelection> {
    cfg.validate()?;
    let n = ds.n();
    if cfg.cv_folds > n {
        return Err(Error::InvalidInput(format!(
            "{} folds exceed {} observations",
            cfg.cv_folds, n
        )));
    }
    let ml_full = fit_ml(ds, ML_TOL, ML_MAX_ITER)?;
    let grid: Vec<f64> = if cfg.k_grid.is_empty() {
        default_grid(ds, &ml_full, cfg)?
    } else {
        cfg.k_grid.clone()
    };
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }

    let folds = cfg.cv_folds;
    // per-penalty, per-fold mean loss on that fold's held-out rows
    let mut fold_loss: Vec<Vec<f64>> = vec![Vec::with_capacity(folds); grid.len()];
    let mut skipped = 0usize;

    for fold in 0..folds {
        let train_rows: Vec<usize> = (0..n).filter(|t| t % folds != fold).collect();
        let test_rows: Vec<usize> = (0..n).filter(|t| t % folds == fold).collect();
        let train = ds.select_rows(&train_rows)?;
        let test = ds.select_rows(&test_rows)?;
        let ml_fold = match fit_ml(&train, ML_TOL, ML_MAX_ITER) {
            Ok(fit) => fit,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        let mut warm = ml_fold.coef.clone();
        for (i, &k) in grid.iter().enumerate() {
            let loss = match fit_lasso_from(&train, k, cfg, &warm) {
                Ok(fit) => {
                    warm = fit.coef.clone();
                    match log_likelihood(&test, &fit.coef) {
                        Ok(ll) if ll.is_finite() => -ll / test.n() as f64,
                        _ => f64::INFINITY,
                    }
                }
                Err(_) => f64::INFINITY,
            };
            fold_loss[i].push(loss);
        }
    }

    if skipped == folds {
        return Err(Error::AllFoldsSkipped(folds));
    }

    let curve: Vec<CvPoint> = grid
        .iter()
        .zip(&fold_loss)
        .map(|(&k, losses)| {
            let m = losses.len() as f64;
            let mean = losses.iter().sum::<f64>() / m;
            let fold_sd = if losses.len() > 1 && mean.is_finite() {
                (losses.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / (m - 1.0)).sqrt()
            } else {
                0.0
            };
            CvPoint { k, mean_loss: mean, fold_sd }
        })
        .collect();

    // loss minimizer; strict improvement keeps the larger penalty on ties
    let mut best_idx = None;
    for (i, point) in curve.iter().enumerate() {
        if point.mean_loss.is_finite()
            && best_idx.is_none_or(|b: usize| point.mean_loss < curve[b].mean_loss)
        {
            best_idx = Some(i);
        }
    }
    let best_idx = best_idx.ok_or(Error::DegenerateFit(
        "cross-validation produced no finite loss".into(),
    ))?;
    let chosen = match cfg.cv_rule {
        super::CvRule::Min => best_idx,
        rule => {
            let spread = match rule {
                super::CvRule::WithinFoldSd => curve[best_idx].fold_sd,
                _ => curve[best_idx].fold_sd / (fold_loss[best_idx].len() as f64).sqrt(),
            };
            let ceiling = curve[best_idx].mean_loss + spread;
            // grid is descending, so the first point under the ceiling is the
            // largest acceptable penalty
            curve
                .iter()
                .position(|p| p.mean_loss <= ceiling)
                .unwrap_or(best_idx)
        }
    };
    Ok(CvSelection {
        k: grid[chosen],
        curve,
        skipped_folds: skipped,
    })
}

/// Default grid: 50 log-spaced penalties from the universal threshold down
/// to 1e-4 times it.
fn default_grid(ds: &Dataset, ml: &FitResult, cfg: &LassoConfig) -> Result<Vec<f64>> {
    let k_max = universal_penalty(ds, ml, cfg)?;
    if !(k_max > 0.0 && k_max.is_finite()) {
        return Err(Error::EmptyGrid);
    }
    let points = 50usize;
    Ok((0..points)
        .map(|i| k_max * 10f64.powf(-4.0 * i as f64 / (points - 1) as f64))
        .collect())
}
