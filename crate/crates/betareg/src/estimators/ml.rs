//! Maximum-likelihood fitting by Fisher scoring over the joint parameter
//! (beta, phi), with step-halving to keep the log-likelihood nondecreasing
//! and the precision positive.

use crate::dataset::{Coefficients, Dataset};
use crate::error::Result;
use crate::linalg::{solve_sym, PIVOT_TOL};
use crate::model::{fisher_from, log_likelihood, mean_from_eta, score_from, working_quantities};

use super::{FitResult, Method};

const MAX_HALVINGS: usize = 20;
const PHI_FLOOR: f64 = 0.1;
const PHI_START_CAP: f64 = 1e4;
/// Relative step size below which the ascent check is skipped.
const BASIN_STEP: f64 = 1e-5;

/// Starting values: least squares of logit(y) on the design for the slopes,
/// and a moment-style precision estimate mapped through the link derivative.
/// Falls back to beta = 0, phi = 1 when the least-squares system is singular.
pub fn initial_values(ds: &Dataset) -> Coefficients {
    let n = ds.n();
    let p1 = ds.n_params();
    let z: Vec<f64> = ds.response().iter().map(|y| (y / (1.0 - y)).ln()).collect();
    let ones = vec![1.0; n];
    let xtx = ds.design().xt_w_x(&ones);
    let xtz = ds.design().xt_w_v(&ones, &z);

    let beta = match solve_sym(&xtx, &xtz, PIVOT_TOL) {
        Ok(s) if !s.degenerate && s.solution.iter().all(|b| b.is_finite()) => s.solution,
        _ => return Coefficients::new(vec![0.0; p1], 1.0).expect("fallback start"),
    };

    // Residual variance on the link scale, then phi_t = mu(1-mu)/sigma_t^2 - 1
    // with sigma_t^2 = s^2 (mu(1-mu))^2 for the logit link.
    let eta = ds.design().mat_vec(&beta);
    let rss: f64 = eta.iter().zip(&z).map(|(e, zi)| (zi - e) * (zi - e)).sum();
    let dof = if n > p1 { (n - p1) as f64 } else { n as f64 };
    let s2 = (rss / dof).max(1e-12);
    let mut phi_sum = 0.0;
    let mut phi_terms = 0usize;
    for &e in &eta {
        if let Ok(mu) = mean_from_eta(e) {
            let tt = mu * (1.0 - mu);
            if tt > 0.0 {
                phi_sum += 1.0 / (s2 * tt) - 1.0;
                phi_terms += 1;
            }
        }
    }
    let phi = if phi_terms == 0 {
        1.0
    } else {
        (phi_sum / phi_terms as f64).clamp(PHI_FLOOR, PHI_START_CAP)
    };
    match Coefficients::new(beta, phi) {
        Ok(c) => c,
        Err(_) => Coefficients::new(vec![0.0; p1], 1.0).expect("fallback start"),
    }
}

/// Fisher-scoring maximum likelihood fit starting from [`initial_values`].
pub fn fit_ml(ds: &Dataset, tol: f64, max_iter: usize) -> Result<FitResult> {
    let start = initial_values(ds);
    fit_ml_from(ds, &start, tol, max_iter)
}

/// Fisher-scoring maximum likelihood fit from an explicit starting point.
///
/// Converges when the relative parameter change or the score sup-norm drops
/// below `tol`; every accepted step keeps the log-likelihood nondecreasing.
/// Non-convergence is reported through the `converged` flag, not an error.
pub fn fit_ml_from(
    ds: &Dataset,
    start: &Coefficients,
    tol: f64,
    max_iter: usize,
) -> Result<FitResult> {
    let p1 = ds.n_params();
    let mut coef = start.clone();
    let mut loglik = match log_likelihood(ds, &coef) {
        Ok(ll) if ll.is_finite() => ll,
        _ => {
            // wild start (e.g. separation in the least-squares init): restart flat
            coef = Coefficients::new(vec![0.0; p1], 1.0).expect("flat start");
            log_likelihood(ds, &coef)?
        }
    };

    let mut converged = false;
    let mut degenerate = false;
    let mut iterations = 0usize;

    while iterations < max_iter {
        let wq = working_quantities(ds, &coef)?;
        let u = score_from(ds, &coef, &wq)?;
        let sup_norm = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if sup_norm < tol {
            converged = true;
            break;
        }
        let info = fisher_from(ds, &coef, &wq);
        let solve = solve_sym(&info, &u, PIVOT_TOL)?;
        degenerate |= solve.degenerate;
        let step = solve.solution;

        let rel_step = step
            .iter()
            .zip(coef.beta.iter().chain(std::iter::once(&coef.phi)))
            .map(|(s, old)| s.abs() / (1.0 + old.abs()))
            .fold(0.0f64, f64::max);

        // Inside the quadratic basin likelihood gains fall below f64
        // resolution, so ascent checks would spuriously stall; the plain
        // Fisher step is contractive there and drives the score to zero.
        if rel_step < BASIN_STEP {
            let mut beta = coef.beta.clone();
            for (b, s) in beta.iter_mut().zip(&step[..p1]) {
                *b += s;
            }
            let mut phi = coef.phi + step[p1];
            while phi <= 0.0 {
                phi = 0.5 * (phi + coef.phi);
            }
            coef = Coefficients::new(beta, phi)?;
            loglik = log_likelihood(ds, &coef)?;
            iterations += 1;
            if rel_step < tol {
                converged = true;
                break;
            }
            continue;
        }

        let mut accepted: Option<(Coefficients, f64, f64)> = None;
        let mut scale = 1.0;
        for _ in 0..=MAX_HALVINGS {
            let mut beta = coef.beta.clone();
            for (b, s) in beta.iter_mut().zip(&step[..p1]) {
                *b += scale * s;
            }
            let phi = coef.phi + scale * step[p1];
            if phi > 0.0 && beta.iter().all(|b| b.is_finite()) {
                if let Ok(candidate) = Coefficients::new(beta, phi) {
                    if let Ok(ll) = log_likelihood(ds, &candidate) {
                        if ll.is_finite() && ll >= loglik {
                            let rel_change = candidate
                                .beta
                                .iter()
                                .chain(std::iter::once(&candidate.phi))
                                .zip(coef.beta.iter().chain(std::iter::once(&coef.phi)))
                                .map(|(new, old)| (new - old).abs() / (1.0 + old.abs()))
                                .fold(0.0f64, f64::max);
                            accepted = Some((candidate, ll, rel_change));
                            break;
                        }
                    }
                }
            }
            scale *= 0.5;
        }

        match accepted {
            Some((next, ll, rel_change)) => {
                coef = next;
                loglik = ll;
                iterations += 1;
                if rel_change < tol {
                    converged = true;
                    break;
                }
            }
            None => {
                // no representable improvement left: numerically optimal when
                // the attainable gain is below the likelihood's resolution
                let expected_gain: f64 =
                    0.5 * u.iter().zip(&step).map(|(a, b)| a * b).sum::<f64>();
                if expected_gain.abs() <= 1e-12 * (1.0 + loglik.abs()) {
                    converged = true;
                }
                break;
            }
        }
    }

    Ok(FitResult {
        coef,
        coef_standardized: None,
        method: Method::Ml,
        penalty_k: 0.0,
        iterations,
        converged,
        degenerate,
        loglik,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::linalg::Mat;
    use crate::model::score;
    use crate::rng::Rng;

    fn dataset(rows: Vec<Vec<f64>>, y: Vec<f64>) -> Dataset {
        let names = (0..rows[0].len())
            .map(|j| {
                if j == 0 {
                    "intercept".into()
                } else {
                    format!("x{j}")
                }
            })
            .collect();
        Dataset::new(Mat::from_rows(&rows).unwrap(), y, names).unwrap()
    }

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
        dataset(rows, ys)
    }

    #[test]
    fn initial_values_flat_response() {
        let ds = dataset(vec![vec![1.0], vec![1.0], vec![1.0]], vec![0.5, 0.5, 0.5]);
        let init = initial_values(&ds);
        assert!(init.beta[0].abs() < 1e-12);
        assert!(init.phi >= 0.1);
    }

    #[test]
    fn initial_values_match_normal_equations() {
        let ds = simulated(31, 25, &[0.2, 0.5, -0.4], 8.0);
        let init = initial_values(&ds);
        // brute-force normal equations on logit(y)
        let z: Vec<f64> = ds.response().iter().map(|y| (y / (1.0 - y)).ln()).collect();
        let ones = vec![1.0; ds.n()];
        let xtx = ds.design().xt_w_x(&ones);
        let xtz = ds.design().xt_w_v(&ones, &z);
        // 3x3 solve by explicit elimination through the shared solver on a copy
        let beta = crate::linalg::solve_sym(&xtx, &xtz, 1e-12).unwrap().solution;
        for (a, b) in init.beta.iter().zip(&beta) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(init.phi >= 0.1);
    }

    #[test]
    fn intercept_only_fit_matches_grid_oracle() {
        // n = 200 draws with mu = 0.5, phi = 5
        let ds = simulated(200, 200, &[0.0], 5.0);
        let fit = fit_ml(&ds, 1e-8, 100).unwrap();
        assert!(fit.converged);
        // score at the optimum vanishes
        let u = score(&ds, &fit.coef).unwrap();
        for ui in &u {
            assert!(ui.abs() < 1e-6, "score {ui}");
        }
        // 2-D grid oracle over (beta0, phi)
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for i in 0..=80 {
            let b0 = -0.4 + 0.8 * i as f64 / 80.0;
            for j in 0..=120 {
                let phi = 1.0 + 9.0 * j as f64 / 120.0;
                let c = Coefficients::new(vec![b0], phi).unwrap();
                let ll = log_likelihood(&ds, &c).unwrap();
                if ll > best.0 {
                    best = (ll, b0, phi);
                }
            }
        }
        assert!((fit.coef.beta[0] - best.1).abs() < 0.02);
        assert!((fit.coef.phi - best.2).abs() < 0.15);
        // Monte Carlo error bound around the truth
        assert!(fit.coef.beta[0].abs() < 0.1);
    }

    #[test]
    fn refit_from_optimum_is_a_fixed_point() {
        let ds = simulated(77, 60, &[0.3, -0.6, 0.4], 4.0);
        let fit = fit_ml(&ds, 1e-8, 100).unwrap();
        assert!(fit.converged);
        let refit = fit_ml_from(&ds, &fit.coef, 1e-8, 100).unwrap();
        assert!(refit.iterations <= 1);
        for (a, b) in refit.coef.beta.iter().zip(&fit.coef.beta) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!((refit.coef.phi - fit.coef.phi).abs() < 1e-8 * fit.coef.phi);
    }

    #[test]
    fn recovers_generating_coefficients_roughly() {
        let truth = [0.2, 0.7, -0.5];
        let ds = simulated(404, 400, &truth, 10.0);
        let fit = fit_ml(&ds, 1e-8, 100).unwrap();
        assert!(fit.converged);
        for (est, tr) in fit.coef.beta.iter().zip(&truth) {
            assert!((est - tr).abs() < 0.15, "est {est} vs true {tr}");
        }
        assert!((fit.coef.phi - 10.0).abs() < 2.5);
    }
}
