//! Data diagnostics: collinearity measures and Kolmogorov-Smirnov
//! goodness-of-fit checks against fitted normal or beta families.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{solve_sym, sym_eigen, Mat, PIVOT_TOL};
use crate::rng::Rng;
use crate::special::{digamma, log_gamma, regularized_incomplete_beta, trigamma};

/// Condition number sqrt(lambda_max / lambda_min) of X'X over the raw
/// (uncentered, unscaled) predictor columns, intercept excluded. Returns
/// +inf when the smallest eigenvalue is nonpositive within tolerance
/// (perfect collinearity).
pub fn condition_number(ds: &Dataset) -> f64 {
    let n = ds.n();
    let p = ds.n_params() - 1;
    if p == 0 {
        return 1.0;
    }
    let mut predictors = Mat::zeros(n, p);
    for t in 0..n {
        for j in 0..p {
            predictors.set(t, j, ds.design().get(t, j + 1));
        }
    }
    let ones = vec![1.0; n];
    let gram = predictors.xt_w_x(&ones);
    let (values, _) = sym_eigen(&gram);
    let lambda_max = values[0];
    let lambda_min = values[values.len() - 1];
    if lambda_min <= PIVOT_TOL * lambda_max.max(0.0) {
        return f64::INFINITY;
    }
    (lambda_max / lambda_min).sqrt()
}

/// Pearson correlation matrix of the predictors (intercept excluded) with the
/// largest-magnitude off-diagonal pair flagged.
#[derive(Clone, Debug)]
pub struct CorrelationScan {
    pub names: Vec<String>,
    /// p x p correlation matrix in predictor order.
    pub matrix: Mat,
    /// (row, column, correlation) of the largest |r| off the diagonal.
    pub extreme_pair: (usize, usize, f64),
}

pub fn correlation_scan(ds: &Dataset) -> Result<CorrelationScan> {
    let p = ds.n_params() - 1;
    if p < 2 {
        return Err(Error::InvalidInput(
            "correlation scan needs at least two predictors".into(),
        ));
    }
    let n = ds.n();
    let mut centered: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut norms = Vec::with_capacity(p);
    for j in 1..=p {
        let col = ds.design().col_vec(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        let c: Vec<f64> = col.iter().map(|x| x - mean).collect();
        let norm: f64 = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVariance {
                column: ds.predictor_names()[j].clone(),
            });
        }
        centered.push(c);
        norms.push(norm);
    }
    let mut matrix = Mat::identity(p);
    let mut extreme = (0usize, 1usize, 0.0f64);
    for a in 0..p {
        for b in (a + 1)..p {
            let dot: f64 = centered[a].iter().zip(&centered[b]).map(|(x, y)| x * y).sum();
            let r = dot / (norms[a] * norms[b]);
            matrix.set(a, b, r);
            matrix.set(b, a, r);
            if r.abs() > extreme.2.abs() {
                extreme = (a, b, r);
            }
        }
    }
    Ok(CorrelationScan {
        names: ds.predictor_names()[1..].to_vec(),
        matrix,
        extreme_pair: extreme,
    })
}

/// Family a response sample can be tested against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KsFamily {
    Normal,
    Beta,
}

/// One-sample Kolmogorov-Smirnov test against a family fitted by maximum
/// likelihood.
///
/// The p-value comes from the asymptotic Kolmogorov distribution and ignores
/// that the parameters were estimated, so it is approximate; see
/// [`ks_goodness_of_fit_bootstrap`] for a parametric-bootstrap calibration.
#[derive(Clone, Debug)]
pub struct KsTest {
    pub family: KsFamily,
    pub statistic: f64,
    pub p_value: f64,
    /// Fitted family parameters: (mean, sd) or (shape1, shape2).
    pub params: (f64, f64),
}

type FittedCdf = Box<dyn Fn(f64) -> Result<f64>>;

pub fn ks_goodness_of_fit(y: &[f64], family: KsFamily) -> Result<KsTest> {
    if y.len() < 8 {
        return Err(Error::InvalidInput(
            "Kolmogorov-Smirnov test needs at least 8 observations".into(),
        ));
    }
    let (params, cdf): ((f64, f64), FittedCdf) = match family {
        KsFamily::Normal => {
            let (mean, sd) = fit_normal_ml(y)?;
            (
                (mean, sd),
                Box::new(move |v: f64| Ok(normal_cdf((v - mean) / sd))),
            )
        }
        KsFamily::Beta => {
            let (a, b) = fit_beta_ml(y)?;
            (
                (a, b),
                Box::new(move |v: f64| {
                    regularized_incomplete_beta(a, b, v.clamp(0.0, 1.0))
                }),
            )
        }
    };
    let statistic = ks_statistic(y, &*cdf)?;
    let p_value = kolmogorov_survival((y.len() as f64).sqrt() * statistic);
    Ok(KsTest {
        family,
        statistic,
        p_value,
        params,
    })
}

/// Parametric-bootstrap p-value for the same test: resamples from the fitted
/// family, refits, and counts statistics at least as large as the observed
/// one.
pub fn ks_goodness_of_fit_bootstrap(
    y: &[f64],
    family: KsFamily,
    resamples: usize,
    seed: u64,
) -> Result<KsTest> {
    let observed = ks_goodness_of_fit(y, family)?;
    let n = y.len();
    let mut at_least = 0usize;
    let mut used = 0usize;
    for b in 0..resamples {
        let mut rng = Rng::substream(seed, b as u64);
        let sample: Vec<f64> = match family {
            KsFamily::Normal => (0..n)
                .map(|_| observed.params.0 + observed.params.1 * rng.normal())
                .collect(),
            KsFamily::Beta => {
                let mut out = Vec::with_capacity(n);
                while out.len() < n {
                    let v = rng.beta(observed.params.0, observed.params.1);
                    if v > 0.0 && v < 1.0 {
                        out.push(v);
                    }
                }
                out
            }
        };
        if let Ok(trial) = ks_goodness_of_fit(&sample, family) {
            used += 1;
            if trial.statistic >= observed.statistic {
                at_least += 1;
            }
        }
    }
    if used == 0 {
        return Err(Error::DegenerateFit(
            "every parametric bootstrap refit failed".into(),
        ));
    }
    Ok(KsTest {
        p_value: (at_least as f64 + 1.0) / (used as f64 + 1.0),
        ..observed
    })
}

fn ks_statistic(y: &[f64], cdf: &dyn Fn(f64) -> Result<f64>) -> Result<f64> {
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, v) in sorted.iter().enumerate() {
        let f = cdf(*v)?;
        let upper = (i as f64 + 1.0) / n - f;
        let lower = f - i as f64 / n;
        d = d.max(upper).max(lower);
    }
    Ok(d)
}

/// Survival function of the Kolmogorov distribution,
/// Q(t) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 t^2).
fn kolmogorov_survival(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let j = j as f64;
        let term = 2.0 * (-2.0 * j * j * t * t).exp();
        sum += if (j as usize) % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Maximum-likelihood normal fit: sample mean and the sqrt of the /n
/// variance.
fn fit_normal_ml(y: &[f64]) -> Result<(f64, f64)> {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if var.is_nan() || var <= 0.0 {
        return Err(Error::DegenerateFit("constant sample".into()));
    }
    Ok((mean, var.sqrt()))
}

/// Maximum-likelihood beta(a, b) fit by Newton iteration on the shape
/// gradient, started from the method of moments.
fn fit_beta_ml(y: &[f64]) -> Result<(f64, f64)> {
    if y.iter().any(|v| !(*v > 0.0 && *v < 1.0)) {
        return Err(Error::DegenerateFit(
            "beta fit needs observations strictly inside (0,1)".into(),
        ));
    }
    let n = y.len() as f64;
    let mean_ln_y = y.iter().map(|v| v.ln()).sum::<f64>() / n;
    let mean_ln_1my = y.iter().map(|v| (1.0 - v).ln()).sum::<f64>() / n;
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if var.is_nan() || var <= 0.0 {
        return Err(Error::DegenerateFit("constant sample".into()));
    }
    let common = (mean * (1.0 - mean) / var - 1.0).max(0.1);
    let mut a = (mean * common).max(1e-3);
    let mut b = ((1.0 - mean) * common).max(1e-3);

    let loglik = |a: f64, b: f64| -> Result<f64> {
        Ok(n * (log_gamma(a + b)? - log_gamma(a)? - log_gamma(b)?
            + (a - 1.0) * mean_ln_y
            + (b - 1.0) * mean_ln_1my))
    };
    let mut ll = loglik(a, b)?;
    for _ in 0..200 {
        let psi_ab = digamma(a + b)?;
        let g1 = n * (psi_ab - digamma(a)? + mean_ln_y);
        let g2 = n * (psi_ab - digamma(b)? + mean_ln_1my);
        let tri_ab = trigamma(a + b)?;
        let h11 = n * (tri_ab - trigamma(a)?);
        let h22 = n * (tri_ab - trigamma(b)?);
        let h12 = n * tri_ab;
        // Newton step on the negative Hessian (positive definite here)
        let neg_h = Mat::from_rows(&[vec![-h11, -h12], vec![-h12, -h22]])?;
        let step = solve_sym(&neg_h, &[g1, g2], PIVOT_TOL)?.solution;
        let mut scale = 1.0;
        let mut moved = false;
        for _ in 0..30 {
            let ca = a + scale * step[0];
            let cb = b + scale * step[1];
            if ca > 0.0 && cb > 0.0 {
                if let Ok(cand) = loglik(ca, cb) {
                    if cand.is_finite() && cand >= ll {
                        let delta = (ca - a).abs().max((cb - b).abs());
                        a = ca;
                        b = cb;
                        ll = cand;
                        moved = true;
                        if delta < 1e-10 * (1.0 + a.max(b)) {
                            return Ok((a, b));
                        }
                        break;
                    }
                }
            }
            scale *= 0.5;
        }
        if !moved {
            break;
        }
        if (g1.abs() + g2.abs()) / n < 1e-10 {
            break;
        }
    }
    Ok((a, b))
}

/// Standard normal CDF via the complementary error function (Numerical
/// Recipes rational approximation, |error| < 1.2e-7; ample for the
/// qualitative accept/reject use here).
fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let ans = t
        * (-z * z - 1.26551223
            + t * (1.00002368
                + t * (0.37409196
                    + t * (0.09678418
                        + t * (-0.18628806
                            + t * (0.27886807
                                + t * (-1.13520398
                                    + t * (1.48851587
                                        + t * (-0.82215223 + t * 0.17087277)))))))))
        .exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::rng::Rng;

    #[test]
    fn condition_number_of_orthonormal_design() {
        // predictor columns orthogonal with equal norms
        let design = Mat::from_rows(&[
            vec![1.0, 1.0, 1.0],
            vec![1.0, 1.0, -1.0],
            vec![1.0, -1.0, 1.0],
            vec![1.0, -1.0, -1.0],
        ])
        .unwrap();
        let ds = Dataset::new(
            design,
            vec![0.2, 0.4, 0.6, 0.8],
            vec!["intercept".into(), "a".into(), "b".into()],
        )
        .unwrap();
        let h = condition_number(&ds);
        assert!((h - 1.0).abs() < 1e-10, "h = {h}");
    }

    #[test]
    fn condition_number_of_duplicated_column_is_infinite() {
        let design = Mat::from_rows(&[
            vec![1.0, 0.3, 0.3],
            vec![1.0, -1.0, -1.0],
            vec![1.0, 0.8, 0.8],
        ])
        .unwrap();
        let ds = Dataset::new(
            design,
            vec![0.2, 0.4, 0.6],
            vec!["intercept".into(), "a".into(), "b".into()],
        )
        .unwrap();
        assert!(condition_number(&ds).is_infinite());
    }

    #[test]
    fn condition_number_is_row_permutation_invariant() {
        let mut rng = Rng::new(4);
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|_| vec![1.0, rng.normal(), 3.0 * rng.normal()])
            .collect();
        let y: Vec<f64> = (0..12).map(|_| 0.1 + 0.8 * rng.uniform()).collect();
        let names = vec!["intercept".into(), "a".into(), "b".into()];
        let ds = Dataset::new(Mat::from_rows(&rows).unwrap(), y, names).unwrap();
        let perm: Vec<usize> = vec![5, 2, 9, 0, 1, 3, 11, 10, 4, 7, 8, 6];
        let permuted = ds.select_rows(&perm).unwrap();
        let a = condition_number(&ds);
        let b = condition_number(&permuted);
        assert!((a - b).abs() < 1e-8 * a);
    }

    #[test]
    fn correlation_scan_flags_opposite_columns() {
        let mut rng = Rng::new(5);
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|_| {
                let x = rng.normal();
                vec![1.0, x, -x, rng.normal()]
            })
            .collect();
        let y: Vec<f64> = (0..20).map(|_| 0.1 + 0.8 * rng.uniform()).collect();
        let names = vec!["intercept".into(), "x".into(), "neg_x".into(), "noise".into()];
        let ds = Dataset::new(Mat::from_rows(&rows).unwrap(), y, names).unwrap();
        let scan = correlation_scan(&ds).unwrap();
        for j in 0..3 {
            assert_eq!(scan.matrix.get(j, j), 1.0);
        }
        let (a, b, r) = scan.extreme_pair;
        assert_eq!((a, b), (0, 1));
        assert!((r + 1.0).abs() < 1e-12);
    }

    #[test]
    fn normal_cdf_sane() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-7);
        assert!((normal_cdf(1.96) - 0.975).abs() < 1e-3);
        assert!((normal_cdf(-1.96) - 0.025).abs() < 1e-3);
    }

    #[test]
    fn kolmogorov_survival_reference_values() {
        // classical table: Q(1.36) ~ 0.049
        let q = kolmogorov_survival(1.36);
        assert!((q - 0.049).abs() < 0.002, "q = {q}");
        assert!(kolmogorov_survival(0.05) == 1.0);
        assert!(kolmogorov_survival(3.0) < 1e-7);
    }

    #[test]
    fn beta_ml_fit_recovers_shapes() {
        let mut rng = Rng::new(6);
        let y: Vec<f64> = (0..4000)
            .map(|_| {
                let mut v = rng.beta(2.5, 4.0);
                while !(v > 0.0 && v < 1.0) {
                    v = rng.beta(2.5, 4.0);
                }
                v
            })
            .collect();
        let (a, b) = fit_beta_ml(&y).unwrap();
        assert!((a - 2.5).abs() < 0.15, "a = {a}");
        assert!((b - 4.0).abs() < 0.25, "b = {b}");
    }

    #[test]
    fn uniform_sample_accepted_as_beta() {
        let mut rng = Rng::new(7);
        let y: Vec<f64> = (0..5000).map(|_| rng.uniform()).filter(|v| *v > 0.0).collect();
        let t = ks_goodness_of_fit(&y, KsFamily::Beta).unwrap();
        assert!(t.p_value > 0.05, "p = {}", t.p_value);
        // and the fitted shapes are near (1, 1)
        assert!((t.params.0 - 1.0).abs() < 0.1);
        assert!((t.params.1 - 1.0).abs() < 0.1);
    }

    #[test]
    fn skewed_beta_sample_rejected_as_normal() {
        let mut rng = Rng::new(8);
        let y: Vec<f64> = (0..3000)
            .map(|_| {
                let mut v = rng.beta(0.8, 6.0);
                while !(v > 0.0 && v < 1.0) {
                    v = rng.beta(0.8, 6.0);
                }
                v
            })
            .collect();
        let t = ks_goodness_of_fit(&y, KsFamily::Normal).unwrap();
        assert!(t.p_value < 0.001, "p = {}", t.p_value);
    }

    #[test]
    fn bootstrap_p_value_agrees_qualitatively() {
        let mut rng = Rng::new(9);
        let y: Vec<f64> = (0..400)
            .map(|_| {
                let mut v = rng.beta(2.0, 3.0);
                while !(v > 0.0 && v < 1.0) {
                    v = rng.beta(2.0, 3.0);
                }
                v
            })
            .collect();
        let t = ks_goodness_of_fit_bootstrap(&y, KsFamily::Beta, 99, 11).unwrap();
        assert!(t.p_value > 0.05, "p = {}", t.p_value);
    }
}
