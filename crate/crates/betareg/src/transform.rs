//! Predictor standardization and the matching back-transformation of fitted
//! coefficients.

use crate::dataset::{Coefficients, Dataset};
use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Centering/scaling record produced by [`standardize`]; needed to map
/// coefficients back to the original variable scale.
#[derive(Clone, Debug, PartialEq)]
pub struct Transform {
    /// Per-slope column means (intercept excluded).
    pub means: Vec<f64>,
    /// Per-slope column standard deviations, denominator n-1.
    pub sds: Vec<f64>,
}

impl Transform {
    /// Transform that leaves coefficients unchanged.
    pub fn identity(n_slopes: usize) -> Self {
        Transform {
            means: vec![0.0; n_slopes],
            sds: vec![1.0; n_slopes],
        }
    }
}

/// Centers every non-intercept column to mean 0 and scales it to standard
/// deviation 1 (denominator n-1). Fails on constant columns, naming them.
pub fn standardize(ds: &Dataset) -> Result<(Dataset, Transform)> {
    let n = ds.n();
    let p = ds.n_params() - 1;
    if n < 2 && p > 0 {
        return Err(Error::InvalidInput(
            "standardization needs at least two rows".into(),
        ));
    }
    let mut means = Vec::with_capacity(p);
    let mut sds = Vec::with_capacity(p);
    for j in 1..=p {
        let col = ds.design().col_vec(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        let ss: f64 = col.iter().map(|x| (x - mean) * (x - mean)).sum();
        let sd = (ss / (n as f64 - 1.0)).sqrt();
        if sd.is_nan() || sd <= 0.0 {
            return Err(Error::ZeroVariance {
                column: ds.predictor_names()[j].clone(),
            });
        }
        means.push(mean);
        sds.push(sd);
    }
    let mut design = Mat::zeros(n, p + 1);
    for t in 0..n {
        design.set(t, 0, 1.0);
        for j in 1..=p {
            design.set(t, j, (ds.design().get(t, j) - means[j - 1]) / sds[j - 1]);
        }
    }
    let std_ds = Dataset::new(
        design,
        ds.response().to_vec(),
        ds.predictor_names().to_vec(),
    )?;
    Ok((std_ds, Transform { means, sds }))
}

/// Maps standardized-scale coefficients back to the original variable scale.
/// Exact zeros remain exact zeros.
pub fn back_transform(coef_std: &Coefficients, transform: &Transform) -> Coefficients {
    let p = coef_std.n_slopes();
    assert_eq!(transform.means.len(), p, "transform/coefficient mismatch");
    let mut beta = Vec::with_capacity(p + 1);
    let mut intercept = coef_std.beta[0];
    beta.push(0.0);
    for j in 0..p {
        let slope_std = coef_std.beta[j + 1];
        let slope = if slope_std == 0.0 {
            0.0
        } else {
            slope_std / transform.sds[j]
        };
        intercept -= slope_std * transform.means[j] / transform.sds[j];
        beta.push(slope);
    }
    beta[0] = intercept;
    Coefficients {
        beta,
        phi: coef_std.phi,
    }
}
