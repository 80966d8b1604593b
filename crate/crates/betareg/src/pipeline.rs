//! Standardize-fit-backtransform orchestration shared by the CLI, the
//! simulation harness and the bootstrap.

use crate::dataset::Dataset;
use crate::error::Result;
use crate::estimators::{
    fit_lasso, fit_ml, fit_ridge, select_lasso_k_cv, EstimatorSpec, FitResult, LassoConfig,
    LassoPenalty,
};
use crate::transform::{back_transform, standardize};

/// Knobs shared by all estimators in a run.
#[derive(Clone, Debug)]
pub struct FitOptions {
    pub ml_tol: f64,
    pub ml_max_iter: usize,
    pub lasso: LassoConfig,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            ml_tol: 1e-8,
            ml_max_iter: 100,
            lasso: LassoConfig::default(),
        }
    }
}

/// Fits one estimator on the raw dataset: predictors are standardized, the
/// estimator runs on the standardized scale, and the returned result carries
/// both the original-scale and standardized-scale coefficients.
pub fn fit_estimator(ds: &Dataset, spec: &EstimatorSpec, opts: &FitOptions) -> Result<FitResult> {
    let mut fits = fit_estimators(ds, std::slice::from_ref(spec), opts);
    fits.pop().expect("one spec in, one result out")
}

/// Fits several estimators on the same dataset, sharing the standardization
/// and the maximum-likelihood fit they all start from.
pub fn fit_estimators(
    ds: &Dataset,
    specs: &[EstimatorSpec],
    opts: &FitOptions,
) -> Vec<Result<FitResult>> {
    let shared = (|| -> Result<_> {
        let (std_ds, transform) = standardize(ds)?;
        let ml_std = fit_ml(&std_ds, opts.ml_tol, opts.ml_max_iter)?;
        Ok((std_ds, transform, ml_std))
    })();
    let (std_ds, transform, ml_std) = match shared {
        Ok(parts) => parts,
        Err(e) => {
            let msg = e.to_string();
            return specs
                .iter()
                .map(|_| Err(crate::error::Error::InvalidInput(msg.clone())))
                .collect();
        }
    };

    specs
        .iter()
        .map(|spec| {
            let fitted_std = match spec {
                EstimatorSpec::Ml => Ok(ml_std.clone()),
                EstimatorSpec::Ridge(sel) => fit_ridge(&std_ds, sel, &ml_std),
                EstimatorSpec::Lasso(penalty) => {
                    let k = match penalty {
                        LassoPenalty::Fixed(k) => Ok(*k),
                        LassoPenalty::Cv => {
                            select_lasso_k_cv(&std_ds, &opts.lasso).map(|sel| sel.k)
                        }
                    };
                    k.and_then(|k| fit_lasso(&std_ds, k, &opts.lasso, &ml_std))
                }
            }?;
            let coef = back_transform(&fitted_std.coef, &transform);
            Ok(FitResult {
                coef,
                coef_standardized: Some(fitted_std.coef.clone()),
                ..fitted_std
            })
        })
        .collect()
}
