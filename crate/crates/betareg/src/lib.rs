//! Beta regression with a logit link: maximum-likelihood, ridge and lasso
//! estimation from a penalized-likelihood formulation, plus the surrounding
//! tooling — collinear-design Monte Carlo experiments, pairs-bootstrap
//! inference, data diagnostics and a reproducible CSV pipeline.
//!
//! The response is modeled as beta-distributed with mean mu and precision
//! phi, `logit(mu) = X beta`. Ridge shrinks the maximum-likelihood estimate
//! through `(X'WX + kI)^-1 X'WX beta_ml`; the lasso minimizes the penalized
//! objective `-l(beta)/n + k ||beta||_1` by coordinate descent on the local
//! weighted quadratic, producing exact zeros.

// index-based loops over parallel per-observation arrays are the house style
// in the numeric kernels
#![allow(clippy::needless_range_loop)]

pub mod bootstrap;
pub mod dataset;
pub mod diagnostics;
pub mod error;
pub mod estimators;
pub mod io;
pub mod linalg;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod rng;
pub mod sim;
pub mod special;
pub mod transform;

pub use bootstrap::{bootstrap_metrics, BootstrapMetrics};
pub use dataset::{Coefficients, Dataset};
pub use diagnostics::{
    condition_number, correlation_scan, ks_goodness_of_fit, ks_goodness_of_fit_bootstrap,
    CorrelationScan, KsFamily, KsTest,
};
pub use error::{Error, Result};
pub use estimators::{
    coordinate_update, fit_lasso, fit_lasso_from, fit_ml, fit_ml_from, fit_ridge, initial_values,
    ridge_k_from_canonical, select_lasso_k_cv, select_ridge_k, universal_penalty,
    update_phi_penalized, working_response, CvPoint, CvRule, CvSelection, EstimatorSpec,
    FitResult, LassoConfig, LassoPenalty, Method, RidgeSelector,
};
pub use io::{emit_report, load_csv, write_plot_data, LoadSummary, ResponseScale};
pub use model::{
    fisher_information, log_likelihood, mean_from_eta, score, working_quantities,
    WorkingQuantities,
};
pub use pipeline::{fit_estimator, fit_estimators, FitOptions};
pub use report::{Cell, ReportTable};
pub use rng::Rng;
pub use sim::{
    generate_design, generate_response, run_experiment, selection_rate_summary, true_coefficients,
    EstimatorSim, SimDesign, SimResult,
};
pub use special::{digamma, log_gamma, regularized_incomplete_beta, soft_threshold, trigamma};
pub use transform::{back_transform, standardize, Transform};
