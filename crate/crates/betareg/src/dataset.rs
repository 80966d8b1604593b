//! Model data containers: the design/response pair and the parameter vector.

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// A regression dataset: design matrix with a leading intercept column and a
/// response confined to the open interval (0,1).
///
/// Collinear (even rank-deficient) designs are allowed on purpose; responses
/// exactly equal to 0 or 1 are rejected rather than clamped.
#[derive(Clone, Debug)]
pub struct Dataset {
    design: Mat,
    response: Vec<f64>,
    predictor_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset from a full design matrix whose first column must be
    /// identically one.
    pub fn new(design: Mat, response: Vec<f64>, predictor_names: Vec<String>) -> Result<Self> {
        let n = design.nrows();
        if n == 0 || design.ncols() == 0 {
            return Err(Error::InvalidInput(
                "design matrix must have at least one row and one column".into(),
            ));
        }
        if response.len() != n {
            return Err(Error::InvalidInput(format!(
                "response length {} does not match {} design rows",
                response.len(),
                n
            )));
        }
        if predictor_names.len() != design.ncols() {
            return Err(Error::InvalidInput(format!(
                "{} predictor names for {} design columns",
                predictor_names.len(),
                design.ncols()
            )));
        }
        if !design.is_finite() {
            return Err(Error::InvalidInput(
                "design matrix contains non-finite entries".into(),
            ));
        }
        for t in 0..n {
            if design.get(t, 0) != 1.0 {
                return Err(Error::InvalidInput(format!(
                    "design row {t} does not start with an intercept entry of 1"
                )));
            }
        }
        let bad: Vec<usize> = response
            .iter()
            .enumerate()
            .filter(|(_, y)| !(y.is_finite() && **y > 0.0 && **y < 1.0))
            .map(|(t, _)| t)
            .collect();
        if !bad.is_empty() {
            return Err(Error::ResponseOutOfRange { rows: bad });
        }
        Ok(Dataset {
            design,
            response,
            predictor_names,
        })
    }

    /// Builds a dataset by prepending an intercept column to raw predictors.
    pub fn with_intercept(
        predictors: &Mat,
        response: Vec<f64>,
        predictor_names: &[String],
    ) -> Result<Self> {
        let n = predictors.nrows();
        let p = predictors.ncols();
        if predictor_names.len() != p {
            return Err(Error::InvalidInput(format!(
                "{} names for {} predictor columns",
                predictor_names.len(),
                p
            )));
        }
        let mut design = Mat::zeros(n, p + 1);
        for t in 0..n {
            design.set(t, 0, 1.0);
            for j in 0..p {
                design.set(t, j + 1, predictors.get(t, j));
            }
        }
        let mut names = Vec::with_capacity(p + 1);
        names.push("intercept".to_string());
        names.extend(predictor_names.iter().cloned());
        Dataset::new(design, response, names)
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.design.nrows()
    }

    /// Number of design columns (intercept included).
    pub fn n_params(&self) -> usize {
        self.design.ncols()
    }

    pub fn design(&self) -> &Mat {
        &self.design
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn predictor_names(&self) -> &[String] {
        &self.predictor_names
    }

    /// New dataset keeping the given rows (duplicates allowed), used by
    /// cross-validation folds and bootstrap resamples.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("row selection is empty".into()));
        }
        let p1 = self.n_params();
        let mut design = Mat::zeros(rows.len(), p1);
        let mut response = Vec::with_capacity(rows.len());
        for (out, &t) in rows.iter().enumerate() {
            assert!(t < self.n(), "row index {t} out of bounds");
            for j in 0..p1 {
                design.set(out, j, self.design.get(t, j));
            }
            response.push(self.response[t]);
        }
        Dataset::new(design, response, self.predictor_names.clone())
    }
}

/// Regression coefficients on the link scale plus the precision parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients {
    pub beta: Vec<f64>,
    pub phi: f64,
}

impl Coefficients {
    pub fn new(beta: Vec<f64>, phi: f64) -> Result<Self> {
        if beta.is_empty() || beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidInput(
                "coefficients must be non-empty and finite".into(),
            ));
        }
        if !(phi.is_finite() && phi > 0.0) {
            return Err(Error::InvalidInput(format!(
                "precision must be finite and positive, got {phi}"
            )));
        }
        Ok(Coefficients { beta, phi })
    }

    /// Number of slopes, excluding the intercept.
    pub fn n_slopes(&self) -> usize {
        self.beta.len() - 1
    }
}
