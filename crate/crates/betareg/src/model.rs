//! Log-likelihood, score, Fisher information and the per-observation working
//! quantities of the logit-link beta regression model.

use crate::dataset::{Coefficients, Dataset};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::special::{digamma, log_gamma, trigamma};

/// Inverse logit, computed in a form stable over the whole finite range of
/// the linear predictor.
pub fn mean_from_eta(eta: f64) -> Result<f64> {
    if !eta.is_finite() {
        return Err(Error::Domain {
            function: "mean_from_eta",
            value: eta,
            requirement: "finite",
        });
    }
    if eta >= 0.0 {
        Ok(1.0 / (1.0 + (-eta).exp()))
    } else {
        let e = eta.exp();
        Ok(e / (1.0 + e))
    }
}

/// Per-observation quantities shared by the likelihood derivatives and the
/// fitting algorithms.
///
/// For the logit link 1/g'(mu) = mu(1-mu); the weight, cross and precision
/// terms are
///   w_t = phi [psi'(mu phi) + psi'((1-mu) phi)] (mu(1-mu))^2
///   c_t = phi [psi'(mu phi) mu - psi'((1-mu) phi)(1-mu)]
///   d_t = mu^2 psi'(mu phi) + (1-mu)^2 psi'((1-mu) phi) - psi'(phi)
#[derive(Clone, Debug)]
pub struct WorkingQuantities {
    pub eta: Vec<f64>,
    pub mu: Vec<f64>,
    pub ystar: Vec<f64>,
    pub mustar: Vec<f64>,
    pub t_diag: Vec<f64>,
    pub w_diag: Vec<f64>,
    pub c_vec: Vec<f64>,
    pub d_diag: Vec<f64>,
}

/// Evaluates all working quantities at the given coefficients.
pub fn working_quantities(ds: &Dataset, coef: &Coefficients) -> Result<WorkingQuantities> {
    let n = ds.n();
    let phi = coef.phi;
    let eta = ds.design().mat_vec(&coef.beta);
    let mut mu = Vec::with_capacity(n);
    let mut ystar = Vec::with_capacity(n);
    let mut mustar = Vec::with_capacity(n);
    let mut t_diag = Vec::with_capacity(n);
    let mut w_diag = Vec::with_capacity(n);
    let mut c_vec = Vec::with_capacity(n);
    let mut d_diag = Vec::with_capacity(n);

    let tri_phi = trigamma(phi)?;
    for t in 0..n {
        let m = mean_from_eta(eta[t])?;
        if m <= 0.0 || m >= 1.0 {
            return Err(Error::DegenerateMean {
                observation: t,
                value: m,
            });
        }
        let y = ds.response()[t];
        let a = m * phi;
        let b = (1.0 - m) * phi;
        let tri_a = trigamma(a)?;
        let tri_b = trigamma(b)?;
        let tt = m * (1.0 - m);

        mu.push(m);
        ystar.push((y / (1.0 - y)).ln());
        mustar.push(digamma(a)? - digamma(b)?);
        t_diag.push(tt);
        w_diag.push(phi * (tri_a + tri_b) * tt * tt);
        c_vec.push(phi * (tri_a * m - tri_b * (1.0 - m)));
        d_diag.push(m * m * tri_a + (1.0 - m) * (1.0 - m) * tri_b - tri_phi);
    }

    Ok(WorkingQuantities {
        eta,
        mu,
        ystar,
        mustar,
        t_diag,
        w_diag,
        c_vec,
        d_diag,
    })
}

/// Log-likelihood of the dataset at the given coefficients.
///
/// Fails with [`Error::DegenerateMean`] (naming the observation) when a
/// fitted mean underflows to 0 or 1; fitting loops treat that as -inf.
pub fn log_likelihood(ds: &Dataset, coef: &Coefficients) -> Result<f64> {
    let phi = coef.phi;
    let eta = ds.design().mat_vec(&coef.beta);
    let lg_phi = log_gamma(phi)?;
    let mut total = 0.0;
    for (t, (&e, &y)) in eta.iter().zip(ds.response()).enumerate() {
        let m = mean_from_eta(e)?;
        if m <= 0.0 || m >= 1.0 {
            return Err(Error::DegenerateMean {
                observation: t,
                value: m,
            });
        }
        let a = m * phi;
        let b = (1.0 - m) * phi;
        total += lg_phi - log_gamma(a)? - log_gamma(b)?
            + (a - 1.0) * y.ln()
            + (b - 1.0) * (1.0 - y).ln();
    }
    Ok(total)
}

/// Score vector (U_beta, U_phi), length p+2.
pub fn score(ds: &Dataset, coef: &Coefficients) -> Result<Vec<f64>> {
    let wq = working_quantities(ds, coef)?;
    score_from(ds, coef, &wq)
}

/// Score assembled from precomputed working quantities.
pub fn score_from(ds: &Dataset, coef: &Coefficients, wq: &WorkingQuantities) -> Result<Vec<f64>> {
    let n = ds.n();
    let phi = coef.phi;
    let resid: Vec<f64> = (0..n).map(|t| wq.ystar[t] - wq.mustar[t]).collect();
    let mut u = ds.design().xt_w_v(&wq.t_diag, &resid);
    for v in u.iter_mut() {
        *v *= phi;
    }
    let psi_phi = digamma(phi)?;
    let mut u_phi = 0.0;
    for t in 0..n {
        let b = (1.0 - wq.mu[t]) * phi;
        u_phi += psi_phi - digamma(b)? + wq.mu[t] * resid[t] + (1.0 - ds.response()[t]).ln();
    }
    u.push(u_phi);
    Ok(u)
}

/// Expected (Fisher) information matrix for (beta, phi), size (p+2) x (p+2);
/// symmetric by construction.
pub fn fisher_information(ds: &Dataset, coef: &Coefficients) -> Result<Mat> {
    let wq = working_quantities(ds, coef)?;
    Ok(fisher_from(ds, coef, &wq))
}

/// Fisher information assembled from precomputed working quantities.
pub fn fisher_from(ds: &Dataset, coef: &Coefficients, wq: &WorkingQuantities) -> Mat {
    let p1 = ds.n_params();
    let phi = coef.phi;
    let bb = ds.design().xt_w_x(&wq.w_diag);
    let bp = ds.design().xt_w_v(&wq.t_diag, &wq.c_vec);
    let d_trace: f64 = wq.d_diag.iter().sum();

    let mut info = Mat::zeros(p1 + 1, p1 + 1);
    for i in 0..p1 {
        for j in 0..p1 {
            info.set(i, j, phi * bb.get(i, j));
        }
        info.set(i, p1, bp[i]);
        info.set(p1, i, bp[i]);
    }
    info.set(p1, p1, d_trace);
    info
}
