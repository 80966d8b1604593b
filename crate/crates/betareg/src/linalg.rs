//! Small dense-matrix helpers: a row-major matrix type, Cholesky and Jacobi
//! eigendecomposition for symmetric systems, and a solver that falls back to
//! an eigenvalue-truncated pseudo-inverse when the system is near singular.
//!
//! Everything here targets the small (at most a few dozen columns) matrices
//! this crate works with; no attempt is made at blocked or parallel kernels.

use crate::error::{Error, Result};

/// Relative pivot / eigenvalue tolerance used to declare a system singular.
pub const PIVOT_TOL: f64 = 1e-12;

/// Dense row-major matrix of f64.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from row slices; all rows must share a length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::InvalidInput(
                "matrix needs at least one column".into(),
            ));
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Mat {
            rows: rows.len(),
            cols,
            data,
        })
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col_vec(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Matrix-vector product `A v`.
    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
            })
            .collect()
    }

    /// Weighted Gram matrix `X' Diag(w) X`; symmetric by construction.
    pub fn xt_w_x(&self, w: &[f64]) -> Mat {
        assert_eq!(w.len(), self.rows);
        let p = self.cols;
        let mut out = Mat::zeros(p, p);
        for t in 0..self.rows {
            let xt = self.row(t);
            let wt = w[t];
            for i in 0..p {
                let wxi = wt * xt[i];
                for j in i..p {
                    let v = out.get(i, j) + wxi * xt[j];
                    out.set(i, j, v);
                }
            }
        }
        for i in 0..p {
            for j in 0..i {
                let v = out.get(j, i);
                out.set(i, j, v);
            }
        }
        out
    }

    /// Weighted cross product `X' Diag(w) v`.
    pub fn xt_w_v(&self, w: &[f64], v: &[f64]) -> Vec<f64> {
        assert_eq!(w.len(), self.rows);
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for t in 0..self.rows {
            let s = w[t] * v[t];
            for (o, x) in out.iter_mut().zip(self.row(t)) {
                *o += s * x;
            }
        }
        out
    }

    /// Copy of the square submatrix keeping the given row/column indices.
    pub fn principal_submatrix(&self, keep: &[usize]) -> Mat {
        let m = keep.len();
        let mut out = Mat::zeros(m, m);
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                out.set(a, b, self.get(i, j));
            }
        }
        out
    }
}

/// Result of a symmetric linear solve.
#[derive(Clone, Debug)]
pub struct SymSolve {
    pub solution: Vec<f64>,
    /// True when the Cholesky pivot check failed and the eigenvalue-truncated
    /// pseudo-inverse was used instead.
    pub degenerate: bool,
}

/// Cholesky factor (lower triangular) of a symmetric positive definite
/// matrix. Returns `None` when a pivot falls below `tol` times the largest
/// diagonal entry.
pub fn cholesky(a: &Mat, tol: f64) -> Option<Mat> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let max_diag = (0..n).map(|i| a.get(i, i).abs()).fold(0.0f64, f64::max);
    let threshold = tol * max_diag.max(f64::MIN_POSITIVE);
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if !d.is_finite() || d <= threshold {
            return None;
        }
        let dj = d.sqrt();
        l.set(j, j, dj);
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / dj);
        }
    }
    Some(l)
}

fn cholesky_solve(l: &Mat, b: &[f64]) -> Vec<f64> {
    let n = l.nrows();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l.get(i, k) * y[k];
        }
        y[i] = s / l.get(i, i);
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l.get(k, i) * x[k];
        }
        x[i] = s / l.get(i, i);
    }
    x
}

/// Eigendecomposition of a symmetric matrix by the cyclic Jacobi method.
///
/// Returns eigenvalues in descending order and the matching orthonormal
/// eigenvectors as the columns of the second result.
pub fn sym_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut m = a.clone();
    let mut q = Mat::identity(n);

    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m.get(i, j) * m.get(i, j);
            }
        }
        let norm: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j) * m.get(i, j))
            .sum();
        if off.sqrt() <= 1e-15 * norm.sqrt().max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = m.get(p, r);
                if apr == 0.0 {
                    continue;
                }
                let app = m.get(p, p);
                let arr = m.get(r, r);
                let theta = (arr - app) / (2.0 * apr);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkr = m.get(k, r);
                    m.set(k, p, c * mkp - s * mkr);
                    m.set(k, r, s * mkp + c * mkr);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mrk = m.get(r, k);
                    m.set(p, k, c * mpk - s * mrk);
                    m.set(r, k, s * mpk + c * mrk);
                }
                for k in 0..n {
                    let qkp = q.get(k, p);
                    let qkr = q.get(k, r);
                    q.set(k, p, c * qkp - s * qkr);
                    q.set(k, r, s * qkp + c * qkr);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(j, j).partial_cmp(&m.get(i, i)).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let mut vectors = Mat::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            vectors.set(k, new_col, q.get(k, old_col));
        }
    }
    (values, vectors)
}

/// Solves the symmetric system `A x = b`, preferring Cholesky and falling
/// back to an eigenvalue-truncated pseudo-inverse when a pivot drops below
/// `tol` relative to the largest diagonal entry.
pub fn solve_sym(a: &Mat, b: &[f64], tol: f64) -> Result<SymSolve> {
    if !a.is_finite() || b.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "non-finite entries in linear system".into(),
        ));
    }
    if let Some(l) = cholesky(a, tol) {
        return Ok(SymSolve {
            solution: cholesky_solve(&l, b),
            degenerate: false,
        });
    }
    Ok(SymSolve {
        solution: pseudo_solve(a, b, tol),
        degenerate: true,
    })
}

/// Pseudo-inverse solve via symmetric eigendecomposition; eigenvalues below
/// `tol` times the largest magnitude are treated as zero.
pub fn pseudo_solve(a: &Mat, b: &[f64], tol: f64) -> Vec<f64> {
    let n = a.nrows();
    let (values, vectors) = sym_eigen(a);
    let max_abs = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let cutoff = tol * max_abs.max(f64::MIN_POSITIVE);
    let mut x = vec![0.0; n];
    for (idx, &lambda) in values.iter().enumerate() {
        if lambda.abs() <= cutoff {
            continue;
        }
        let mut proj = 0.0;
        for k in 0..n {
            proj += vectors.get(k, idx) * b[k];
        }
        let scale = proj / lambda;
        for k in 0..n {
            x[k] += scale * vectors.get(k, idx);
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let a = Mat::from_rows(&[
            vec![4.0, 2.0, 0.6],
            vec![2.0, 5.0, 1.0],
            vec![0.6, 1.0, 3.0],
        ])
        .unwrap();
        let x_true = vec![1.0, -2.0, 0.5];
        let b = a.mat_vec(&x_true);
        let s = solve_sym(&a, &b, PIVOT_TOL).unwrap();
        assert!(!s.degenerate);
        for (xi, ti) in s.solution.iter().zip(&x_true) {
            assert!(approx(*xi, *ti, 1e-12));
        }
    }

    #[test]
    fn singular_system_falls_back_to_pseudo_inverse() {
        // rank-1 matrix
        let a = Mat::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let b = vec![2.0, 2.0];
        let s = solve_sym(&a, &b, PIVOT_TOL).unwrap();
        assert!(s.degenerate);
        // minimum-norm solution of x1 + x2 = 2
        assert!(approx(s.solution[0], 1.0, 1e-10));
        assert!(approx(s.solution[1], 1.0, 1e-10));
    }

    #[test]
    fn jacobi_eigen_reconstructs_matrix() {
        let a = Mat::from_rows(&[
            vec![2.0, -1.0, 0.3, 0.0],
            vec![-1.0, 2.5, -0.2, 0.7],
            vec![0.3, -0.2, 1.0, 0.1],
            vec![0.0, 0.7, 0.1, 4.0],
        ])
        .unwrap();
        let (vals, vecs) = sym_eigen(&a);
        // descending order
        for w in vals.windows(2) {
            assert!(w[0] >= w[1]);
        }
        // A v = lambda v
        let n = a.nrows();
        for (idx, &lambda) in vals.iter().enumerate() {
            let v = vecs.col_vec(idx);
            let av = a.mat_vec(&v);
            for k in 0..n {
                assert!(approx(av[k], lambda * v[k], 1e-10));
            }
        }
        // orthonormal columns
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| vecs.get(k, i) * vecs.get(k, j)).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(approx(dot, expect, 1e-11));
            }
        }
    }

    #[test]
    fn gram_products_match_naive_loops() {
        let x = Mat::from_rows(&[
            vec![1.0, 0.5, -1.0],
            vec![1.0, 2.0, 0.3],
            vec![1.0, -0.7, 1.2],
            vec![1.0, 0.1, 0.4],
        ])
        .unwrap();
        let w = vec![0.5, 1.5, 2.0, 0.25];
        let v = vec![1.0, -1.0, 2.0, 0.5];
        let g = x.xt_w_x(&w);
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for t in 0..4 {
                    s += w[t] * x.get(t, i) * x.get(t, j);
                }
                assert!(approx(g.get(i, j), s, 1e-14));
            }
        }
        let c = x.xt_w_v(&w, &v);
        for i in 0..3 {
            let mut s = 0.0;
            for t in 0..4 {
                s += w[t] * x.get(t, i) * v[t];
            }
            assert!(approx(c[i], s, 1e-14));
        }
    }
}
