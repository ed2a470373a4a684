//! Dense hermitian linear algebra helpers on top of nalgebra.

use nalgebra::{SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Result, TfError};
use crate::phase_space::Operator;

/// Hermiticity threshold, relative to `max(1, ||A||_F)`.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// `||A - A^*||_F`.
pub fn hermitian_residual(a: &Operator) -> f64 {
    (a - a.adjoint()).norm()
}

/// Rejects matrices that are not square or whose anti-hermitian part is above tolerance.
pub fn check_hermitian(a: &Operator) -> Result<()> {
    if !a.is_square() {
        return Err(TfError::NotHermitian { residual: f64::INFINITY });
    }
    let residual = hermitian_residual(a);
    if residual > HERMITIAN_TOL * a.norm().max(1.0) {
        return Err(TfError::NotHermitian { residual });
    }
    Ok(())
}

/// `(A + A^*) / 2`.
pub fn symmetrize(a: &Operator) -> Operator {
    (a + a.adjoint()).scale(0.5)
}

/// Eigenpairs of a hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `j` is the unit eigenvector for `values[j]`.
    pub vectors: Operator,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `sum_j c_j v_j v_j^*`.
    pub fn reconstruct(&self) -> Operator {
        let n = self.vectors.nrows();
        let mut out = Operator::zeros(n, n);
        for (j, &c) in self.values.iter().enumerate() {
            let v = self.vectors.column(j);
            out += (v * v.adjoint()).scale(c);
        }
        out
    }
}

/// Hermitian eigensolve; the input is symmetrized after the hermiticity check.
pub fn hermitian_eigen(a: &Operator) -> Result<HermitianEigen> {
    check_hermitian(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(HermitianEigen { values: vec![], vectors: Operator::zeros(0, 0) });
    }
    let eig = SymmetricEigen::new(symmetrize(a));
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(TfError::Numerical("non-finite eigenvalue".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Operator::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(HermitianEigen { values, vectors })
}

/// Singular values, descending.
pub fn singular_values(a: &Operator) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return vec![];
    }
    let mut sv: Vec<f64> = SVD::new(a.clone(), false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `rel_tol * max`.
pub fn numerical_rank(singular: &[f64], rel_tol: f64) -> usize {
    let top = singular.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    singular.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Moore-Penrose pseudo-inverse of a hermitian matrix, dropping eigenvalues
/// below `rel_tol * max |eigenvalue|`.
pub fn hermitian_pinv(a: &Operator, rel_tol: f64) -> Result<Operator> {
    let eig = hermitian_eigen(a)?;
    let scale = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let n = a.nrows();
    let mut out = Operator::zeros(n, n);
    for (j, &c) in eig.values.iter().enumerate() {
        if c.abs() > rel_tol * scale && scale > 0.0 {
            let v = eig.vectors.column(j);
            out += (v * v.adjoint()).scale(1.0 / c);
        }
    }
    Ok(out)
}

/// `v v^*` for a column vector given as a slice.
pub fn outer(v: &[Complex64]) -> Operator {
    let n = v.len();
    Operator::from_fn(n, n, |i, j| v[i] * v[j].conj())
}
