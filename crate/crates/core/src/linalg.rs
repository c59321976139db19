//! Small dense helpers shared by the spectral, commutant and metric modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

/// Largest entry modulus.
pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Relative intertwining residual `max|H^dag P - P H| / (max|H| * max|P|)`.
pub fn intertwining_residual(h: &CMatrix, p: &CMatrix) -> f64 {
    let lhs = h.adjoint() * p - p * h;
    let denom = max_norm(h) * max_norm(p);
    if denom == 0.0 {
        return max_norm(&lhs);
    }
    max_norm(&lhs) / denom
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let eig = m.clone().symmetric_eigen();
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Singular value decomposition with singular values sorted descending.
/// Returns `(sigma, v_t)` where row `k` of `v_t` pairs with `sigma[k]`.
pub fn sorted_svd(m: &RMatrix) -> (Vec<f64>, RMatrix) {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma = order.iter().map(|&k| svd.singular_values[k]).collect();
    let rows: Vec<_> = order.iter().map(|&k| v_t.row(k).into_owned()).collect();
    (sigma, RMatrix::from_rows(&rows))
}

/// Orthonormal basis (as columns) of the span of `cols`, dropping directions
/// with relative singular value below `tol`.
pub fn orthonormal_columns(cols: &RMatrix, tol: f64) -> RMatrix {
    let svd = cols.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().fold(0.0_f64, |a, &s| a.max(s));
    let keep: Vec<_> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tol * smax)
        .map(|(k, _)| u.column(k).into_owned())
        .collect();
    if keep.is_empty() {
        return RMatrix::zeros(cols.nrows(), 0);
    }
    RMatrix::from_columns(&keep)
}

/// Sine of the largest principal angle between two column spans.
///
/// Spans of different rank give 1.
pub fn max_principal_angle_sin(a: &RMatrix, b: &RMatrix) -> f64 {
    let qa = orthonormal_columns(a, 1e-12);
    let qb = orthonormal_columns(b, 1e-12);
    if qa.ncols() != qb.ncols() {
        return 1.0;
    }
    if qa.ncols() == 0 {
        return 0.0;
    }
    let resid = &qb - &qa * (qa.transpose() * &qb);
    let s = resid.singular_values();
    s.iter().fold(0.0_f64, |m, &x| m.max(x)).min(1.0)
}

/// Least-squares solution of `a x = b` through the SVD, along with the
/// null-space directions (columns) whose singular values fall below `tol * sigma_max`.
pub fn least_squares_with_null(a: &RMatrix, b: &DVector<f64>, tol: f64) -> (DVector<f64>, RMatrix) {
    let n = a.ncols();
    if a.nrows() == 0 {
        return (DVector::zeros(n), RMatrix::identity(n, n));
    }
    // Pad to at least square so the SVD yields a full set of right vectors.
    let padded = if a.nrows() < n {
        let mut p = RMatrix::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let mut rhs = DVector::zeros(padded.nrows());
    rhs.rows_mut(0, b.len()).copy_from(b);
    let svd = padded.svd(true, true);
    let u = svd.u.as_ref().unwrap();
    let v_t = svd.v_t.as_ref().unwrap();
    let smax = svd.singular_values.iter().fold(0.0_f64, |m, &s| m.max(s));
    let mut x = DVector::zeros(n);
    let mut null = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        let vk = v_t.row(k).transpose();
        if s > tol * smax && s > 0.0 {
            let coef = u.column(k).dot(&rhs) / s;
            x += vk * coef;
        } else {
            null.push(vk);
        }
    }
    let null = if null.is_empty() {
        RMatrix::zeros(n, 0)
    } else {
        RMatrix::from_columns(&null)
    };
    (x, null)
}
