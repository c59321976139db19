//! Dense complex nonsymmetric eigensolver.
//!
//! Householder reduction to upper Hessenberg form followed by single-shift
//! complex QR sweeps (Wilkinson shift, Givens rotations, exceptional shifts
//! every tenth stalled sweep). Eigenvectors come from back-substitution on
//! the triangular Schur factor. Tridiagonal input skips the reduction.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{frobenius, vec_norm, CMatrix};

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 2048;

/// Residual contract: `||M v - lambda v|| <= RESIDUAL_BOUND * ||M||_F` for unit `v`.
pub const RESIDUAL_BOUND: f64 = 1e-10;

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues with unit eigenvectors (columns), sorted by real then imaginary part.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: CMatrix,
    /// Largest relative residual `||M v - lambda v|| / ||M||_F`.
    pub residual: f64,
}

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn l1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

fn check_input(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "eigensolver needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    if m.nrows() > MAX_DIM {
        return Err(Error::Dimension(format!(
            "dimension {} exceeds solver limit {MAX_DIM}",
            m.nrows()
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    Ok(())
}

/// Reduce `h` in place to upper Hessenberg form, accumulating the unitary
/// transform into `z` when given.
fn hessenberg(h: &mut CMatrix, mut z: Option<&mut CMatrix>) {
    let n = h.nrows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let tail: f64 = ((k + 2)..n).map(|i| h[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let alpha_mag = (x0.norm_sqr() + tail).sqrt();
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * alpha_mag;
        let mut v: Vec<Complex64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in v.iter_mut() {
            *c /= vnorm;
        }
        // H <- (I - 2 v v^H) H
        for j in 0..n {
            let mut s = czero();
            for (idx, vi) in v.iter().enumerate() {
                s += vi.conj() * h[(k + 1 + idx, j)];
            }
            for (idx, vi) in v.iter().enumerate() {
                h[(k + 1 + idx, j)] -= *vi * s * 2.0;
            }
        }
        // H <- H (I - 2 v v^H)
        for i in 0..n {
            let mut s = czero();
            for (idx, vi) in v.iter().enumerate() {
                s += h[(i, k + 1 + idx)] * vi;
            }
            for (idx, vi) in v.iter().enumerate() {
                h[(i, k + 1 + idx)] -= s * vi.conj() * 2.0;
            }
        }
        if let Some(z) = z.as_deref_mut() {
            for i in 0..n {
                let mut s = czero();
                for (idx, vi) in v.iter().enumerate() {
                    s += z[(i, k + 1 + idx)] * vi;
                }
                for (idx, vi) in v.iter().enumerate() {
                    z[(i, k + 1 + idx)] -= s * vi.conj() * 2.0;
                }
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = czero();
        }
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, czero());
    }
    if na == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let r = na.hypot(nb);
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

/// Eigenvalue of the 2x2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let e1 = mid + disc;
    let e2 = mid - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// QR iteration on a Hessenberg matrix. With `z` present the full Schur form
/// is produced and the unitary factor accumulated.
fn hessenberg_qr(h: &mut CMatrix, mut z: Option<&mut CMatrix>) -> Result<()> {
    let n = h.nrows();
    let want_t = z.is_some();
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut sweeps = 0usize;
    let mut total = 0usize;
    let cap = MAX_SWEEPS_PER_EIGENVALUE * n.max(1);

    while hi > 0 {
        // Locate the top of the active unreduced block.
        let mut l = hi;
        while l > 0 {
            let sub = l1(h[(l, l - 1)]);
            let mut tst = l1(h[(l - 1, l - 1)]) + l1(h[(l, l)]);
            if tst == 0.0 {
                if l >= 2 {
                    tst += h[(l - 1, l - 2)].re.abs();
                }
                if l + 1 < n {
                    tst += h[(l + 1, l)].re.abs();
                }
            }
            if sub <= eps * tst || sub < f64::MIN_POSITIVE {
                h[(l, l - 1)] = czero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            sweeps = 0;
            continue;
        }
        if total >= cap {
            return Err(Error::NoConvergence {
                iterations: total,
                lo: l,
                hi,
            });
        }

        let shift = if sweeps > 0 && sweeps % 10 == 0 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for k in l..=hi {
            h[(k, k)] -= shift;
        }
        let col_end = if want_t { n } else { hi + 1 };
        let row_start = if want_t { 0 } else { l };
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..col_end {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = czero();
            rots.push((c, s));
        }
        for (off, &(c, s)) in rots.iter().enumerate() {
            let k = l + off;
            let row_end = (k + 2).min(hi);
            for i in row_start..=row_end {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
            if let Some(z) = z.as_deref_mut() {
                for i in 0..n {
                    let x = z[(i, k)];
                    let y = z[(i, k + 1)];
                    z[(i, k)] = x * c + y * s.conj();
                    z[(i, k + 1)] = -x * s + y * c;
                }
            }
        }
        for k in l..=hi {
            h[(k, k)] += shift;
        }
        sweeps += 1;
        total += 1;
    }
    Ok(())
}

fn sort_key(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Eigenvalues only, sorted by real part then imaginary part.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    check_input(m)?;
    let mut h = m.clone();
    hessenberg(&mut h, None);
    hessenberg_qr(&mut h, None)?;
    let mut vals: Vec<Complex64> = (0..h.nrows()).map(|k| h[(k, k)]).collect();
    vals.sort_by(sort_key);
    Ok(vals)
}

/// Full eigendecomposition with the residual contract enforced.
pub fn eigen_decompose(m: &CMatrix) -> Result<EigenDecomposition> {
    check_input(m)?;
    let n = m.nrows();
    let mut t = m.clone();
    let mut z = CMatrix::identity(n, n);
    hessenberg(&mut t, Some(&mut z));
    hessenberg_qr(&mut t, Some(&mut z))?;
    for j in 0..n {
        for i in (j + 1)..n {
            t[(i, j)] = czero();
        }
    }

    // Back-substitution for eigenvectors of the triangular factor.
    let tnorm = t.iter().fold(0.0_f64, |a, v| a.max(v.norm()));
    let small = f64::EPSILON * tnorm.max(f64::MIN_POSITIVE);
    let mut x_all = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut x = vec![czero(); n];
        x[k] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut s = czero();
            for m_ in (j + 1)..=k {
                s += t[(j, m_)] * x[m_];
            }
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < small {
                denom = Complex64::new(small, 0.0);
            }
            x[j] = -s / denom;
            let big = x.iter().fold(0.0_f64, |a, c| a.max(c.norm()));
            if big > 1e100 {
                for c in x.iter_mut() {
                    *c /= big;
                }
            }
        }
        for (i, c) in x.into_iter().enumerate() {
            x_all[(i, k)] = c;
        }
    }
    let mut vecs = &z * x_all;
    for k in 0..n {
        let nv = vec_norm(&vecs.column(k).into_owned());
        if nv > 0.0 {
            let mut col = vecs.column_mut(k);
            col /= Complex64::new(nv, 0.0);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sort_key(&t[(a, a)], &t[(b, b)]));
    let values: Vec<Complex64> = order.iter().map(|&k| t[(k, k)]).collect();
    let cols: Vec<DVector<Complex64>> = order.iter().map(|&k| vecs.column(k).into_owned()).collect();
    let vectors = CMatrix::from_columns(&cols);

    let mnorm = frobenius(m);
    let mut residual = 0.0_f64;
    for (k, lambda) in values.iter().enumerate() {
        let v = vectors.column(k);
        let r = m * v - v * *lambda;
        let rel = if mnorm > 0.0 {
            vec_norm(&r.into_owned()) / mnorm
        } else {
            vec_norm(&r.into_owned())
        };
        residual = residual.max(rel);
    }
    if residual > RESIDUAL_BOUND {
        return Err(Error::Residual {
            residual,
            bound: RESIDUAL_BOUND,
        });
    }
    Ok(EigenDecomposition {
        values,
        vectors,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hamiltonian, build_laplacian, LatticeParams};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_site_real_branch() {
        let h = build_hamiltonian(&LatticeParams::new(vec![0.5]).unwrap()).unwrap();
        let ev = eigenvalues(h.matrix()).unwrap();
        let expected = (1.0_f64 - 0.25).sqrt();
        assert!((ev[0] - c(-expected, 0.0)).norm() < 1e-12);
        assert!((ev[1] - c(expected, 0.0)).norm() < 1e-12);
        assert!((expected - 0.86603).abs() < 5e-6);
    }

    #[test]
    fn two_site_imaginary_branch() {
        let h = build_hamiltonian(&LatticeParams::new(vec![1.2]).unwrap()).unwrap();
        let ev = eigenvalues(h.matrix()).unwrap();
        let expected = (1.44_f64 - 1.0).sqrt();
        assert!((expected - 0.66332).abs() < 5e-6);
        let mut im: Vec<f64> = ev.iter().map(|z| z.im).collect();
        im.sort_by(f64::total_cmp);
        assert!((im[0] + expected).abs() < 1e-12 && (im[1] - expected).abs() < 1e-12);
        assert!(ev.iter().all(|z| z.re.abs() < 1e-12));
    }

    #[test]
    fn laplacian_closed_form() {
        // Free chain of length N: lambda_k = -2 cos(k pi / (N + 1)).
        for dim in [1usize, 2, 4, 7, 20] {
            let l = build_laplacian(dim).unwrap();
            let ev = eigenvalues(l.matrix()).unwrap();
            let mut exact: Vec<f64> = (1..=dim)
                .map(|k| -2.0 * (k as f64 * std::f64::consts::PI / (dim as f64 + 1.0)).cos())
                .collect();
            exact.sort_by(f64::total_cmp);
            for (z, e) in ev.iter().zip(&exact) {
                assert!((z.re - e).abs() < 1e-12 && z.im.abs() < 1e-12, "dim {dim}");
            }
        }
        let ev = eigenvalues(build_laplacian(4).unwrap().matrix()).unwrap();
        let re: Vec<f64> = ev.iter().map(|z| (z.re * 1e5).round() / 1e5).collect();
        assert_eq!(re, vec![-1.61803, -0.61803, 0.61803, 1.61803]);
    }

    #[test]
    fn dense_nonhermitian_residuals() {
        // Deterministic dense test matrix exercising the Hessenberg reduction.
        let n = 12;
        let m = CMatrix::from_fn(n, n, |i, j| {
            let a = ((i * 7 + j * 13) % 11) as f64 / 11.0 - 0.5;
            let b = ((i * 5 + j * 3) % 7) as f64 / 7.0 - 0.5;
            c(a, b)
        });
        let d = eigen_decompose(&m).unwrap();
        assert!(d.residual <= RESIDUAL_BOUND);
        let trace: Complex64 = (0..n).map(|k| m[(k, k)]).sum();
        let sum: Complex64 = d.values.iter().sum();
        assert!((trace - sum).norm() < 1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(eigenvalues(&CMatrix::zeros(2, 3)).is_err());
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(f64::NAN, 0.0);
        assert!(matches!(eigenvalues(&m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn supports_two_hundred_sites() {
        let p = LatticeParams::new((0..100).map(|k| 0.001 * (k % 3) as f64).collect()).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let d = eigen_decompose(h.matrix()).unwrap();
        assert_eq!(d.values.len(), 200);
        assert!(d.residual <= RESIDUAL_BOUND);
    }
}
