//! Hermitian solutions of `H^dag P = P H` (pseudometrics).
//!
//! The solution set is a real vector space. [`commutant_null_space`] finds it
//! as the null space of the real-linear map `P -> H^dag P - P H` from
//! Hermitian to anti-Hermitian matrices, each written in `N^2` real
//! coordinates. [`spectral_pseudometrics`] is the independent rank-one route
//! `eta eta^dag` built from eigenvectors of `H^dag`.
//!
//! # Canonical labelling
//!
//! Element `k` of a canonical basis is the perturbation of the `k`-th free
//! lattice pseudometric: it keeps that element's real parts on the main
//! diagonal and the superdiagonal. For every PT-symmetric `H` of the family a
//! pseudometric obeys `P[N-1-i][N-1-j] = conj(P[i][j])`, so those real parts
//! carry exactly `N` free values and fix the element uniquely. The resulting
//! basis has the first-row echelon shape: row one of element `k` vanishes
//! before column `k` and has `1` at column `k`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::eigen::{eigen_decompose, eigenvalues};
use crate::error::{Error, Result};
use crate::lattice::{HamiltonianMatrix, LatticeParams};
use crate::linalg::{intertwining_residual, max_norm, sorted_svd, CMatrix, RMatrix};
use crate::spectral::{is_real_spectrum, max_imag, min_gap, DEFAULT_REALITY_TOL};

/// Largest dimension accepted by the `N^2 x N^2` null-space solver.
pub const NULLSPACE_MAX_DIM: usize = 32;

/// Residual contract for basis elements (relative, max norms).
pub const BASIS_RESIDUAL_BOUND: f64 = 1e-10;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Complex matrix equal to its conjugate transpose by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Mirror the upper triangle; the diagonal keeps its real part.
    pub fn from_upper(m: &CMatrix) -> Self {
        let n = m.nrows();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                out[(i, j)] = m[(i, j)];
                out[(j, i)] = m[(i, j)].conj();
            }
        }
        Self(out)
    }

    /// Accept `m` if it is Hermitian to within `tol` (max norm).
    pub fn try_new(m: CMatrix, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension("Hermitian matrix must be square".into()));
        }
        let dev = max_norm(&(&m - m.adjoint()));
        if dev > tol * (1.0 + max_norm(&m)) {
            return Err(Error::InvalidInput(format!(
                "matrix is not Hermitian (deviation {dev:.3e})"
            )));
        }
        Ok(Self::from_upper(&m))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    /// `N^2` real coordinates, isometric to the Frobenius norm:
    /// diagonal entries, then `sqrt2 * (Re, Im)` of each upper entry row by row.
    pub fn real_coords(&self) -> DVector<f64> {
        let n = self.dim();
        let mut c = Vec::with_capacity(n * n);
        for i in 0..n {
            c.push(self.0[(i, i)].re);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                c.push(SQRT2 * self.0[(i, j)].re);
                c.push(SQRT2 * self.0[(i, j)].im);
            }
        }
        DVector::from_vec(c)
    }

    pub fn from_real_coords(dim: usize, coords: &[f64]) -> Self {
        assert_eq!(coords.len(), dim * dim, "coordinate length must be N^2");
        let mut m = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(coords[i], 0.0);
        }
        let mut idx = dim;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let z = Complex64::new(coords[idx], coords[idx + 1]) / SQRT2;
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
                idx += 2;
            }
        }
        Self(m)
    }

    /// Real linear combination `sum_k coeffs[k] * elems[k]`.
    pub fn combine(elems: &[HermitianMatrix], coeffs: &[f64]) -> Result<Self> {
        if elems.is_empty() || elems.len() != coeffs.len() {
            return Err(Error::InvalidInput(format!(
                "{} coefficients for {} matrices",
                coeffs.len(),
                elems.len()
            )));
        }
        let n = elems[0].dim();
        let mut acc = CMatrix::zeros(n, n);
        for (e, &c) in elems.iter().zip(coeffs) {
            if e.dim() != n {
                return Err(Error::Dimension("mixed dimensions in combination".into()));
            }
            acc += e.matrix() * Complex64::new(c, 0.0);
        }
        Ok(Self::from_upper(&acc))
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Complex64>> = self
            .0
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<Complex64>> = Vec::deserialize(d)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("Hermitian matrix must be square"));
        }
        let m = CMatrix::from_fn(n, n, |i, j| rows[i][j]);
        HermitianMatrix::try_new(m, 1e-12).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NullSpaceOptions {
    /// Singular values at or below `rank_tol * sigma_max` span the null space.
    pub rank_tol: f64,
    /// Refuse spectra whose smallest eigenvalue gap is at or below
    /// `gap_tol * max(1, max|lambda|)`; `None` skips the check.
    pub gap_tol: Option<f64>,
}

impl Default for NullSpaceOptions {
    fn default() -> Self {
        Self {
            rank_tol: 1e-8,
            gap_tol: Some(1e-6),
        }
    }
}

/// Sparse listing of the Frobenius-orthonormal Hermitian basis used for coordinates.
fn hermitian_unit(dim: usize, index: usize) -> Vec<(usize, usize, Complex64)> {
    if index < dim {
        return vec![(index, index, Complex64::new(1.0, 0.0))];
    }
    let mut idx = dim;
    for i in 0..dim {
        for j in (i + 1)..dim {
            if index == idx {
                let a = Complex64::new(1.0 / SQRT2, 0.0);
                return vec![(i, j, a), (j, i, a)];
            }
            if index == idx + 1 {
                let b = Complex64::new(0.0, 1.0 / SQRT2);
                return vec![(i, j, b), (j, i, -b)];
            }
            idx += 2;
        }
    }
    unreachable!("index {index} outside Hermitian basis of dimension {dim}")
}

/// Coordinates of an anti-Hermitian matrix, isometric to the Frobenius norm.
fn antihermitian_coords(a: &CMatrix, out: &mut [f64]) {
    let n = a.nrows();
    for i in 0..n {
        out[i] = a[(i, i)].im;
    }
    let mut idx = n;
    for i in 0..n {
        for j in (i + 1)..n {
            out[idx] = SQRT2 * a[(i, j)].re;
            out[idx + 1] = SQRT2 * a[(i, j)].im;
            idx += 2;
        }
    }
}

/// Matrix of the real-linear map `P -> H^dag P - P H` in isometric coordinates.
pub fn intertwining_operator(h: &CMatrix) -> RMatrix {
    let n = h.nrows();
    let dim2 = n * n;
    let hd = h.adjoint();
    let mut op = RMatrix::zeros(dim2, dim2);
    let mut a = CMatrix::zeros(n, n);
    let mut col = vec![0.0; dim2];
    for b in 0..dim2 {
        a.fill(Complex64::new(0.0, 0.0));
        for (r, c, v) in hermitian_unit(n, b) {
            // (H^dag E)[:, c] += H^dag[:, r] v ; (E H)[r, :] += v H[c, :]
            for i in 0..n {
                a[(i, c)] += hd[(i, r)] * v;
                a[(r, i)] -= v * h[(c, i)];
            }
        }
        antihermitian_coords(&a, &mut col);
        op.column_mut(b).copy_from_slice(&col);
    }
    op
}

fn check_gap(h: &CMatrix, gap_tol: Option<f64>) -> Result<()> {
    if let Some(tol) = gap_tol {
        let ev = eigenvalues(h)?;
        let scale = ev.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
        let gap = min_gap(&ev);
        if gap <= tol * scale {
            return Err(Error::DegenerateSpectrum { min_gap: gap });
        }
    }
    Ok(())
}

/// Basis of the real space `{P Hermitian : H^dag P = P H}` via singular-value thresholding.
pub fn commutant_null_space(h: &CMatrix, opts: &NullSpaceOptions) -> Result<Vec<HermitianMatrix>> {
    let n = h.nrows();
    if n != h.ncols() || n == 0 {
        return Err(Error::Dimension("Hamiltonian must be square and nonempty".into()));
    }
    if n > NULLSPACE_MAX_DIM {
        return Err(Error::Dimension(format!(
            "null-space solver limited to N <= {NULLSPACE_MAX_DIM}, got {n}; use spectral_pseudometrics"
        )));
    }
    check_gap(h, opts.gap_tol)?;
    let op = intertwining_operator(h);
    let (sigma, v_t) = sorted_svd(&op);
    let smax = sigma.first().copied().unwrap_or(0.0);
    let threshold = opts.rank_tol * smax;
    let below = sigma.iter().copied().find(|&s| s <= threshold).unwrap_or(0.0);
    let above = sigma
        .iter()
        .copied()
        .filter(|&s| s > threshold)
        .fold(f64::INFINITY, f64::min);
    if above < 10.0 * threshold || below > threshold / 10.0 {
        return Err(Error::IllSeparated {
            below,
            above,
            threshold,
        });
    }
    Ok(sigma
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= threshold)
        .map(|(k, _)| {
            let coords: Vec<f64> = v_t.row(k).iter().copied().collect();
            HermitianMatrix::from_real_coords(n, &coords)
        })
        .collect())
}

/// Rank-one pseudometrics `eta eta^dag` from unit eigenvectors of `H^dag`.
pub fn spectral_pseudometrics(
    h: &CMatrix,
    reality_tol: f64,
    gap_tol: f64,
) -> Result<Vec<HermitianMatrix>> {
    let dec = eigen_decompose(&h.adjoint())?;
    if !is_real_spectrum(&dec.values, reality_tol) {
        return Err(Error::ComplexSpectrum {
            max_imag: max_imag(&dec.values),
        });
    }
    let scale = dec.values.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
    let gap = min_gap(&dec.values);
    if gap <= gap_tol * scale {
        return Err(Error::DegenerateSpectrum { min_gap: gap });
    }
    Ok((0..dec.values.len())
        .map(|k| {
            let eta = dec.vectors.column(k);
            HermitianMatrix::from_upper(&(eta * eta.adjoint()))
        })
        .collect())
}

/// Where an echelon pivot sits: row, column (0-based) and which part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pivot {
    pub row: usize,
    pub col: usize,
    pub imaginary: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Normalization {
    /// Anchored to the free-lattice basis; first-row echelon shape verified.
    Standard,
    /// Reduced echelon over the row-major coordinate list, with the pivots found.
    NonStandard { pivots: Vec<Pivot> },
}

/// Canonically normalized pseudometrics for one Hamiltonian.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PseudometricBasis {
    pub params: Option<LatticeParams>,
    pub dim: usize,
    pub elements: Vec<HermitianMatrix>,
    pub normalization: Normalization,
}

impl PseudometricBasis {
    /// Element `k`, 1-based as in `P^k`.
    pub fn element(&self, k: usize) -> &HermitianMatrix {
        &self.elements[k - 1]
    }

    /// Largest relative intertwining residual over the elements.
    pub fn max_residual(&self, h: &CMatrix) -> f64 {
        self.elements
            .iter()
            .map(|p| intertwining_residual(h, p.matrix()))
            .fold(0.0, f64::max)
    }
}

/// Entry `(i, j)` (1-based) of the `k`-th free-lattice pseudometric of size `dim`.
///
/// These are the Chebyshev polynomials `U_{k-1}(-L/2)` of the free chain `L`;
/// entry is `1` iff `|i-j| <= k-1`, `i+j` has the parity of `k+1`, and
/// `k+1 <= i+j <= 2 dim + 1 - k`, otherwise `0`.
pub fn laplacian_entry(dim: usize, k: usize, i: usize, j: usize) -> f64 {
    let s = i + j;
    if i.abs_diff(j) < k && (s + k + 1) % 2 == 0 && s > k && s + k <= 2 * dim + 1 {
        1.0
    } else {
        0.0
    }
}

pub fn laplacian_element(dim: usize, k: usize) -> HermitianMatrix {
    HermitianMatrix(CMatrix::from_fn(dim, dim, |i, j| {
        Complex64::new(laplacian_entry(dim, k, i + 1, j + 1), 0.0)
    }))
}

/// Canonical pseudometric basis of the free chain of length `dim`.
pub fn laplacian_pseudometrics(dim: usize) -> Result<PseudometricBasis> {
    if dim == 0 {
        return Err(Error::Dimension("dimension must be positive".into()));
    }
    Ok(PseudometricBasis {
        params: None,
        dim,
        elements: (1..=dim).map(|k| laplacian_element(dim, k)).collect(),
        normalization: Normalization::Standard,
    })
}

/// The `N` real values anchoring the labelling: real parts of the first half
/// of the diagonal, then of the first half of the superdiagonal.
fn anchor_coords(p: &CMatrix) -> Vec<f64> {
    let n = p.nrows();
    let mut c: Vec<f64> = (0..n.div_ceil(2)).map(|i| p[(i, i)].re).collect();
    c.extend((0..n / 2).map(|i| p[(i, i + 1)].re));
    c
}

fn first_row_echelon_ok(elements: &[HermitianMatrix], tol: f64) -> bool {
    elements.iter().enumerate().all(|(k, p)| {
        let scale = max_norm(p.matrix()).max(1.0);
        (0..k).all(|j| p.get(0, j).norm() <= tol * scale) && (p.get(0, k) - 1.0).norm() <= tol * scale
    })
}

/// Reduced echelon form over the row-major coordinate list
/// `[Re P11, Im P11, Re P12, Im P12, ..., Re P1N, Im P1N, Re P21, ...]`.
fn row_major_echelon(raw: &[HermitianMatrix]) -> (Vec<HermitianMatrix>, Vec<Pivot>) {
    let n = raw[0].dim();
    let ncoord = 2 * n * n;
    let coord_of = |p: &HermitianMatrix| -> Vec<f64> {
        let mut v = Vec::with_capacity(ncoord);
        for i in 0..n {
            for j in 0..n {
                v.push(p.get(i, j).re);
                v.push(p.get(i, j).im);
            }
        }
        v
    };
    let mut rows: Vec<Vec<f64>> = raw.iter().map(coord_of).collect();
    let mut combos: Vec<Vec<f64>> = (0..raw.len())
        .map(|k| (0..raw.len()).map(|m| if m == k { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale = rows.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()));
    let tol = 1e-9 * scale.max(1.0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncoord {
        if r == rows.len() {
            break;
        }
        let best = (r..rows.len()).max_by(|&a, &b| rows[a][c].abs().total_cmp(&rows[b][c].abs()));
        let Some(best) = best else { break };
        if rows[best][c].abs() <= tol {
            continue;
        }
        rows.swap(r, best);
        combos.swap(r, best);
        let pv = rows[r][c];
        rows[r].iter_mut().for_each(|x| *x /= pv);
        combos[r].iter_mut().for_each(|x| *x /= pv);
        for other in 0..rows.len() {
            if other != r && rows[other][c] != 0.0 {
                let f = rows[other][c];
                let (pr, pc) = (rows[r].clone(), combos[r].clone());
                rows[other].iter_mut().zip(&pr).for_each(|(x, y)| *x -= f * y);
                combos[other].iter_mut().zip(&pc).for_each(|(x, y)| *x -= f * y);
            }
        }
        let cell = c / 2;
        pivots.push(Pivot {
            row: cell / n,
            col: cell % n,
            imaginary: c % 2 == 1,
        });
        r += 1;
    }
    let elements = combos
        .iter()
        .map(|w| HermitianMatrix::combine(raw, w).expect("matching lengths"))
        .collect();
    (elements, pivots)
}

/// Relabel an arbitrary basis of the pseudometric space into canonical form.
pub fn canonicalize_basis(raw: &[HermitianMatrix]) -> Result<PseudometricBasis> {
    let Some(first) = raw.first() else {
        return Err(Error::BasisSize { got: 0, expected: 1 });
    };
    let n = first.dim();
    if raw.len() != n {
        return Err(Error::BasisSize {
            got: raw.len(),
            expected: n,
        });
    }
    if raw.iter().any(|p| p.dim() != n) {
        return Err(Error::Dimension("mixed dimensions in raw basis".into()));
    }
    let coords = RMatrix::from_columns(&raw.iter().map(|p| p.real_coords()).collect::<Vec<_>>());
    let (sig, _) = sorted_svd(&coords);
    if sig[n - 1] <= 1e-10 * sig[0] {
        return Err(Error::InvalidInput("raw basis is linearly dependent".into()));
    }

    let anchors = RMatrix::from_columns(
        &raw.iter()
            .map(|p| DVector::from_vec(anchor_coords(p.matrix())))
            .collect::<Vec<_>>(),
    );
    let (asig, _) = sorted_svd(&anchors);
    if asig[n - 1] > 1e-12 * asig[0] {
        let lu = anchors.clone().lu();
        let mut elements = Vec::with_capacity(n);
        for k in 1..=n {
            let target = DVector::from_vec(anchor_coords(laplacian_element(n, k).matrix()));
            let coef = lu
                .solve(&target)
                .ok_or_else(|| Error::InvalidInput("anchor system is singular".into()))?;
            elements.push(HermitianMatrix::combine(raw, coef.as_slice())?);
        }
        if first_row_echelon_ok(&elements, 1e-8) {
            return Ok(PseudometricBasis {
                params: None,
                dim: n,
                elements,
                normalization: Normalization::Standard,
            });
        }
    }
    let (elements, pivots) = row_major_echelon(raw);
    Ok(PseudometricBasis {
        params: None,
        dim: n,
        elements,
        normalization: Normalization::NonStandard { pivots },
    })
}

/// Null space, canonical labelling and residual check in one call.
pub fn pseudometric_basis(h: &HamiltonianMatrix, opts: &NullSpaceOptions) -> Result<PseudometricBasis> {
    let raw = commutant_null_space(h.matrix(), opts)?;
    if raw.len() != h.dim() {
        return Err(Error::BasisSize {
            got: raw.len(),
            expected: h.dim(),
        });
    }
    let mut basis = canonicalize_basis(&raw)?;
    basis.params = Some(h.params().clone());
    let residual = basis.max_residual(h.matrix());
    if residual > BASIS_RESIDUAL_BOUND {
        return Err(Error::Residual {
            residual,
            bound: BASIS_RESIDUAL_BOUND,
        });
    }
    Ok(basis)
}

/// Same as [`pseudometric_basis`] but from the rank-one eigenvector route;
/// serves dimensions beyond the null-space solver.
pub fn pseudometric_basis_spectral(h: &HamiltonianMatrix) -> Result<PseudometricBasis> {
    let raw = spectral_pseudometrics(h.matrix(), DEFAULT_REALITY_TOL, 1e-6)?;
    let mut basis = canonicalize_basis(&raw)?;
    basis.params = Some(h.params().clone());
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hamiltonian, build_laplacian, parity_matrix};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn coords_round_trip() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.5, -0.25), c(0.5, 0.25), c(-2.0, 0.0)],
        );
        let p = HermitianMatrix::try_new(m.clone(), 1e-14).unwrap();
        let back = HermitianMatrix::from_real_coords(2, p.real_coords().as_slice());
        assert_eq!(back.matrix(), &m);
        let fro: f64 = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((p.real_coords().norm() - fro).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(HermitianMatrix::try_new(m, 1e-12).is_err());
    }

    #[test]
    fn laplacian_closed_form_follows_chebyshev_recurrence() {
        // P1 = I, P2 = -L, P(k+1) = (-L) P(k) - P(k-1).
        for dim in [1usize, 2, 3, 4, 5, 6, 9] {
            let l = build_laplacian(dim).unwrap().into_matrix();
            let minus_l = -l;
            let mut prev = CMatrix::zeros(dim, dim);
            let mut cur = CMatrix::identity(dim, dim);
            for k in 1..=dim {
                assert_eq!(&cur, laplacian_element(dim, k).matrix(), "dim {dim} k {k}");
                let next = &minus_l * &cur - &prev;
                prev = cur;
                cur = next;
            }
        }
    }

    #[test]
    fn laplacian_last_element_is_parity() {
        for dim in [2usize, 3, 6, 11] {
            assert_eq!(laplacian_element(dim, dim).matrix(), &parity_matrix(dim));
            assert_eq!(laplacian_element(dim, 1).matrix(), &CMatrix::identity(dim, dim));
        }
    }

    #[test]
    fn null_space_dimension_small_models() {
        let opts = NullSpaceOptions::default();
        let h = build_hamiltonian(&LatticeParams::new(vec![0.3, 0.2]).unwrap()).unwrap();
        assert_eq!(commutant_null_space(h.matrix(), &opts).unwrap().len(), 4);
        let l = build_laplacian(5).unwrap();
        assert_eq!(commutant_null_space(l.matrix(), &opts).unwrap().len(), 5);
    }

    #[test]
    fn exceptional_point_is_flagged() {
        let h = build_hamiltonian(&LatticeParams::new(vec![1.0]).unwrap()).unwrap();
        let err = commutant_null_space(h.matrix(), &NullSpaceOptions::default()).unwrap_err();
        assert!(matches!(err, Error::DegenerateSpectrum { .. }), "{err:?}");
    }

    #[test]
    fn spectral_route_refuses_complex_spectrum() {
        let h = build_hamiltonian(&LatticeParams::new(vec![1.2]).unwrap()).unwrap();
        let err = spectral_pseudometrics(h.matrix(), DEFAULT_REALITY_TOL, 1e-6).unwrap_err();
        assert!(matches!(err, Error::ComplexSpectrum { .. }));
    }

    #[test]
    fn spectral_route_two_site_laplacian() {
        let l = build_laplacian(2).unwrap();
        let ps = spectral_pseudometrics(l.matrix(), DEFAULT_REALITY_TOL, 1e-6).unwrap();
        // eta = (1, -+1)/sqrt2 -> (I -+ X)/2
        let sum = ps[0].matrix() + ps[1].matrix();
        let diff = ps[0].matrix() - ps[1].matrix();
        assert!((sum - CMatrix::identity(2, 2)).iter().all(|z| z.norm() < 1e-12));
        assert!((diff[(0, 1)].re.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonicalize_rejects_wrong_size() {
        let ps = laplacian_pseudometrics(3).unwrap().elements;
        assert!(matches!(
            canonicalize_basis(&ps[..2]),
            Err(Error::BasisSize { got: 2, expected: 3 })
        ));
        let dup = vec![ps[0].clone(), ps[0].clone(), ps[1].clone()];
        assert!(canonicalize_basis(&dup).is_err());
    }

    #[test]
    fn echelon_fallback_reports_pivots() {
        // A rotated free-chain basis is fine; a basis of a non-family matrix
        // whose anchors degenerate falls back to the reduced echelon form.
        let dim = 3;
        let mut m = CMatrix::zeros(dim, dim);
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 1)] = c(2.0, 0.0);
        m[(2, 2)] = c(3.0, 0.0);
        // Commutant of a diagonal matrix with distinct entries: diagonal matrices.
        let raw = commutant_null_space(&m, &NullSpaceOptions::default()).unwrap();
        assert_eq!(raw.len(), 3);
        let basis = canonicalize_basis(&raw).unwrap();
        match basis.normalization {
            Normalization::NonStandard { pivots } => {
                assert_eq!(pivots.len(), 3);
                assert_eq!((pivots[0].row, pivots[0].col), (0, 0));
                assert_eq!((pivots[1].row, pivots[1].col), (1, 1));
            }
            Normalization::Standard => panic!("diagonal commutant cannot be anchored"),
        }
    }
}
