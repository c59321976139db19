//! Spectral reality, exceptional points along parameter rays, and 2D
//! observability scans.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{eigen_decompose, eigenvalues};
use crate::error::{Error, Result};
use crate::lattice::{build_hamiltonian, HamiltonianMatrix, LatticeParams, ParameterDirection};

/// Default relative threshold on `max|Im lambda|` for calling a spectrum real.
pub const DEFAULT_REALITY_TOL: f64 = 1e-8;
pub const DEFAULT_PARAM_TOL: f64 = 1e-6;

/// Spectrum summary for one Hamiltonian.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub dim: usize,
    /// Sorted by real part, then imaginary part. Serialized as `[re, im]`.
    pub eigenvalues: Vec<Complex64>,
    pub max_imag: f64,
    pub min_gap: f64,
    /// `max_k ||H v_k - lambda_k v_k|| / ||H||_F` over unit eigenvectors.
    pub residual: f64,
    pub is_real: bool,
    pub reality_tol: f64,
    /// Condition number of the eigenvector matrix; blows up near an exceptional point.
    pub eigvec_condition: f64,
    /// Largest distance in a greedy conjugate pairing of the eigenvalues.
    pub conjugate_closure: f64,
}

pub fn max_imag(values: &[Complex64]) -> f64 {
    values.iter().fold(0.0_f64, |m, z| m.max(z.im.abs()))
}

/// Smallest pairwise distance (all pairs). Infinite for a single eigenvalue.
pub fn min_gap(values: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            gap = gap.min((a - b).norm());
        }
    }
    gap
}

/// `max|Im lambda| <= tol * max(1, max|lambda|)`.
pub fn is_real_spectrum(values: &[Complex64], tol: f64) -> bool {
    let scale = values.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
    max_imag(values) <= tol * scale
}

/// Largest partner distance when each eigenvalue is paired with the nearest
/// unused conjugate. Zero for a spectrum closed under conjugation.
pub fn conjugate_closure(values: &[Complex64]) -> f64 {
    let mut used = vec![false; values.len()];
    let mut worst = 0.0_f64;
    for z in values {
        let target = z.conj();
        let mut best: Option<(usize, f64)> = None;
        for (j, w) in values.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (w - target).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        if let Some((j, d)) = best {
            used[j] = true;
            worst = worst.max(d);
        }
    }
    worst
}

pub fn spectrum_report(h: &HamiltonianMatrix, reality_tol: f64) -> Result<SpectrumReport> {
    let dec = eigen_decompose(h.matrix())?;
    let sv = dec.vectors.singular_values();
    let smax = sv.iter().fold(0.0_f64, |m, &s| m.max(s));
    let smin = sv.iter().fold(f64::INFINITY, |m, &s| m.min(s));
    let eigvec_condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    Ok(SpectrumReport {
        dim: h.dim(),
        max_imag: max_imag(&dec.values),
        min_gap: min_gap(&dec.values),
        is_real: is_real_spectrum(&dec.values, reality_tol),
        conjugate_closure: conjugate_closure(&dec.values),
        eigenvalues: dec.values,
        residual: dec.residual,
        reality_tol,
        eigvec_condition,
    })
}

/// Reality verdict and `max|Im|` for the Hamiltonian of `params`, eigenvalues only.
pub fn reality_at(params: &LatticeParams, reality_tol: f64) -> Result<(bool, f64)> {
    let h = build_hamiltonian(params)?;
    let ev = eigenvalues(h.matrix())?;
    Ok((is_real_spectrum(&ev, reality_tol), max_imag(&ev)))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpOptions {
    /// Upper end of the search; `None` picks the direction's default.
    pub p_max: Option<f64>,
    pub param_tol: f64,
    pub reality_tol: f64,
    /// Number of uniform coarse-scan intervals on `[0, p_max]` before bisection.
    pub scan_points: usize,
    pub max_iter: usize,
}

impl Default for EpOptions {
    fn default() -> Self {
        Self {
            p_max: None,
            param_tol: DEFAULT_PARAM_TOL,
            reality_tol: DEFAULT_REALITY_TOL,
            scan_points: 32,
            max_iter: 60,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExceptionalPointResult {
    pub direction: ParameterDirection,
    pub dim: usize,
    pub p_crit: f64,
    /// Spectrum real at `bracket.0`, not real at `bracket.1`.
    pub bracket: (f64, f64),
    pub p_max: f64,
    pub param_tol: f64,
    pub reality_tol: f64,
    pub iterations: usize,
    /// First coarse-scan point past the crossing where the spectrum is real again.
    pub re_entry: Option<f64>,
    pub warnings: Vec<String>,
}

/// Locate the first loss of spectral reality along `dir`.
///
/// A uniform coarse scan finds the first non-real sample; bisection then
/// narrows `[last real sample, first non-real sample]` to `param_tol`.
pub fn find_exceptional_point(
    dir: &ParameterDirection,
    opts: &EpOptions,
) -> Result<ExceptionalPointResult> {
    let p_max = opts.p_max.unwrap_or_else(|| dir.default_p_max());
    if !(p_max > 0.0) || !p_max.is_finite() {
        return Err(Error::InvalidInput(format!("p_max must be positive, got {p_max}")));
    }
    if !(opts.param_tol > 0.0) {
        return Err(Error::InvalidInput("param_tol must be positive".into()));
    }
    let steps = opts.scan_points.max(1);
    let real_at = |p: f64| -> Result<bool> {
        Ok(reality_at(&dir.to_params(p)?, opts.reality_tol)?.0)
    };

    if real_at(p_max)? {
        return Err(Error::NotFoundInRange { p_max });
    }
    let samples: Vec<f64> = (0..=steps)
        .map(|k| p_max * k as f64 / steps as f64)
        .collect();
    let verdicts: Vec<bool> = samples
        .par_iter()
        .map(|&p| real_at(p))
        .collect::<Result<Vec<_>>>()?;
    if !verdicts[0] {
        return Err(Error::InvalidInput(
            "spectrum not real at zero coupling".into(),
        ));
    }
    let first_bad = verdicts
        .iter()
        .position(|v| !v)
        .expect("p_max verified non-real");
    let mut warnings = Vec::new();
    let re_entry = verdicts[first_bad..]
        .iter()
        .position(|v| *v)
        .map(|off| samples[first_bad + off]);
    if let Some(p) = re_entry {
        warnings.push(format!(
            "non-monotone reality predicate: spectrum real again at p = {p}; reporting first crossing"
        ));
    }

    let (mut lo, mut hi) = (samples[first_bad - 1], samples[first_bad]);
    let mut iterations = 0;
    while hi - lo > opts.param_tol && iterations < opts.max_iter {
        let mid = 0.5 * (lo + hi);
        if real_at(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    if hi - lo > opts.param_tol {
        warnings.push(format!(
            "bisection stopped at iteration cap with width {:.3e}",
            hi - lo
        ));
    }
    Ok(ExceptionalPointResult {
        direction: dir.clone(),
        dim: 2 * dir.n(),
        p_crit: 0.5 * (lo + hi),
        bracket: (lo, hi),
        p_max,
        param_tol: opts.param_tol,
        reality_tol: opts.reality_tol,
        iterations,
        re_entry,
        warnings,
    })
}

/// Uniform cell-centred sampling of one axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisGrid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisGrid {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidInput("grid needs at least one step per axis".into()));
        }
        if !(min.is_finite() && max.is_finite()) || max < min {
            return Err(Error::InvalidInput(format!("bad axis range [{min}, {max}]")));
        }
        Ok(Self { min, max, steps })
    }

    /// Centre of cell `k`. Written so that a range symmetric about zero
    /// yields exactly negated centres for mirrored cells.
    pub fn center(&self, k: usize) -> f64 {
        let s = self.steps as f64;
        let a = (2 * k + 1) as f64;
        let b = 2.0 * s - a;
        (self.max * a - (-self.min) * b) / (2.0 * s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x: AxisGrid,
    pub y: AxisGrid,
}

impl GridSpec {
    pub fn square(min: f64, max: f64, steps: usize) -> Result<Self> {
        let a = AxisGrid::new(min, max, steps)?;
        Ok(Self { x: a, y: a })
    }
}

/// Reality verdicts on a 2D slice of coupling space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DomainScan {
    /// 0-based coupling indices varied along x and y.
    pub axes: (usize, usize),
    pub fixed: LatticeParams,
    pub grid: GridSpec,
    pub reality_tol: f64,
    /// Row-major, `iy * grid.x.steps + ix`.
    pub is_real: Vec<bool>,
    pub max_imag: Vec<f64>,
}

impl DomainScan {
    pub fn verdict(&self, ix: usize, iy: usize) -> bool {
        self.is_real[iy * self.grid.x.steps + ix]
    }

    pub fn max_imag_at(&self, ix: usize, iy: usize) -> f64 {
        self.max_imag[iy * self.grid.x.steps + ix]
    }

    pub fn real_fraction(&self) -> f64 {
        self.is_real.iter().filter(|v| **v).count() as f64 / self.is_real.len() as f64
    }
}

/// Scan the plane spanned by couplings `axis_i` (x) and `axis_j` (y), 0-based,
/// holding the others at `fixed`.
pub fn scan_domain_2d(
    axis_i: usize,
    axis_j: usize,
    fixed: &LatticeParams,
    grid: &GridSpec,
    reality_tol: f64,
) -> Result<DomainScan> {
    let n = fixed.len();
    if axis_i == axis_j {
        return Err(Error::InvalidInput("scan axes must differ".into()));
    }
    if axis_i >= n || axis_j >= n {
        return Err(Error::InvalidInput(format!(
            "scan axes ({}, {}) outside 1..={n}",
            axis_i + 1,
            axis_j + 1
        )));
    }
    if grid.x.steps == 0 || grid.y.steps == 0 {
        return Err(Error::InvalidInput("degenerate grid".into()));
    }
    let (nx, ny) = (grid.x.steps, grid.y.steps);
    let cells: Vec<(bool, f64)> = (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let (iy, ix) = (idx / nx, idx % nx);
            let p = fixed
                .with(axis_i, grid.x.center(ix))?
                .with(axis_j, grid.y.center(iy))?;
            reality_at(&p, reality_tol)
        })
        .collect::<Result<Vec<_>>>()?;
    let (is_real, max_imag) = cells.into_iter().unzip();
    Ok(DomainScan {
        axes: (axis_i, axis_j),
        fixed: fixed.clone(),
        grid: *grid,
        reality_tol,
        is_real,
        max_imag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_laplacian;

    #[test]
    fn hermitian_limit_is_real_and_symmetric() {
        for n in [1usize, 3, 8] {
            let h = build_hamiltonian(&LatticeParams::zeros(n).unwrap()).unwrap();
            let r = spectrum_report(&h, DEFAULT_REALITY_TOL).unwrap();
            assert!(r.is_real);
            let k = r.eigenvalues.len();
            for i in 0..k {
                assert!((r.eigenvalues[i].re + r.eigenvalues[k - 1 - i].re).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_site_beyond_ep() {
        let h = build_hamiltonian(&LatticeParams::new(vec![1.2]).unwrap()).unwrap();
        let r = spectrum_report(&h, DEFAULT_REALITY_TOL).unwrap();
        assert!(!r.is_real);
        assert!((r.max_imag - 0.44_f64.sqrt()).abs() < 1e-12);
        assert!((r.max_imag - 0.66332).abs() < 5e-6);
    }

    #[test]
    fn two_site_ep_is_one() {
        let dir = ParameterDirection::single_site(1, 1).unwrap();
        let ep = find_exceptional_point(&dir, &EpOptions::default()).unwrap();
        assert!((ep.p_crit - 1.0).abs() <= 1e-6);
        assert!(ep.bracket.1 - ep.bracket.0 <= 1e-6);
        assert!(ep.re_entry.is_none());
    }

    #[test]
    fn ep_not_found_in_range() {
        let dir = ParameterDirection::single_site(1, 1).unwrap();
        let opts = EpOptions {
            p_max: Some(0.9),
            ..EpOptions::default()
        };
        assert!(matches!(
            find_exceptional_point(&dir, &opts),
            Err(Error::NotFoundInRange { .. })
        ));
    }

    #[test]
    fn min_gap_and_closure() {
        let vals = vec![
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(2.0, 0.0),
        ];
        assert!((min_gap(&vals) - 2.0).abs() < 1e-15);
        assert_eq!(conjugate_closure(&vals), 0.0);
        let skew = vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0)];
        assert!(conjugate_closure(&skew) > 2.9);
    }

    #[test]
    fn axis_centres_mirror_exactly() {
        let a = AxisGrid::new(-1.2, 1.2, 7).unwrap();
        for k in 0..7 {
            assert_eq!(a.center(k), -a.center(6 - k));
        }
        let b = AxisGrid::new(0.0, 1.0, 4).unwrap();
        assert!((b.center(0) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn laplacian_report_real() {
        let l = build_laplacian(4).unwrap();
        let dec = eigen_decompose(l.matrix()).unwrap();
        assert!(is_real_spectrum(&dec.values, DEFAULT_REALITY_TOL));
    }

    #[test]
    fn scan_rejects_bad_axes() {
        let fixed = LatticeParams::zeros(3).unwrap();
        let g = GridSpec::square(-1.0, 1.0, 4).unwrap();
        assert!(scan_domain_2d(0, 0, &fixed, &g, DEFAULT_REALITY_TOL).is_err());
        assert!(scan_domain_2d(0, 3, &fixed, &g, DEFAULT_REALITY_TOL).is_err());
        assert!(AxisGrid::new(-1.0, 1.0, 0).is_err());
    }
}
