//! Parameter and matrix data model for the PT-symmetric lattice.
//!
//! A model with `n` couplings `(g_1, ..., g_n)` lives on a chain of `N = 2n`
//! sites. Hopping is fixed at `-1`; site `k <= n` carries the potential
//! `i g_k` and its mirror site `N + 1 - k` carries `-i g_k`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_norm, CMatrix};

/// Real couplings `(g_1, ..., g_n)` defining the imaginary diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LatticeParams(Vec<f64>);

impl LatticeParams {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Dimension("parameter list is empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite coupling {bad}")));
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Number of couplings `n`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Matrix dimension `N = 2n`.
    pub fn dim(&self) -> usize {
        2 * self.0.len()
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|v| -v).collect())
    }

    /// Euclidean norm of the coupling vector.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Copy with coupling `index` (0-based) replaced.
    pub fn with(&self, index: usize, value: f64) -> Result<Self> {
        if index >= self.0.len() {
            return Err(Error::InvalidInput(format!(
                "coupling index {} out of range 1..={}",
                index + 1,
                self.0.len()
            )));
        }
        let mut v = self.0.clone();
        v[index] = value;
        Self::new(v)
    }
}

impl TryFrom<Vec<f64>> for LatticeParams {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LatticeParams> for Vec<f64> {
    fn from(p: LatticeParams) -> Self {
        p.0
    }
}

impl fmt::Display for LatticeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| format!("{v}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// The `2n x 2n` PT-symmetric tridiagonal Hamiltonian built from [`LatticeParams`].
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianMatrix {
    params: LatticeParams,
    matrix: CMatrix,
}

impl HamiltonianMatrix {
    pub fn params(&self) -> &LatticeParams {
        &self.params
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> CMatrix {
        self.matrix.adjoint()
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// Free-lattice reference operator: `-1` hopping, zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianMatrix {
    matrix: CMatrix,
}

impl LaplacianMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

fn hopping_chain(dim: usize) -> CMatrix {
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..dim.saturating_sub(1) {
        m[(k, k + 1)] = Complex64::new(-1.0, 0.0);
        m[(k + 1, k)] = Complex64::new(-1.0, 0.0);
    }
    m
}

pub fn build_hamiltonian(params: &LatticeParams) -> Result<HamiltonianMatrix> {
    if params.is_empty() {
        return Err(Error::Dimension("parameter list is empty".into()));
    }
    let n = params.len();
    let dim = 2 * n;
    let mut m = hopping_chain(dim);
    for (k, &g) in params.values().iter().enumerate() {
        m[(k, k)] = Complex64::new(0.0, g);
        m[(dim - 1 - k, dim - 1 - k)] = Complex64::new(0.0, -g);
    }
    Ok(HamiltonianMatrix {
        params: params.clone(),
        matrix: m,
    })
}

pub fn build_laplacian(dim: usize) -> Result<LaplacianMatrix> {
    if dim == 0 {
        return Err(Error::Dimension("laplacian dimension must be positive".into()));
    }
    Ok(LaplacianMatrix {
        matrix: hopping_chain(dim),
    })
}

/// Anti-identity (index reversal) matrix.
pub fn parity_matrix(dim: usize) -> CMatrix {
    let mut p = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..dim {
        p[(k, dim - 1 - k)] = Complex64::new(1.0, 0.0);
    }
    p
}

/// True iff `max|P M P - conj(M)| <= tol * (1 + max|M|)`.
pub fn pt_symmetry_check(m: &CMatrix, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let dim = m.nrows();
    // P M P only reverses both indices.
    let mut dev = 0.0_f64;
    for i in 0..dim {
        for j in 0..dim {
            let d = m[(dim - 1 - i, dim - 1 - j)] - m[(i, j)].conj();
            dev = dev.max(d.norm());
        }
    }
    dev <= tol * (1.0 + max_norm(m))
}

/// Which family a [`ParameterDirection`] belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "site")]
pub enum Preset {
    /// Only coupling `k` (1-based) nonzero.
    SingleSite(usize),
    /// `g_1 = -g_2 = g_3 = -g_4 = ...`
    Alternating,
    /// All couplings equal.
    Uniform,
    Custom,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    /// Accepts `single:k`, `alternating` and `uniform`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "alternating" => Ok(Preset::Alternating),
            "uniform" => Ok(Preset::Uniform),
            _ => {
                let site = s
                    .strip_prefix("single:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .filter(|k| *k >= 1)
                    .ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "unknown preset {s:?}; expected single:k, alternating or uniform"
                        ))
                    })?;
                Ok(Preset::SingleSite(site))
            }
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::SingleSite(k) => write!(f, "single:{k}"),
            Preset::Alternating => write!(f, "alternating"),
            Preset::Uniform => write!(f, "uniform"),
            Preset::Custom => write!(f, "custom"),
        }
    }
}

/// Unit vector in coupling space together with the family it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterDirection {
    unit: Vec<f64>,
    preset: Preset,
}

impl ParameterDirection {
    pub fn single_site(site: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("direction needs n >= 1".into()));
        }
        if site == 0 || site > n {
            return Err(Error::InvalidInput(format!(
                "single-site index {site} outside 1..={n}"
            )));
        }
        let mut unit = vec![0.0; n];
        unit[site - 1] = 1.0;
        Ok(Self {
            unit,
            preset: Preset::SingleSite(site),
        })
    }

    pub fn alternating(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("direction needs n >= 1".into()));
        }
        let s = 1.0 / (n as f64).sqrt();
        let unit = (0..n)
            .map(|k| if k % 2 == 0 { s } else { -s })
            .collect();
        Ok(Self {
            unit,
            preset: Preset::Alternating,
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("direction needs n >= 1".into()));
        }
        Ok(Self {
            unit: vec![1.0 / (n as f64).sqrt(); n],
            preset: Preset::Uniform,
        })
    }

    /// Arbitrary direction; normalized to unit Euclidean length.
    pub fn custom(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::Dimension("direction needs n >= 1".into()));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite direction component".into()));
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidInput("zero direction vector".into()));
        }
        Ok(Self {
            unit: v.into_iter().map(|x| x / norm).collect(),
            preset: Preset::Custom,
        })
    }

    /// Expand a preset for `n` couplings. `Custom` is rejected here.
    pub fn from_preset(preset: Preset, n: usize) -> Result<Self> {
        match preset {
            Preset::SingleSite(k) => Self::single_site(k, n),
            Preset::Alternating => Self::alternating(n),
            Preset::Uniform => Self::uniform(n),
            Preset::Custom => Err(Error::InvalidInput(
                "custom direction needs explicit components".into(),
            )),
        }
    }

    pub fn unit(&self) -> &[f64] {
        &self.unit
    }

    pub fn preset(&self) -> Preset {
        self.preset
    }

    pub fn n(&self) -> usize {
        self.unit.len()
    }

    /// Default upper end of the exceptional-point search.
    pub fn default_p_max(&self) -> f64 {
        match self.preset {
            Preset::SingleSite(_) => 1.5,
            _ => 0.5,
        }
    }

    /// Couplings at `magnitude` along this direction.
    ///
    /// Presets are rescaled so that every nonzero coupling has absolute value
    /// `magnitude`; custom directions are scaled by `magnitude` directly.
    pub fn to_params(&self, magnitude: f64) -> Result<LatticeParams> {
        if !(magnitude >= 0.0) || !magnitude.is_finite() {
            return Err(Error::InvalidInput(format!(
                "magnitude must be finite and >= 0, got {magnitude}"
            )));
        }
        let values = match self.preset {
            Preset::Custom => self.unit.iter().map(|x| x * magnitude).collect(),
            // Presets carry exactly +-magnitude rather than a rounded unit * sqrt(n).
            _ => self
                .unit
                .iter()
                .map(|x| {
                    if *x > 0.0 {
                        magnitude
                    } else if *x < 0.0 {
                        -magnitude + 0.0
                    } else {
                        0.0
                    }
                })
                .collect(),
        };
        LatticeParams::new(values)
    }
}

/// Free function form of [`ParameterDirection::to_params`].
pub fn direction_to_params(dir: &ParameterDirection, magnitude: f64) -> Result<LatticeParams> {
    dir.to_params(magnitude)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_site_boundary_model() {
        let h = build_hamiltonian(&LatticeParams::new(vec![0.5]).unwrap()).unwrap();
        let m = h.matrix();
        assert_eq!(m[(0, 0)], c(0.0, 0.5));
        assert_eq!(m[(0, 1)], c(-1.0, 0.0));
        assert_eq!(m[(1, 0)], c(-1.0, 0.0));
        assert_eq!(m[(1, 1)], c(0.0, -0.5));
    }

    #[test]
    fn diagonal_is_antisymmetric_about_center() {
        let h = build_hamiltonian(&LatticeParams::new(vec![0.3, 0.2]).unwrap()).unwrap();
        let diag: Vec<Complex64> = (0..4).map(|k| h.matrix()[(k, k)]).collect();
        assert_eq!(diag, vec![c(0.0, 0.3), c(0.0, 0.2), c(0.0, -0.2), c(0.0, -0.3)]);
        for k in 0..3 {
            assert_eq!(h.matrix()[(k, k + 1)], c(-1.0, 0.0));
        }
        assert_eq!(h.matrix()[(0, 2)], c(0.0, 0.0));
    }

    #[test]
    fn zero_couplings_match_laplacian() {
        let h = build_hamiltonian(&LatticeParams::zeros(2).unwrap()).unwrap();
        let l = build_laplacian(4).unwrap();
        assert_eq!(h.matrix(), l.matrix());
    }

    #[test]
    fn laplacian_small_and_odd() {
        let l = build_laplacian(2).unwrap();
        assert_eq!(l.matrix()[(0, 1)], c(-1.0, 0.0));
        assert_eq!(l.matrix()[(0, 0)], c(0.0, 0.0));
        let l3 = build_laplacian(3).unwrap();
        assert_eq!(l3.dim(), 3);
        assert!(pt_symmetry_check(l3.matrix(), 1e-12));
        assert!(matches!(build_laplacian(0), Err(Error::Dimension(_))));
    }

    #[test]
    fn empty_params_rejected() {
        assert!(matches!(LatticeParams::new(vec![]), Err(Error::Dimension(_))));
        assert!(LatticeParams::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn broken_sign_pattern_is_not_pt_symmetric() {
        let mut m = hopping_chain(4);
        let (a, b) = (0.3, 0.2);
        m[(0, 0)] = c(0.0, a);
        m[(1, 1)] = c(0.0, b);
        m[(2, 2)] = c(0.0, b);
        m[(3, 3)] = c(0.0, a);
        assert!(!pt_symmetry_check(&m, 1e-12));
        let h = build_hamiltonian(&LatticeParams::new(vec![a, b]).unwrap()).unwrap();
        assert!(pt_symmetry_check(h.matrix(), 1e-12));
    }

    #[test]
    fn preset_parse_round_trip() {
        for p in [Preset::SingleSite(3), Preset::Alternating, Preset::Uniform] {
            assert_eq!(p.to_string().parse::<Preset>().unwrap(), p);
        }
        assert!("single:0".parse::<Preset>().is_err());
        assert!("staggered".parse::<Preset>().is_err());
    }

    #[test]
    fn presets_expand() {
        let d = ParameterDirection::single_site(1, 5).unwrap();
        assert_eq!(d.to_params(1.0).unwrap().values(), &[1.0, 0.0, 0.0, 0.0, 0.0]);

        let d = ParameterDirection::alternating(5).unwrap();
        assert_eq!(
            d.to_params(0.2934).unwrap().values(),
            &[0.2934, -0.2934, 0.2934, -0.2934, 0.2934]
        );
        let unit_norm: f64 = d.unit().iter().map(|x| x * x).sum();
        assert!((unit_norm - 1.0).abs() < 1e-15);

        let d = ParameterDirection::uniform(5).unwrap();
        assert_eq!(d.to_params(0.1413).unwrap().values(), &[0.1413; 5]);
    }

    #[test]
    fn custom_direction_scales_directly() {
        let d = ParameterDirection::custom(vec![3.0, 4.0]).unwrap();
        let p = d.to_params(10.0).unwrap();
        assert!((p.values()[0] - 6.0).abs() < 1e-12);
        assert!((p.values()[1] - 8.0).abs() < 1e-12);
        assert!(ParameterDirection::custom(vec![0.0, 0.0]).is_err());
        assert!(d.to_params(-1.0).is_err());
    }
}
