//! Metric candidates `Theta = sum_k eps_k P^k` and their positivity.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commutant::{HermitianMatrix, PseudometricBasis};
use crate::error::{Error, Result};
use crate::lattice::{build_hamiltonian, build_laplacian};
use crate::linalg::{hermitian_eigenvalues, intertwining_residual, CMatrix};

pub const DEFAULT_PD_TOL: f64 = 1e-10;
pub const DEFAULT_QH_TOL: f64 = 1e-10;
/// Largest dimension for dense coefficient grids.
pub const DENSE_GRID_MAX_DIM: usize = 12;
/// Largest number of cells a frontier may evaluate.
pub const FRONTIER_MAX_CELLS: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Positivity {
    Positive,
    Indefinite,
    SingularWithinTol,
}

impl Positivity {
    /// Verdict for the smallest eigenvalue of a matrix with spectral norm `scale`.
    pub fn decide(min_eigenvalue: f64, scale: f64, pd_tol: f64) -> Self {
        let bound = pd_tol * scale;
        if min_eigenvalue > bound {
            Positivity::Positive
        } else if min_eigenvalue.abs() <= bound {
            Positivity::SingularWithinTol
        } else {
            Positivity::Indefinite
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricCandidate {
    pub eps: Vec<f64>,
    pub theta: HermitianMatrix,
    pub positivity: Positivity,
    pub min_eigenvalue: f64,
    /// Distance of the spectrum from zero on the positive side; equals
    /// `min_eigenvalue`. Any `eps'` with `|eps' - eps|_1 * max_k |P^k|_2 < margin`
    /// stays positive.
    pub margin: f64,
    pub pd_tol: f64,
    /// Relative quasi-hermiticity residual against the basis Hamiltonian.
    pub residual: f64,
}

/// Hamiltonian the basis was computed for: the recorded couplings, or the
/// free chain when none are recorded.
pub fn basis_hamiltonian(basis: &PseudometricBasis) -> Result<CMatrix> {
    match &basis.params {
        Some(p) => Ok(build_hamiltonian(p)?.into_matrix()),
        None => Ok(build_laplacian(basis.dim)?.into_matrix()),
    }
}

fn combine_dense(basis: &PseudometricBasis, eps: &[f64]) -> CMatrix {
    let n = basis.dim;
    let mut acc = CMatrix::zeros(n, n);
    for (p, &e) in basis.elements.iter().zip(eps) {
        if e != 0.0 {
            acc += p.matrix() * Complex64::new(e, 0.0);
        }
    }
    acc
}

fn positivity_of(theta: &CMatrix, pd_tol: f64) -> (Positivity, f64) {
    let ev = hermitian_eigenvalues(theta);
    let scale = ev.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    (Positivity::decide(ev[0], scale, pd_tol), ev[0])
}

pub fn assemble_metric(basis: &PseudometricBasis, eps: &[f64]) -> Result<MetricCandidate> {
    assemble_metric_with(basis, eps, DEFAULT_PD_TOL)
}

pub fn assemble_metric_with(
    basis: &PseudometricBasis,
    eps: &[f64],
    pd_tol: f64,
) -> Result<MetricCandidate> {
    if eps.len() != basis.dim {
        return Err(Error::BasisSize {
            got: eps.len(),
            expected: basis.dim,
        });
    }
    if eps.iter().any(|e| !e.is_finite()) {
        return Err(Error::InvalidInput("non-finite coefficient".into()));
    }
    let theta = HermitianMatrix::from_upper(&combine_dense(basis, eps));
    let (positivity, min_eigenvalue) = positivity_of(theta.matrix(), pd_tol);
    let residual = intertwining_residual(&basis_hamiltonian(basis)?, theta.matrix());
    Ok(MetricCandidate {
        eps: eps.to_vec(),
        theta,
        positivity,
        min_eigenvalue,
        margin: min_eigenvalue,
        pd_tol,
        residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiHermiticityReport {
    /// `max|H^dag Theta - Theta H| / (max|H| * max|Theta|)`.
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn verify_quasi_hermiticity(h: &CMatrix, theta: &CMatrix, tol: f64) -> Result<QuasiHermiticityReport> {
    if h.shape() != theta.shape() || h.nrows() != h.ncols() {
        return Err(Error::Dimension(format!(
            "H is {:?}, Theta is {:?}",
            h.shape(),
            theta.shape()
        )));
    }
    let residual = intertwining_residual(h, theta);
    Ok(QuasiHermiticityReport {
        residual,
        tol,
        pass: residual <= tol,
    })
}

/// Coefficient region explored by [`positivity_frontier`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum FrontierSpec {
    /// Inclusive uniform grid over `eps_2..eps_N` with `eps_1` held at `first`.
    Grid {
        first: f64,
        min: f64,
        max: f64,
        steps: usize,
    },
    /// Uniform random draws in `[min, max]`. With `fix_first` the first
    /// coefficient is held at 1, otherwise all `N` coefficients are drawn.
    Sampled {
        samples: usize,
        min: f64,
        max: f64,
        seed: u64,
        fix_first: bool,
    },
}

impl FrontierSpec {
    pub fn grid(min: f64, max: f64, steps: usize) -> Self {
        FrontierSpec::Grid {
            first: 1.0,
            min,
            max,
            steps,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub eps: Vec<f64>,
    pub positivity: Positivity,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PositivityFrontier {
    pub spec: FrontierSpec,
    pub pd_tol: f64,
    pub points: Vec<FrontierPoint>,
    pub positive_count: usize,
    pub positive_fraction: f64,
}

/// Inclusive grid value `k` of `steps`; symmetric ranges hit zero exactly.
fn grid_value(min: f64, max: f64, steps: usize, k: usize) -> f64 {
    if steps == 1 {
        return min;
    }
    let last = (steps - 1) as f64;
    (min * (last - k as f64) + max * k as f64) / last
}

fn coefficient_points(spec: &FrontierSpec, dim: usize) -> Result<Vec<Vec<f64>>> {
    match *spec {
        FrontierSpec::Grid {
            first,
            min,
            max,
            steps,
        } => {
            if steps == 0 {
                return Err(Error::InvalidInput("empty coefficient grid".into()));
            }
            if dim > DENSE_GRID_MAX_DIM {
                return Err(Error::Dimension(format!(
                    "dense grids limited to N <= {DENSE_GRID_MAX_DIM}; use sampling"
                )));
            }
            let free = dim - 1;
            let total = (steps as f64).powi(free as i32);
            if total > FRONTIER_MAX_CELLS as f64 {
                return Err(Error::InvalidInput(format!(
                    "grid has {total:.0} cells, limit {FRONTIER_MAX_CELLS}"
                )));
            }
            let total = total as usize;
            Ok((0..total)
                .map(|mut idx| {
                    let mut eps = vec![first; dim];
                    // Last coefficient varies fastest.
                    for slot in (1..dim).rev() {
                        eps[slot] = grid_value(min, max, steps, idx % steps);
                        idx /= steps;
                    }
                    eps
                })
                .collect())
        }
        FrontierSpec::Sampled {
            samples,
            min,
            max,
            seed,
            fix_first,
        } => {
            if samples == 0 {
                return Err(Error::InvalidInput("empty coefficient sample".into()));
            }
            if samples > FRONTIER_MAX_CELLS {
                return Err(Error::InvalidInput(format!(
                    "{samples} samples, limit {FRONTIER_MAX_CELLS}"
                )));
            }
            if !(min < max) {
                return Err(Error::InvalidInput("sample range must have min < max".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..samples)
                .map(|_| {
                    (0..dim)
                        .map(|k| {
                            if k == 0 && fix_first {
                                1.0
                            } else {
                                rng.random_range(min..max)
                            }
                        })
                        .collect()
                })
                .collect())
        }
    }
}

/// Positivity verdicts over a coefficient grid or sample, in a fixed order.
pub fn positivity_frontier(
    basis: &PseudometricBasis,
    spec: &FrontierSpec,
    pd_tol: f64,
) -> Result<PositivityFrontier> {
    let pts = coefficient_points(spec, basis.dim)?;
    let points: Vec<FrontierPoint> = pts
        .into_par_iter()
        .map(|eps| {
            let (positivity, min_eigenvalue) = positivity_of(&combine_dense(basis, &eps), pd_tol);
            FrontierPoint {
                eps,
                positivity,
                min_eigenvalue,
            }
        })
        .collect();
    let positive_count = points
        .iter()
        .filter(|p| p.positivity == Positivity::Positive)
        .count();
    Ok(PositivityFrontier {
        spec: spec.clone(),
        pd_tol,
        positive_fraction: positive_count as f64 / points.len() as f64,
        positive_count,
        points,
    })
}
