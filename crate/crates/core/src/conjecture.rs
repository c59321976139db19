//! Structure checks for the alternating model `(a, -a, a, ...)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::commutant::{laplacian_element, pseudometric_basis, NullSpaceOptions, PseudometricBasis};
use crate::error::{Error, Result};
use crate::lattice::{build_hamiltonian, LatticeParams, ParameterDirection};
use crate::linalg::max_norm;
use crate::patterns::{match_all, reference_patterns, ReferenceModel, DEFAULT_PATTERN_TOL};
use crate::spectral::{find_exceptional_point, EpOptions};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub dim: usize,
    pub alpha: f64,
    /// Second coupling used for the parameter-independence check.
    pub alpha_ref: f64,
    /// Exceptional point of the alternating direction at this size.
    pub alpha_crit: f64,
    pub tol: f64,
    /// Every nonzero entry lies in `{1, i a, -i a}`.
    pub entries_in_set: bool,
    pub max_entry_deviation: f64,
    /// Even-indexed elements coincide at `alpha` and `alpha_ref`.
    pub even_parameter_free: bool,
    pub max_even_deviation: f64,
    /// Largest deviation of even-indexed elements from the free-chain ones.
    pub max_even_vs_free: f64,
    /// Skeleton and classes equal to the stored N=6 reference; `None` for other sizes.
    pub reference_match: Option<bool>,
    /// Smallest eigenvalue of the first element.
    pub first_min_eigenvalue: f64,
}

impl ConjectureReport {
    pub fn holds(&self) -> bool {
        self.entries_in_set && self.even_parameter_free && self.reference_match.unwrap_or(true)
    }
}

pub fn alternating_params(dim: usize, alpha: f64) -> Result<LatticeParams> {
    if dim == 0 || dim % 2 != 0 {
        return Err(Error::Dimension(format!("alternating model needs even N, got {dim}")));
    }
    LatticeParams::new(
        (0..dim / 2)
            .map(|k| if k % 2 == 0 { alpha } else { -alpha + 0.0 })
            .collect(),
    )
}

fn alternating_basis(dim: usize, alpha: f64) -> Result<PseudometricBasis> {
    let h = build_hamiltonian(&alternating_params(dim, alpha)?)?;
    pseudometric_basis(&h, &NullSpaceOptions::default())
}

/// Exceptional point of the alternating direction for an `N`-site lattice.
pub fn alternating_critical(dim: usize) -> Result<f64> {
    if dim == 0 || dim % 2 != 0 {
        return Err(Error::Dimension(format!("alternating model needs even N, got {dim}")));
    }
    let dir = ParameterDirection::alternating(dim / 2)?;
    let opts = EpOptions {
        p_max: Some(1.5),
        ..EpOptions::default()
    };
    Ok(find_exceptional_point(&dir, &opts)?.bracket.0)
}

/// Check entry set, parameter independence of even elements and (at N=6)
/// the stored reference skeleton, comparing against `alpha / 2`.
pub fn verify_alternating_conjecture(dim: usize, alpha: f64, tol: f64) -> Result<ConjectureReport> {
    verify_alternating_conjecture_with(dim, alpha, 0.5 * alpha, tol)
}

pub fn verify_alternating_conjecture_with(
    dim: usize,
    alpha: f64,
    alpha_ref: f64,
    tol: f64,
) -> Result<ConjectureReport> {
    if !alpha.is_finite() || !alpha_ref.is_finite() {
        return Err(Error::InvalidInput("coupling must be finite".into()));
    }
    if alpha == 0.0 || alpha_ref == 0.0 || alpha == alpha_ref {
        return Err(Error::InvalidInput(
            "need two distinct nonzero couplings".into(),
        ));
    }
    let alpha_crit = alternating_critical(dim)?;
    for a in [alpha, alpha_ref] {
        if a.abs() >= alpha_crit {
            return Err(Error::OutsideDomain(format!(
                "|a| = {} is not below the alternating exceptional point {alpha_crit:.6} for N = {dim}",
                a.abs()
            )));
        }
    }
    let basis = alternating_basis(dim, alpha)?;
    let other = alternating_basis(dim, alpha_ref)?;

    let targets = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, alpha),
        Complex64::new(0.0, -alpha),
    ];
    let mut max_entry_deviation = 0.0_f64;
    for p in &basis.elements {
        for z in p.matrix().iter() {
            if z.norm() <= tol {
                continue;
            }
            let d = targets.iter().map(|t| (z - t).norm()).fold(f64::INFINITY, f64::min);
            max_entry_deviation = max_entry_deviation.max(d);
        }
    }

    let mut max_even_deviation = 0.0_f64;
    let mut max_even_vs_free = 0.0_f64;
    for k in (2..=dim).step_by(2) {
        let a = basis.element(k).matrix();
        max_even_deviation = max_even_deviation.max(max_norm(&(a - other.element(k).matrix())));
        max_even_vs_free = max_even_vs_free.max(max_norm(&(a - laplacian_element(dim, k).matrix())));
    }

    let reference_match = if dim == 6 {
        let matches = match_all(&basis, &reference_patterns(ReferenceModel::Alternating), DEFAULT_PATTERN_TOL)?;
        Some(matches.iter().all(|m| m.direct && m.class_mismatches.is_empty()))
    } else {
        None
    };

    let first_min_eigenvalue = crate::linalg::hermitian_eigenvalues(basis.element(1).matrix())[0];

    Ok(ConjectureReport {
        dim,
        alpha,
        alpha_ref,
        alpha_crit,
        tol,
        entries_in_set: max_entry_deviation <= tol,
        max_entry_deviation,
        even_parameter_free: max_even_deviation <= tol,
        max_even_deviation,
        max_even_vs_free,
        reference_match,
        first_min_eigenvalue,
    })
}
