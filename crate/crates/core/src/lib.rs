//! Spectra, exceptional points, pseudometrics and metrics of PT-symmetric
//! tridiagonal lattice Hamiltonians with purely imaginary boundary-antisymmetric
//! couplings.
//!
//! The Hamiltonian for couplings `g_1..g_n` is the `2n x 2n` matrix with `-1`
//! on both off-diagonals and diagonal `(i g_1, ..., i g_n, -i g_n, ..., -i g_1)`.

pub mod commutant;
pub mod conjecture;
pub mod eigen;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod metric;
pub mod patterns;
pub mod spectral;

pub use commutant::{
    canonicalize_basis, commutant_null_space, laplacian_pseudometrics, pseudometric_basis,
    spectral_pseudometrics, HermitianMatrix, Normalization, NullSpaceOptions, PseudometricBasis,
};
pub use conjecture::{verify_alternating_conjecture, ConjectureReport};
pub use eigen::{eigen_decompose, eigenvalues, EigenDecomposition};
pub use error::{Error, Result};
pub use lattice::{
    build_hamiltonian, build_laplacian, direction_to_params, parity_matrix, pt_symmetry_check,
    HamiltonianMatrix, LaplacianMatrix, LatticeParams, ParameterDirection, Preset,
};
pub use linalg::{CMatrix, RMatrix};
pub use num_complex::Complex64;
pub use metric::{
    assemble_metric, positivity_frontier, verify_quasi_hermiticity, FrontierSpec, MetricCandidate,
    Positivity, PositivityFrontier,
};
pub use patterns::{classify_pattern, EntryClass, EntryPattern, ReferenceModel, ReferencePattern};
pub use spectral::{
    find_exceptional_point, scan_domain_2d, spectrum_report, AxisGrid, DomainScan, EpOptions,
    ExceptionalPointResult, GridSpec, SpectrumReport,
};
