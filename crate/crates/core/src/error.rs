use thiserror::Error;

/// Errors raised by the lattice, spectral, commutant and metric routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("eigensolver did not converge after {iterations} iterations (active block {lo}..={hi})")]
    NoConvergence { iterations: usize, lo: usize, hi: usize },

    #[error("eigenpair residual {residual:.3e} exceeds contract {bound:.3e}")]
    Residual { residual: f64, bound: f64 },

    #[error("no exceptional point found in [0, {p_max}]: spectrum still real at p_max")]
    NotFoundInRange { p_max: f64 },

    #[error(
        "ill-separated null space: singular values {below:.3e} and {above:.3e} straddle threshold {threshold:.3e} within a factor of 10; perturb the parameters"
    )]
    IllSeparated { below: f64, above: f64, threshold: f64 },

    #[error("degenerate spectrum (min gap {min_gap:.3e}): the Hamiltonian is at or near an exceptional point")]
    DegenerateSpectrum { min_gap: f64 },

    #[error("spectrum is not real (max |Im| = {max_imag:.3e}); no rank-one pseudometrics from real eigenvalues")]
    ComplexSpectrum { max_imag: f64 },

    #[error("pseudometric basis has {got} elements, expected {expected}")]
    BasisSize { got: usize, expected: usize },

    #[error("parameter outside the observability domain: {0}")]
    OutsideDomain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
