//! Fixtures shared by the criterion benchmarks in `benches/`.

use qhlat_core::{build_hamiltonian, HamiltonianMatrix, ParameterDirection, Preset};

/// Hamiltonian of size `dim` along a preset direction at the given magnitude.
pub fn preset_hamiltonian(preset: Preset, dim: usize, magnitude: f64) -> HamiltonianMatrix {
    let dir = ParameterDirection::from_preset(preset, dim / 2).expect("valid preset");
    build_hamiltonian(&dir.to_params(magnitude).expect("valid magnitude")).expect("valid couplings")
}
