use proptest::prelude::*;
use qhlat_core::linalg::{intertwining_residual, max_norm};
use qhlat_core::spectral::{conjugate_closure, reality_at};
use qhlat_core::{
    assemble_metric, build_hamiltonian, build_laplacian, eigen_decompose, parity_matrix,
    pseudometric_basis, pt_symmetry_check, spectrum_report, LatticeParams, NullSpaceOptions,
};

fn couplings(max_n: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, 1..=max_n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hamiltonian_is_pt_symmetric(p in couplings(12, 2.0)) {
        let h = build_hamiltonian(&LatticeParams::new(p).unwrap()).unwrap();
        prop_assert!(pt_symmetry_check(h.matrix(), 1e-12));
    }

    #[test]
    fn negated_couplings_conjugate(p in couplings(12, 2.0)) {
        let lp = LatticeParams::new(p).unwrap();
        let h = build_hamiltonian(&lp).unwrap();
        let hn = build_hamiltonian(&lp.negated()).unwrap();
        prop_assert_eq!(hn.matrix(), &h.matrix().map(|z| z.conj()));
    }

    #[test]
    fn parity_reflects_to_negated_couplings(p in couplings(12, 2.0)) {
        let lp = LatticeParams::new(p).unwrap();
        let h = build_hamiltonian(&lp).unwrap();
        let j = parity_matrix(h.dim());
        let reflected = &j * h.matrix() * &j;
        let expect = build_hamiltonian(&lp.negated()).unwrap();
        prop_assert_eq!(&reflected, expect.matrix());
    }

    #[test]
    fn zero_couplings_give_free_chain(n in 1usize..20) {
        let h = build_hamiltonian(&LatticeParams::zeros(n).unwrap()).unwrap();
        let free = build_laplacian(2 * n).unwrap();
        prop_assert_eq!(h.matrix(), free.matrix());
    }

    #[test]
    fn spectrum_closed_under_conjugation(p in couplings(10, 1.5)) {
        let h = build_hamiltonian(&LatticeParams::new(p).unwrap()).unwrap();
        let dec = eigen_decompose(h.matrix()).unwrap();
        prop_assert!(conjugate_closure(&dec.values) <= 1e-8);
        prop_assert!(dec.residual <= 1e-10);
    }

    #[test]
    fn reality_symmetric_under_sign_flip(p in couplings(8, 1.2)) {
        let lp = LatticeParams::new(p).unwrap();
        prop_assert_eq!(reality_at(&lp, 1e-8).unwrap().0, reality_at(&lp.negated(), 1e-8).unwrap().0);
    }

    #[test]
    fn parity_is_always_a_pseudometric(p in couplings(12, 2.0)) {
        let h = build_hamiltonian(&LatticeParams::new(p).unwrap()).unwrap();
        prop_assert!(intertwining_residual(h.matrix(), &parity_matrix(h.dim())) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn metric_linearity_and_scaling(
        p in couplings(3, 0.3),
        eps in prop::collection::vec(-0.5f64..0.5, 6),
        c in 0.1f64..4.0,
    ) {
        let h = build_hamiltonian(&LatticeParams::new(p).unwrap()).unwrap();
        let rep = spectrum_report(&h, 1e-8).unwrap();
        prop_assume!(rep.is_real && rep.min_gap > 1e-4);
        let basis = pseudometric_basis(&h, &NullSpaceOptions::default()).unwrap();
        let mut e = eps[..basis.dim].to_vec();
        e[0] = 1.0;
        let m = assemble_metric(&basis, &e).unwrap();
        // Residual of the combination stays within the sum of the parts.
        let bound: f64 = basis
            .elements
            .iter()
            .zip(&e)
            .map(|(pk, w)| w.abs() * intertwining_residual(h.matrix(), pk.matrix()) * max_norm(pk.matrix()))
            .sum::<f64>()
            / max_norm(m.theta.matrix());
        prop_assert!(m.residual <= bound * (1.0 + 1e-9) + 1e-15);
        prop_assert!(m.residual <= 1e-10);
        let scaled: Vec<f64> = e.iter().map(|x| c * x).collect();
        let ms = assemble_metric(&basis, &scaled).unwrap();
        prop_assert!((ms.min_eigenvalue - c * m.min_eigenvalue).abs() <= 1e-12 * c.max(1.0));
        if m.min_eigenvalue.abs() > 1e-6 {
            prop_assert_eq!(ms.positivity, m.positivity);
        }
    }
}
