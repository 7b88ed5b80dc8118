use approx::assert_abs_diff_eq;
use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;

use locc_core::audit::{classify_pair, cloner_io, default_blank, lab_cut};
use locc_core::catalog::{WBasisIndex, WClassParams};
use locc_core::measures::{negativity, wclass_cut_spectrum};
use locc_core::random::{random_unitary, rng};
use locc_core::register::{
    apply_circuit, embed_operator, hermitian_spectrum, partial_trace, partial_transpose,
    schmidt_coefficients, support_span_dim, trace_norm, Bipartition, LocalGate, QubitGate,
    StateVector, RANK_TOL,
};

fn state(n_qubits: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n_qubits)
        .prop_filter("nonzero", |v| {
            v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3
        })
        .prop_map(|v| {
            let norm = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            StateVector::new(
                v.into_iter()
                    .map(|(a, b)| Complex::new(a / norm, b / norm))
                    .collect(),
            )
            .unwrap()
        })
}

/// Nonempty proper subset of `0..n` as side B.
fn cut(n: usize) -> impl Strategy<Value = Bipartition> {
    (1usize..(1 << n) - 1).prop_map(move |mask| {
        let side: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
        Bipartition::new(n, &side).unwrap()
    })
}

fn gate() -> impl Strategy<Value = QubitGate> {
    prop_oneof![
        Just(QubitGate::X),
        Just(QubitGate::Z),
        Just(QubitGate::S),
        Just(QubitGate::Sdg),
        (0.0f64..6.3).prop_map(QubitGate::Phase),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gates_preserve_norm(s in state(3), gates in prop::collection::vec((0usize..3, gate()), 0..6)) {
        let circuit: Vec<LocalGate> = gates
            .into_iter()
            .map(|(t, g)| LocalGate::single(t, g).unwrap())
            .collect();
        let out = apply_circuit(&s, &circuit).unwrap();
        assert_abs_diff_eq!(out.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_transposes_compose_to_full_transpose(s in state(3), c in cut(3)) {
        let rho = s.density();
        let flipped = Bipartition::new(3, &c.side_a()).unwrap();
        let tb = partial_transpose(&rho, &c).unwrap();
        let ta = partial_transpose(&rho, &flipped).unwrap();
        let diff = (tb.entries().transpose() - ta.entries()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-14);
    }

    #[test]
    fn partial_transpose_matches_index_swap(s in state(3), c in cut(3)) {
        let rho = s.density();
        let mask: usize = c.side_b().iter().map(|q| 1 << (2 - q)).sum();
        let expected = DMatrix::from_fn(8, 8, |r, col| {
            rho.entries()[((r & !mask) | (col & mask), (col & !mask) | (r & mask))]
        });
        let diff = (partial_transpose(&rho, &c).unwrap().entries() - expected).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-15);
    }

    #[test]
    fn partial_transpose_keeps_trace(s in state(3), c in cut(3)) {
        let op = partial_transpose(&s.density(), &c).unwrap();
        assert_abs_diff_eq!(op.trace(), 1.0, epsilon = 1e-12);
        let spectrum = hermitian_spectrum(&op);
        assert_abs_diff_eq!(spectrum.iter().sum::<f64>(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn trace_norm_of_states_is_one(s in state(3)) {
        assert_abs_diff_eq!(trace_norm(&s.density().as_operator()), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn schmidt_matches_marginal(s in state(3), c in cut(3)) {
        let coeffs = schmidt_coefficients(&s, &c).unwrap();
        let marginal = partial_trace(&s.density(), c.side_b()).unwrap();
        let mut spectrum: Vec<f64> = hermitian_spectrum(&marginal.as_operator())
            .into_iter()
            .filter(|l| *l > RANK_TOL)
            .collect();
        spectrum.sort_by(|a, b| b.total_cmp(a));
        prop_assert_eq!(coeffs.len(), spectrum.len());
        for (a, b) in coeffs.iter().zip(&spectrum) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(coeffs.iter().sum::<f64>(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn negativity_is_symmetric_in_the_cut(s in state(3), c in cut(3)) {
        let rho = s.density();
        let flipped = Bipartition::new(3, &c.side_a()).unwrap();
        let (a, b) = (negativity(&rho, &c).unwrap(), negativity(&rho, &flipped).unwrap());
        assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn span_is_symmetric(s in state(2), t in state(2)) {
        let (a, b) = (s.density(), t.density());
        prop_assert_eq!(
            support_span_dim(&a, &b, RANK_TOL).unwrap(),
            support_span_dim(&b, &a, RANK_TOL).unwrap()
        );
    }

    #[test]
    fn closed_form_spectrum_sums_to_one(a in 0.01f64..0.33, b in 0.01f64..0.33, c in 0.01f64..0.33) {
        let params = WClassParams::new(a, b, c).unwrap();
        for k in 1..=3 {
            let (lo, hi) = wclass_cut_spectrum(params, k).unwrap();
            assert_abs_diff_eq!(lo + hi, 1.0, epsilon = 1e-12);
            prop_assert!(lo <= hi);
        }
    }

    #[test]
    fn classification_ignores_order(m in 1u8..=8, n in 1u8..=8) {
        prop_assume!(m != n);
        let (wm, wn) = (WBasisIndex::new(m).unwrap(), WBasisIndex::new(n).unwrap());
        let (x, y) = (classify_pair(wm, wn).unwrap(), classify_pair(wn, wm).unwrap());
        prop_assert_eq!(x.category, y.category);
        prop_assert_eq!(x.witness_k, y.witness_k);
    }
}

#[test]
fn negativity_is_local_unitary_invariant() {
    let mut r = rng(11);
    let w = |n| WBasisIndex::new(n).unwrap();
    for (m, n, k) in [(1, 6, 3), (1, 8, 3), (1, 3, 3), (2, 4, 1)] {
        let (rho_in, rho_out, cut) = cloner_io(w(m), w(n), k, default_blank()).unwrap();
        for rho in [rho_in, rho_out] {
            let base = negativity(&rho, &cut).unwrap();
            let ua: DMatrix<Complex<f64>> = random_unitary(16, &mut r);
            let ub = random_unitary(4, &mut r);
            let u = embed_operator(&ua, &cut.side_a(), 6).unwrap()
                * embed_operator(&ub, cut.side_b(), 6).unwrap();
            let moved = negativity(&rho.conjugate_by(&u).unwrap(), &lab_cut(k).unwrap()).unwrap();
            assert_abs_diff_eq!(base, moved, epsilon = 1e-9);
        }
    }
}
