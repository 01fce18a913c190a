//! Invariants checked on random inputs.

use approx::assert_relative_eq;
use proptest::prelude::*;
use rmtlab::hciz::{self, HcizInput, HeatKernelInput, PseudoSignature};
use rmtlab::kahler::{self, CosetSpace, GroupElement2x2};
use rmtlab::linalg::{
    eig_hermitian, inversion_parity, vandermonde, ComplexMatrix, HermitianMatrix, Permutation,
};
use rmtlab::{RngStream, C64};

fn perm(m: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..m).collect::<Vec<usize>>()).prop_shuffle()
}

fn complex() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn separated(v: &[C64], gap: f64) -> bool {
    (0..v.len()).all(|i| (i + 1..v.len()).all(|j| (v[i] - v[j]).norm() >= gap))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vandermonde_flips_sign_under_transposition(x in prop::collection::vec(complex(), 2..6), i in 0usize..6, j in 0usize..6) {
        let (i, j) = (i % x.len(), j % x.len());
        prop_assume!(i != j);
        let mut y = x.clone();
        y.swap(i, j);
        let (a, b) = (vandermonde(&x), vandermonde(&y));
        prop_assert!((a + b).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn parity_is_multiplicative(p in perm(6), q in perm(6)) {
        let (p, q) = (Permutation::new(p).unwrap(), Permutation::new(q).unwrap());
        let pq = p.compose(&q);
        prop_assert_eq!(inversion_parity(pq.image()), p.parity() * q.parity());
    }

    #[test]
    fn eigenvalues_sum_to_trace_and_survive_conjugation(seed in 0u64..1000, n in 2usize..7) {
        let mut rng = RngStream::new(seed, 3);
        let a = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.normal(), rng.normal()));
        let h = HermitianMatrix::new(a.add(&a.adjoint()).scale(C64::new(0.5, 0.0))).unwrap();
        let u = hciz::haar_unitary(n, &mut rng);
        let conj = u.matmul(h.matrix()).matmul(&u.adjoint());
        let conj = ComplexMatrix::from_fn(n, n, |i, j| (conj[(i, j)] + conj[(j, i)].conj()) * 0.5);
        let e1 = eig_hermitian(&h).unwrap();
        let e2 = eig_hermitian(&HermitianMatrix::new(conj).unwrap()).unwrap();
        assert_relative_eq!(e1.values().iter().sum::<f64>(), h.matrix().trace().re, epsilon = 1e-11);
        for (a, b) in e1.values().iter().zip(e2.values()) {
            assert_relative_eq!(*a, *b, epsilon = 1e-10);
        }
    }

    #[test]
    fn compact_determinant_equals_weyl_sum(x in prop::collection::vec(-2.0..2.0f64, 3), y in prop::collection::vec(-2.0..2.0f64, 3)) {
        let inp = HcizInput::real(&x, &y).unwrap();
        prop_assume!(separated(&inp.x, 0.1) && separated(&inp.y, 0.1));
        let det = hciz::hciz_compact_det(&inp).unwrap();
        let weyl = hciz::weyl_sum(&inp, &[3]).unwrap() * hciz::compact_constant(3);
        prop_assert!((det - weyl).norm() <= 1e-10 * weyl.norm());
    }

    #[test]
    fn pseudo_determinant_equals_signed_weyl_sum(x in prop::collection::vec(complex(), 4), y in prop::collection::vec(complex(), 4), n1 in 1usize..4) {
        prop_assume!(separated(&x, 0.1) && separated(&y, 0.1));
        let sig = PseudoSignature::new(n1, 4 - n1).unwrap();
        let inp = HcizInput::new(x, y).unwrap();
        let sign = if n1 * (4 - n1) % 2 == 0 { 1.0 } else { -1.0 };
        let det = hciz::hciz_pseudo_det(&inp, sig).unwrap().value;
        let weyl = hciz::weyl_sum(&inp, &sig.blocks()).unwrap() * sign;
        prop_assert!((det - weyl).norm() <= 1e-10 * weyl.norm());
    }

    #[test]
    fn heat_kernel_is_antisymmetric_within_blocks(a in prop::collection::vec(-2.0..2.0f64, 4), b in prop::collection::vec(-2.0..2.0f64, 4), t in 0.2..3.0f64) {
        let sig = PseudoSignature::new(2, 2).unwrap();
        let k = hciz::heat_kernel(&HeatKernelInput { alpha: a.clone(), beta: b.clone(), t }, sig).unwrap();
        for (i, j) in [(0, 1), (2, 3)] {
            let mut s = a.clone();
            s.swap(i, j);
            let ks = hciz::heat_kernel(&HeatKernelInput { alpha: s, beta: b.clone(), t }, sig).unwrap();
            prop_assert!((k + ks).abs() <= 1e-15 * k.abs().max(1e-300));
        }
    }

    #[test]
    fn heat_kernel_is_symmetric_in_its_arguments(a in prop::collection::vec(-2.0..2.0f64, 3), b in prop::collection::vec(-2.0..2.0f64, 3), t in 0.2..3.0f64) {
        let sig = PseudoSignature::new(2, 1).unwrap();
        let k1 = hciz::heat_kernel(&HeatKernelInput { alpha: a.clone(), beta: b.clone(), t }, sig).unwrap();
        let k2 = hciz::heat_kernel(&HeatKernelInput { alpha: b, beta: a, t }, sig).unwrap();
        prop_assert!((k1 - k2).abs() <= 1e-13 * k1.abs().max(1e-300));
    }

    #[test]
    fn transformation_laws_hold(seed in 0u64..10_000, r in 0.0..0.9f64, th in 0.0..std::f64::consts::TAU) {
        let z = C64::from_polar(r, th);
        let mut rng = RngStream::new(seed, 9);
        for space in [CosetSpace::CompactCp1, CosetSpace::NoncompactDisk] {
            let g = GroupElement2x2::random(space, &mut rng);
            prop_assert!(g.group_defect(space) < 1e-12);
            let Ok(w) = kahler::moebius_action(space, &g, z) else { continue };
            prop_assume!(w.norm() < 1e3 && (space == CosetSpace::CompactCp1 || w.norm() < 0.99));
            prop_assert!(kahler::potential_cocycle_defect(space, &g, z).unwrap() < 1e-11);
            prop_assert!(kahler::rho_transformation_defect(space, &g, z).unwrap() < 1e-11);
        }
    }
}
