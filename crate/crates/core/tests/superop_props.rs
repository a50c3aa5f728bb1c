use decomp_lab::linalg::{modulus, schatten_norm, spectral_norm, ComplexMatrix, Exponent};
use decomp_lab::random::{complex_gaussian, random_cp_map, random_map, random_matrix, random_psd, rng};
use decomp_lab::superop::{psd_certificate, BlockMap, SuperOperator};
use proptest::prelude::*;

fn norm_inf(x: &ComplexMatrix) -> f64 {
    schatten_norm(x, Exponent::Infinity).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn choi_is_linear(seed in any::<u64>(), n in 1usize..4, m in 1usize..4) {
        let mut r = rng(seed);
        let (t, s) = (random_map(&mut r, n, m), random_map(&mut r, n, m));
        let a = complex_gaussian(&mut r);
        let lhs = t.scale(a).add(&s).unwrap().into_choi();
        let mut rhs = s.choi().clone();
        rhs.axpy(a, t.choi());
        prop_assert!(lhs.try_sub(&rhs).unwrap().max_abs() <= 1e-15 * (1.0 + rhs.max_abs()));
    }

    #[test]
    fn opposite_and_adjoint_are_involutions(seed in any::<u64>(), n in 1usize..4, m in 1usize..4) {
        let t = random_map(&mut rng(seed), n, m);
        prop_assert!(t.opposite().opposite().approx_eq(&t, 1e-14));
        prop_assert!(t.adjoint().adjoint().approx_eq(&t, 1e-14));
        prop_assert!(t.opposite().adjoint().approx_eq(&t.adjoint().opposite(), 1e-11));
    }

    #[test]
    fn cp_closed_under_composition_and_opposite(seed in any::<u64>(), n in 1usize..4, k in 1usize..4) {
        let mut r = rng(seed);
        let s = random_cp_map(&mut r, n, n + 1, k);
        let t = random_cp_map(&mut r, n + 1, n, k);
        prop_assert!(s.is_cp(1e-9) && t.is_cp(1e-9));
        let comp = SuperOperator::from_fn(n, n, |x| t.apply(&s.apply(x).unwrap()).unwrap()).unwrap();
        prop_assert!(comp.is_cp(1e-9));
        prop_assert!(s.opposite().is_cp(1e-9));
    }

    #[test]
    fn cp_block_dominates_off_diagonal(seed in any::<u64>(), n in 1usize..4, m in 1usize..4, k in 1usize..3) {
        // v1 = Σ A x A*, v2 = Σ B x B*, t = Σ A x B*: the block map is x ↦ K x K*, K = A ⊕ B.
        let mut r = rng(seed);
        let a: Vec<ComplexMatrix> = (0..k).map(|_| random_matrix(&mut r, m, n)).collect();
        let b: Vec<ComplexMatrix> = (0..k).map(|_| random_matrix(&mut r, m, n)).collect();
        let v1 = SuperOperator::from_kraus(&a).unwrap();
        let v2 = SuperOperator::from_kraus(&b).unwrap();
        let t = SuperOperator::from_fn(n, m, |x| {
            let mut out = ComplexMatrix::zeros(m, m);
            for (ai, bi) in a.iter().zip(&b) {
                out.axpy_real(1.0, &ai.matmul(x).matmul_adjoint(bi));
            }
            out
        }).unwrap();
        prop_assert!(BlockMap::new(&v1, &t, &v2).unwrap().cp_certificate(1e-9).is_cp);
        let p = random_psd(&mut r, 2 * n, 2 * n);
        let (xa, xb, xc) = (p.submatrix(0, 0, n, n), p.submatrix(0, n, n, n), p.submatrix(n, n, n, n));
        let lhs = norm_inf(&t.apply(&xb).unwrap());
        let rhs = norm_inf(&v1.apply(&xa).unwrap()).max(norm_inf(&v2.apply(&xc).unwrap()));
        prop_assert!(lhs <= rhs + 1e-8 * (1.0 + rhs), "{lhs} > {rhs}");
    }

    #[test]
    fn contraction_modulus_block_is_psd(seed in any::<u64>(), n in 1usize..6) {
        let x = random_matrix(&mut rng(seed), n, n);
        let b = x.scale_real(1.0 / (spectral_norm(&x).unwrap() + 1e-3));
        let left = modulus(&b.adjoint()).unwrap();
        let right = modulus(&b).unwrap();
        let block = ComplexMatrix::block2x2(&left, &b, &b.adjoint(), &right).unwrap();
        prop_assert!(psd_certificate(&block, 1e-10).is_cp);
    }
}
