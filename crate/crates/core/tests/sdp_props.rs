use decomp_lab::group::schur_multiplier;
use decomp_lab::random::{complex_gaussian, random_map, random_matrix, rng};
use decomp_lab::sdp::{cb_norm_inf, dec_norm_inf, dec_norm_one, dec_norm_selfadjoint, schur_cb_norm, SdpOptions};
use decomp_lab::superop::SuperOperator;
use proptest::prelude::*;

fn dec(t: &SuperOperator) -> f64 {
    dec_norm_inf(t, &SdpOptions::default()).unwrap().value
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn homogeneous(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let t = random_map(&mut r, n, n);
        let a = complex_gaussian(&mut r) * 3.0;
        let (d, da) = (dec(&t), dec(&t.scale(a)));
        prop_assert!(close(da, a.norm() * d), "{da} vs {}", a.norm() * d);
    }

    #[test]
    fn triangle_and_composition(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let (s, t) = (random_map(&mut r, n, n), random_map(&mut r, n, n));
        let (ds, dt) = (dec(&s), dec(&t));
        prop_assert!(dec(&s.add(&t).unwrap()) <= ds + dt + 1e-6);
        prop_assert!(dec(&t.compose(&s).unwrap()) <= ds * dt + 1e-6);
    }

    #[test]
    fn opposite_tilde_and_duality(seed in any::<u64>(), n in 1usize..4) {
        let t = random_map(&mut rng(seed), n, n);
        let d = dec(&t);
        prop_assert!(close(dec(&t.opposite()), d));
        prop_assert!(close(dec(&t.tilde().unwrap()), d));
        let one = dec_norm_one(&t.adjoint(), &SdpOptions::default()).unwrap().value;
        prop_assert!(close(one, d), "{one} vs {d}");
    }

    #[test]
    fn cb_bounded_by_dec(seed in any::<u64>(), n in 1usize..4, m in 1usize..4) {
        let t = random_map(&mut rng(seed), n, m);
        let c = cb_norm_inf(&t, &SdpOptions::default()).unwrap().value;
        prop_assert!(c <= dec(&t) + 1e-6);
    }

    #[test]
    fn selfadjoint_programs_agree(seed in any::<u64>(), n in 1usize..4) {
        let t = random_map(&mut rng(seed), n, n);
        let sa = t.add(&t.opposite()).unwrap().scale_real(0.5);
        let b = dec_norm_selfadjoint(&sa, &SdpOptions::default()).unwrap().value;
        prop_assert!(close(dec(&sa), b));
    }

    #[test]
    fn schur_multiplier_dec_is_factorization_norm(seed in any::<u64>(), n in 1usize..5) {
        let a = random_matrix(&mut rng(seed), n, n);
        let s = schur_cb_norm(&a, &SdpOptions::default()).unwrap().value;
        let d = dec(&schur_multiplier(&a).unwrap());
        prop_assert!((s - d).abs() <= 1e-5, "{s} vs {d}");
    }
}
