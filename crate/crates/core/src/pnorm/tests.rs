use super::*;
use crate::group::{fourier_multiplier, triangular_symbol, FiniteGroup, GroupAlgebra};
use crate::linalg::{herm_eig, schatten_norm, ComplexMatrix, Exponent, C64};
use crate::random::{random_cp_map, random_map, rng};
use crate::sdp::{schur_cb_norm, SdpOptions};
use crate::superop::SuperOperator;

fn ps() -> Vec<Exponent> {
    [1.0, 1.5, 2.0, 3.0, f64::INFINITY].iter().map(|&p| Exponent::new(p).unwrap()).collect()
}

fn real(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| C64::new(x, 0.0)).collect()
}

#[test]
fn identity_has_norm_one() {
    for p in ps() {
        for d in 1..=2 {
            let e = pq_norm_lower(&SuperOperator::identity(3), p, d, 4, 1).unwrap();
            assert!((e.value - 1.0).abs() < 1e-12, "p = {p}, d = {d}: {}", e.value);
        }
    }
}

#[test]
fn diagonal_multiplier_on_lp() {
    let dvals = [C64::new(0.5, 0.0), C64::new(0.0, -1.5), C64::new(1.0, 1.0)];
    let t = diagonal_operator_map(&ComplexMatrix::diag(&dvals)).unwrap();
    let want = 1.5;
    for p in ps() {
        let e = pq_norm_lower(&t, p, 1, 16, 2).unwrap();
        assert!((e.value - want).abs() < 1e-9, "p = {p}: {}", e.value);
    }
}

#[test]
fn fourier_multiplier_at_p2_is_sup_of_symbol() {
    let alg = GroupAlgebra::untwisted(FiniteGroup::cyclic(4));
    let phi = real(&[0.3, -0.9, 0.1, 0.6]);
    let e = pq_norm_lower(&fourier_multiplier(&alg, &phi).unwrap(), Exponent::Finite(2.0), 1, 0, 0).unwrap();
    assert!((e.value - 0.9).abs() < 1e-12, "{}", e.value);
}

#[test]
fn p2_exact_matches_eigen_oracle() {
    let mut r = rng(80);
    for _ in 0..5 {
        let t = random_map(&mut r, 3, 2);
        let e = pq_norm_lower(&t, Exponent::Finite(2.0), 1, 8, 3).unwrap();
        let l = t.liouville();
        let top = herm_eig(&l.adjoint_matmul(&l)).unwrap().max().sqrt();
        assert!((e.value - top).abs() < 1e-9);
        assert!((e.ratio(&t).unwrap() - e.value).abs() < 1e-9);
        assert_eq!(e.restarts, 0);
    }
}

#[test]
fn witness_reproduces_value() {
    let mut r = rng(81);
    let t = random_map(&mut r, 2, 3);
    for p in ps() {
        for d in 1..=2 {
            let e = pq_norm_lower(&t, p, d, 6, 9).unwrap();
            assert_eq!(e.witness.rows(), 2 * d);
            let direct = schatten_norm(&t.amplify(d).unwrap().apply(&e.witness).unwrap(), p).unwrap()
                / schatten_norm(&e.witness, p).unwrap();
            assert!((direct - e.value).abs() < 1e-9, "p = {p}, d = {d}");
        }
    }
}

#[test]
fn value_is_nondecreasing_in_degree() {
    let mut r = rng(82);
    for _ in 0..3 {
        let t = random_map(&mut r, 2, 2);
        for p in [Exponent::Finite(1.0), Exponent::Finite(3.0), Exponent::Infinity] {
            let mut last = 0.0;
            for d in 1..=3 {
                let v = pq_norm_lower(&t, p, d, 6, 11).unwrap().value;
                assert!(v >= last, "p = {p}, d = {d}: {v} < {last}");
                last = v;
            }
        }
    }
}

#[test]
fn cp_maps_at_infinity_reach_norm_of_unit_image() {
    let mut r = rng(83);
    for _ in 0..5 {
        let t = random_cp_map(&mut r, 3, 2, 2);
        let want = schatten_norm(&t.apply(&ComplexMatrix::identity(3)).unwrap(), Exponent::Infinity).unwrap();
        let e = pq_norm_lower(&t, Exponent::Infinity, 1, 64, 4).unwrap();
        assert!(e.value <= want + 1e-12 && e.value >= want - 1e-6, "{} vs {want}", e.value);
    }
}

#[test]
fn partial_transpose_reaches_two() {
    // ‖Id_2 ⊗ transpose‖ on M_2(M_2) is 2 at p = ∞ and p = 1; the transpose alone is an isometry.
    let t = SuperOperator::transpose_map(2);
    for p in [Exponent::Finite(1.0), Exponent::Infinity] {
        let one = pq_norm_lower(&t, p, 1, 16, 5).unwrap().value;
        assert!((one - 1.0).abs() < 1e-9);
        let two = pq_norm_lower(&t, p, 2, 32, 5).unwrap().value;
        assert!((two - 2.0).abs() < 1e-6, "p = {p}: {two}");
    }
}

#[test]
fn deterministic_and_replayable() {
    let mut r = rng(84);
    let t = random_map(&mut r, 2, 2);
    let a = pq_norm_lower(&t, Exponent::Finite(1.5), 2, 8, 42).unwrap();
    let b = pq_norm_lower(&t, Exponent::Finite(1.5), 2, 8, 42).unwrap();
    assert_eq!(a, b);
    let json = serde_json::to_string(&a).unwrap();
    let back: NormEstimate = serde_json::from_str(&json).unwrap();
    assert_eq!(back, a);
    assert!((back.ratio(&t).unwrap() - a.value).abs() < 1e-12);
}

#[test]
fn matsaev_examples() {
    let z2 = GroupAlgebra::untwisted(FiniteGroup::cyclic(2));
    let z = Polynomial::from_real(&[0.0, 1.0]).unwrap();
    let rep = matsaev_check(&z2, &[1.0, -1.0], &z, Exponent::Finite(2.0), 8, 4, 1).unwrap();
    assert!(rep.lhs[0] <= 1.0 + 1e-12 && (rep.rhs_p2 - 1.0).abs() < 1e-12 && !rep.violated);

    let zm1 = Polynomial::from_real(&[-1.0, 1.0]).unwrap();
    let rep = matsaev_check(&z2, &[1.0, -1.0], &zm1, Exponent::Finite(2.0), 8, 4, 1).unwrap();
    assert!((rep.lhs[0] - 2.0).abs() < 1e-12 && (rep.lhs[1] - 2.0).abs() < 1e-9);
    assert!((rep.rhs_p2 - 2.0).abs() < 1e-12);
    assert!(!rep.violated && rep.margin.abs() < 1e-9);
    // ‖S_N − 1‖ on ℓ²_N stays below the circle bound.
    assert!(rep.rhs_pn <= 2.0 + 1e-12 && rep.rhs_pn > 1.9);
}

#[test]
fn matsaev_spectral_oracle_at_p2() {
    // φ = a·(positive definite) − b·(positive definite), a + b ≤ 1, real.
    let z4 = GroupAlgebra::untwisted(FiniteGroup::cyclic(4));
    let chars: Vec<[f64; 4]> = vec![[1.0, 1.0, 1.0, 1.0], [1.0, 0.0, -1.0, 0.0], [1.0, -1.0, 1.0, -1.0]];
    let mut r = rng(85);
    let poly = Polynomial::from_real(&[1.0, 1.0, 1.0]).unwrap();
    for _ in 0..5 {
        let w: Vec<f64> = (0..6).map(|_| crate::random::uniform(&mut r, 0.0, 1.0)).collect();
        let (sa, sb): (f64, f64) = (w[..3].iter().sum(), w[3..].iter().sum());
        let scale = crate::random::uniform(&mut r, 0.2, 1.0);
        let phi: Vec<f64> = (0..4)
            .map(|s| {
                let pos: f64 = (0..3).map(|c| w[c] * chars[c][s]).sum::<f64>() / sa;
                let neg: f64 = (0..3).map(|c| w[3 + c] * chars[c][s]).sum::<f64>() / sb;
                scale * (0.6 * pos - 0.4 * neg)
            })
            .collect();
        let rep = matsaev_check(&z4, &phi, &poly, Exponent::Finite(2.0), 16, 4, 2).unwrap();
        let direct = phi.iter().map(|&x| (1.0 + x + x * x).abs()).fold(0.0, f64::max);
        assert!((rep.lhs[0] - direct).abs() < 1e-9, "{} vs {direct}", rep.lhs[0]);
        assert!((rep.spectral - direct).abs() < 1e-12);
        assert!(!rep.violated && rep.margin >= -MATSAEV_TOL);
    }
}

#[test]
fn truncation_rows() {
    let rows = truncation_growth(&[1, 2, 3], &SdpOptions::default()).unwrap();
    assert!((rows[0].value - 1.0).abs() < 1e-6);
    let direct = schur_cb_norm(&triangular_symbol(2), &SdpOptions::default()).unwrap().value;
    assert!(rows[1].value > 1.0 && rows[1].value <= 2.0);
    assert!((rows[1].value - direct).abs() < 1e-9);
    assert!(rows.iter().all(|r| r.within_bound));
    assert!(rows[2].increasing);
    assert!(truncation_growth(&[3, 2], &SdpOptions::default()).is_err());
}

#[test]
fn limit_criterion_examples() {
    let tail: Vec<usize> = (5..8).collect();
    let ones = ComplexMatrix::from_fn(8, 8, |_, _| C64::new(2.0, 0.0));
    assert_eq!(schur_limit_criterion(&ones, &tail, &tail).unwrap().gap, 0.0);
    let tri = schur_limit_criterion(&triangular_symbol(8), &tail, &tail).unwrap();
    assert_eq!(tri.gap, 1.0);
    assert_eq!((tri.s.re, tri.t.re), (1.0, 0.0));
    // Parity of min(i, j): s reads a_{6,7}, t reads a_{7,6}; both equal the parity of 6.
    let par = ComplexMatrix::from_fn(8, 8, |i, j| C64::new((i.min(j) % 2) as f64, 0.0));
    let c = schur_limit_criterion(&par, &tail, &tail).unwrap();
    assert_eq!((c.s.re, c.t.re, c.gap), (0.0, 0.0, 0.0));
    assert!(schur_limit_criterion(&par, &[1, 2], &tail).is_err());
    assert!(schur_limit_criterion(&par, &[1, 2, 9], &tail).is_err());
}
