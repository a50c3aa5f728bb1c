use super::*;
use crate::linalg::{herm_eig, kron, partial_transpose_second, swap_operator, I, ONE};
use crate::random::{random_cp_map, random_map, random_matrix, random_unitary, rng};

fn approx(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn identity_choi_is_rank_one() {
    let id = SuperOperator::identity(2);
    let mut want = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            want += &kron(&ComplexMatrix::unit(2, 2, i, j), &ComplexMatrix::unit(2, 2, i, j));
        }
    }
    assert_eq!(id.choi(), &want);
    let s = herm_eig(id.choi()).unwrap();
    assert!(approx(s.eigenvalues[0], 2.0, 1e-14));
    assert!(s.eigenvalues[1..].iter().all(|x| x.abs() < 1e-14));
}

#[test]
fn transpose_choi_is_swap() {
    let t = SuperOperator::transpose_map(2);
    assert_eq!(t.choi(), &swap_operator(2));
    let s = herm_eig(t.choi()).unwrap();
    let want = [1.0, 1.0, 1.0, -1.0];
    assert!(s.eigenvalues.iter().zip(want).all(|(a, b)| approx(*a, b, 1e-14)));
}

#[test]
fn trace_map_choi() {
    let t = SuperOperator::from_fn(2, 2, |x| ComplexMatrix::identity(2).scale(x.trace() * 0.5)).unwrap();
    assert!(t.choi().approx_eq(&ComplexMatrix::identity(4).scale_real(0.5), 1e-15));
}

#[test]
fn from_action_rejects_bad_shapes() {
    assert!(SuperOperator::from_action(2, 2, &[ComplexMatrix::identity(2)]).is_err());
    let imgs = vec![ComplexMatrix::identity(3); 4];
    assert!(SuperOperator::from_action(2, 2, &imgs).is_err());
    assert!(SuperOperator::identity(2).apply(&ComplexMatrix::identity(3)).is_err());
}

#[test]
fn apply_examples() {
    let mut r = rng(20);
    let x = random_matrix(&mut r, 3, 3);
    assert!(SuperOperator::identity(3).apply(&x).unwrap().approx_eq(&x, 1e-15));
    let e = ComplexMatrix::unit(2, 2, 0, 1);
    assert_eq!(SuperOperator::transpose_map(2).apply(&e).unwrap(), ComplexMatrix::unit(2, 2, 1, 0));
    let t = random_map(&mut r, 3, 2);
    let mut direct = ComplexMatrix::zeros(2, 2);
    for i in 0..3 {
        for j in 0..3 {
            direct.axpy(x[(i, j)], &t.image(i, j));
        }
    }
    assert!(t.apply(&x).unwrap().approx_eq(&direct, 1e-11));
}

#[test]
fn liouville_roundtrip_and_action() {
    let mut r = rng(21);
    let t = random_map(&mut r, 2, 3);
    let l = t.liouville();
    assert_eq!(SuperOperator::from_liouville(2, 3, &l).unwrap(), t);
    let x = random_matrix(&mut r, 2, 2);
    let y = ComplexMatrix::new(3, 3, l.mat_vec(x.as_slice())).unwrap();
    assert!(y.approx_eq(&t.apply(&x).unwrap(), 1e-12));
}

#[test]
fn opposite_examples() {
    assert_eq!(SuperOperator::identity(3).opposite(), SuperOperator::identity(3));
    let a = ComplexMatrix::unit(2, 2, 0, 1);
    let t = SuperOperator::left_multiplication(&a).unwrap();
    let lhs = t.opposite().apply(&ComplexMatrix::unit(2, 2, 0, 1)).unwrap();
    let rhs = t.apply(&ComplexMatrix::unit(2, 2, 1, 0)).unwrap().adjoint();
    assert_eq!(lhs, rhs);
    let mut r = rng(22);
    let t = random_map(&mut r, 3, 2);
    let brute = SuperOperator::from_fn(3, 2, |x| t.apply(&x.adjoint()).unwrap().adjoint()).unwrap();
    assert!(t.opposite().approx_eq(&brute, 1e-12));
    assert!(t.opposite().opposite().approx_eq(&t, 0.0));
}

#[test]
fn adjoint_examples() {
    assert_eq!(SuperOperator::identity(2).adjoint(), SuperOperator::identity(2));
    let mut r = rng(23);
    let u = random_unitary(&mut r, 3);
    let want = SuperOperator::conjugation(&u.adjoint());
    assert!(SuperOperator::conjugation(&u).adjoint().approx_eq(&want, 1e-12));
    let t = random_map(&mut r, 3, 2);
    let ta = t.adjoint();
    assert_eq!((ta.in_dim(), ta.out_dim()), (2, 3));
    for _ in 0..5 {
        let x = random_matrix(&mut r, 3, 3);
        let y = random_matrix(&mut r, 2, 2);
        let lhs = t.apply(&x).unwrap().trace_product(&y);
        let rhs = x.trace_product(&ta.apply(&y).unwrap());
        assert!((lhs - rhs).norm() < 1e-10);
    }
    assert!(ta.adjoint().approx_eq(&t, 0.0));
}

#[test]
fn cp_examples() {
    assert!(SuperOperator::identity(3).is_cp(1e-12));
    let c = SuperOperator::transpose_map(2).cp_certificate(1e-12);
    assert!(!c.is_cp);
    assert!(approx(c.lambda_min, -1.0, 1e-13));
    // Witness vector is the antisymmetric state.
    let v = &c.eigenvector;
    assert!(approx(v[1].norm(), std::f64::consts::FRAC_1_SQRT_2, 1e-12));
    assert!((v[1] + v[2]).norm() < 1e-12);
}

#[test]
fn selfadjoint_examples() {
    assert!(SuperOperator::transpose_map(3).is_selfadjoint_map(1e-12));
    let it = SuperOperator::identity(2).scale(I);
    assert!(!it.is_selfadjoint_map(1e-6));
}

#[test]
fn tilde_examples() {
    let t = SuperOperator::identity(2).tilde().unwrap();
    let mut r = rng(24);
    let x = random_matrix(&mut r, 4, 4);
    let want = ComplexMatrix::block2x2(
        &ComplexMatrix::zeros(2, 2),
        &x.submatrix(0, 2, 2, 2),
        &x.submatrix(2, 0, 2, 2),
        &ComplexMatrix::zeros(2, 2),
    )
    .unwrap();
    assert!(t.apply(&x).unwrap().approx_eq(&want, 1e-15));

    let t = random_map(&mut r, 2, 2);
    assert!(!t.is_selfadjoint_map(1e-6));
    let tt = t.tilde().unwrap();
    assert!(tt.is_selfadjoint_map(1e-12));
    assert!(tt.corner(0, 1).unwrap().approx_eq(&t, 1e-12));
    assert!(tt.corner(1, 0).unwrap().approx_eq(&t.opposite(), 1e-12));
    assert!(matches!(random_map(&mut r, 2, 3).tilde(), Err(Error::NotSquare(2, 3))));
}

#[test]
fn block_map_examples() {
    let id = SuperOperator::identity(2);
    let b = BlockMap::new(&id, &id, &id).unwrap();
    assert!(b.assembled.approx_eq(&SuperOperator::identity(4), 1e-15));
    assert!(b.cp_certificate(1e-12).is_cp);
    assert!(b.assembled.is_cp(1e-12));
    let z = SuperOperator::zero(2, 2);
    let b = BlockMap::new(&z, &id, &z).unwrap();
    assert!(!b.cp_certificate(1e-12).is_cp);
    assert!(!b.assembled.is_cp(1e-12));
    let mut r = rng(25);
    let bad = random_map(&mut r, 3, 2);
    assert!(BlockMap::new(&id, &bad, &id).is_err());
}

#[test]
fn block_map_acts_blockwise_on_units() {
    let mut r = rng(26);
    let (v1, t, v2) = (random_map(&mut r, 2, 3), random_map(&mut r, 2, 3), random_map(&mut r, 2, 3));
    let b = BlockMap::new(&v1, &t, &v2).unwrap();
    let top = t.opposite();
    let parts = [[&v1, &t], [&top, &v2]];
    for a in 0..2 {
        for c in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let got = b.assembled.image(a * 2 + i, c * 2 + j);
                    let mut want = ComplexMatrix::zeros(6, 6);
                    want.set_block(a * 3, c * 3, &parts[a][c].image(i, j));
                    assert!(got.approx_eq(&want, 0.0));
                }
            }
        }
    }
    let full = herm_eig(&b.assembled.choi().hermitian_part()).unwrap().min();
    let reduced = herm_eig(&b.reduced_choi().hermitian_part()).unwrap().min();
    assert!(approx(full.min(0.0), reduced.min(0.0), 1e-10));
}

#[test]
fn amplify_examples() {
    assert!(SuperOperator::identity(2).amplify(3).unwrap().approx_eq(&SuperOperator::identity(6), 0.0));
    let mut r = rng(27);
    let t = random_map(&mut r, 2, 3);
    assert_eq!(t.amplify(1).unwrap(), t);
    assert!(t.amplify(0).is_err());

    let tr2 = SuperOperator::transpose_map(2).amplify(2).unwrap();
    let swap = swap_operator(2);
    let pt = tr2.apply(&swap).unwrap();
    assert!(pt.approx_eq(&partial_transpose_second(&swap, 2, 2).unwrap(), 0.0));
    let phi = SuperOperator::identity(2).into_choi();
    let back = tr2.apply(&phi).unwrap();
    assert!(back.approx_eq(&swap, 0.0));
    assert!(approx(herm_eig(&back).unwrap().min(), -1.0, 1e-13));
}

#[test]
fn amplified_choi_spectrum_is_scaled_copy() {
    let mut r = rng(28);
    let t = random_cp_map(&mut r, 2, 2, 2).sub(&random_cp_map(&mut r, 2, 2, 1)).unwrap();
    let base = herm_eig(t.choi()).unwrap().eigenvalues;
    for d in [2, 3] {
        let amp = herm_eig(t.amplify(d).unwrap().choi()).unwrap().eigenvalues;
        let mut want: Vec<f64> = base.iter().map(|x| x * d as f64).collect();
        want.resize(amp.len(), 0.0);
        want.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in amp.iter().zip(&want) {
            assert!(approx(*a, *b, 1e-10), "d={d}: {a} vs {b}");
        }
    }
}

#[test]
fn modulus_block_examples() {
    assert!(modulus_block_check(&ComplexMatrix::identity(1), 1e-12).is_cp);
    let neg = ComplexMatrix::identity(1).scale(-ONE);
    assert!(modulus_block_check(&neg, 1e-12).is_cp);
    let mut r = rng(29);
    let b = random_matrix(&mut r, 4, 3);
    let c = modulus_block_check(&b, 1e-8);
    assert!(c.is_cp && c.lambda_min >= -1e-8);
}

#[test]
fn kraus_and_json() {
    let mut r = rng(30);
    let t = random_cp_map(&mut r, 3, 2, 2);
    assert!(t.is_cp(1e-10));
    let s = serde_json::to_string(&t).unwrap();
    let back: SuperOperator = serde_json::from_str(&s).unwrap();
    assert_eq!(t, back);
    let bad = r#"{"in_dim":2,"out_dim":2,"choi":{"rows":2,"cols":2,"re":[1,0,0,1],"im":[0,0,0,0]}}"#;
    assert!(serde_json::from_str::<SuperOperator>(bad).is_err());
}

#[test]
fn compose_matches_sequential_application() {
    let mut r = rng(31);
    let s = random_map(&mut r, 2, 3);
    let t = random_map(&mut r, 3, 2);
    let ts = t.compose(&s).unwrap();
    let x = random_matrix(&mut r, 2, 2);
    let want = t.apply(&s.apply(&x).unwrap()).unwrap();
    assert!(ts.apply(&x).unwrap().approx_eq(&want, 1e-11));
    assert!(s.compose(&s).is_err());
}
