use super::*;
use crate::linalg::{herm_eig, svd, ComplexMatrix, ZERO};
use crate::random::{random_unitary, rng};
use crate::superop::SuperOperator;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn real(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| c(x)).collect()
}

/// Dimension of {x ∈ span λ_s : x λ_t = λ_t x for all t}.
fn center_dimension(alg: &GroupAlgebra) -> usize {
    let n = alg.order();
    let mut rows = Vec::new();
    for t in 0..n {
        let lt = alg.lambda(t);
        let comms: Vec<ComplexMatrix> =
            (0..n).map(|s| &alg.lambda(s).matmul(lt) - &lt.matmul(alg.lambda(s))).collect();
        for k in 0..n * n {
            rows.push((0..n).map(|s| comms[s].as_slice()[k]).collect::<Vec<_>>());
        }
    }
    let m = ComplexMatrix::from_rows(&rows).unwrap();
    let s = svd(&m).unwrap().s;
    n - s.iter().filter(|&&x| x > 1e-10).count()
}

#[test]
fn z2_lambdas() {
    let alg = GroupAlgebra::untwisted(FiniteGroup::cyclic(2));
    assert_eq!(alg.lambda(0), &ComplexMatrix::identity(2));
    assert_eq!(alg.lambda(1), &ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap());
}

#[test]
fn klein_bicharacter_gives_full_matrix_algebra() {
    let g = FiniteGroup::klein();
    let sigma = TwoCocycle::klein_bicharacter(&g).unwrap();
    assert!(!sigma.is_trivial());
    let twisted = GroupAlgebra::new(g.clone(), sigma).unwrap();
    // Four-dimensional semisimple algebra with trivial center is M_2.
    assert_eq!(center_dimension(&twisted), 1);
    assert_eq!(center_dimension(&GroupAlgebra::untwisted(g)), 4);
}

#[test]
fn s3_trace_relation() {
    let alg = GroupAlgebra::untwisted(FiniteGroup::symmetric3());
    let g = alg.group().clone();
    for s in 0..6 {
        for t in 0..6 {
            let v = alg.tau(&alg.lambda(s).matmul(alg.lambda(t)));
            let want = if t == g.inv(s) { alg.cocycle().get(s, t) } else { ZERO };
            assert!((v - want).norm() < 1e-15);
        }
    }
    // S_3 is non-abelian: center spanned by class sums (3 classes).
    assert_eq!(center_dimension(&alg), 3);
}

#[test]
fn group_validation() {
    let sub3: Vec<Vec<usize>> = (0..3).map(|a| (0..3).map(|b| (a + 3 - b) % 3).collect()).collect();
    assert!(matches!(FiniteGroup::from_cayley(sub3), Err(Error::InvalidGroup(_))));
    let not_latin = vec![vec![0, 1], vec![1, 1]];
    assert!(FiniteGroup::from_cayley(not_latin).is_err());
    let g = FiniteGroup::cyclic(4);
    assert!(g.check_subgroup(&[0, 2]).is_ok());
    assert!(matches!(g.check_subgroup(&[1]), Err(Error::NotASubgroup(_))));
    assert_eq!(FiniteGroup::symmetric3().order(), 6);
}

#[test]
fn cocycle_validation() {
    let g = FiniteGroup::cyclic(2);
    let bad_norm = vec![vec![ONE, ONE], vec![ONE, c(2.0)]];
    assert!(matches!(TwoCocycle::new(&g, bad_norm), Err(Error::InvalidCocycle(_))));
    let not_normalized = vec![vec![ONE, -ONE], vec![ONE, ONE]];
    assert!(TwoCocycle::new(&g, not_normalized).is_err());
    let g4 = FiniteGroup::cyclic(4);
    let mut tab = vec![vec![ONE; 4]; 4];
    tab[1][1] = -ONE;
    assert!(TwoCocycle::new(&g4, tab).is_err());
    let mut r = rng(40);
    let f: Vec<C64> = (0..4).map(|_| C64::from_polar(1.0, crate::random::uniform(&mut r, 0.0, 6.0))).collect();
    let cob = TwoCocycle::coboundary(&g4, &f).unwrap();
    assert!(!cob.is_trivial());
    assert!(GroupAlgebra::new(g4, cob).is_ok());
}

#[test]
fn unit_symbol_is_conditional_expectation() {
    let alg = GroupAlgebra::untwisted(FiniteGroup::cyclic(3));
    let e = fourier_multiplier(&alg, &[ONE; 3]).unwrap();
    assert!(e.compose(&e).unwrap().approx_eq(&e, 1e-14));
    assert!(e.is_cp(1e-12));
    for s in 0..3 {
        assert!(e.apply(alg.lambda(s)).unwrap().approx_eq(alg.lambda(s), 1e-14));
    }
}

#[test]
fn z2_sign_symbol() {
    let alg = GroupAlgebra::untwisted(FiniteGroup::cyclic(2));
    let t = fourier_multiplier(&alg, &real(&[1.0, -1.0])).unwrap();
    assert!(t.apply(alg.lambda(1)).unwrap().approx_eq(&alg.lambda(1).scale(-ONE), 1e-15));
    assert!(t.apply(alg.lambda(0)).unwrap().approx_eq(alg.lambda(0), 1e-15));
    let cert = t.cp_certificate(1e-12);
    assert!(cert.is_cp && cert.lambda_min > -1e-14);
}

#[test]
fn delta_symbol_is_normalized_trace_map() {
    let alg = GroupAlgebra::untwisted(FiniteGroup::symmetric3());
    let mut phi = vec![ZERO; 6];
    phi[alg.group().identity()] = ONE;
    let t = fourier_multiplier(&alg, &phi).unwrap();
    let want = SuperOperator::trace_times(6, &ComplexMatrix::identity(6).scale_real(1.0 / 6.0));
    assert!(t.approx_eq(&want, 1e-14));
    assert!(t.is_cp(1e-12));
}

#[test]
fn real_symmetric_symbol_gives_selfadjoint_map() {
    let alg = GroupAlgebra::untwisted(FiniteGroup::cyclic(5));
    let t = fourier_multiplier(&alg, &real(&[1.0, 0.3, -0.7, -0.7, 0.3])).unwrap();
    assert!(t.is_selfadjoint_map(1e-12));
    let t = fourier_multiplier(&alg, &real(&[1.0, 0.3, 0.0, 0.0, 0.0])).unwrap();
    assert!(!t.is_selfadjoint_map(1e-6));
    let alg2 = GroupAlgebra::untwisted(FiniteGroup::cyclic(2));
    assert!(fourier_multiplier(&alg2, &real(&[0.2, -0.9])).unwrap().is_selfadjoint_map(1e-12));
}

#[test]
fn fourier_restriction_multiplies_lambdas_twisted() {
    let g = FiniteGroup::klein();
    let alg = GroupAlgebra::new(g.clone(), TwoCocycle::klein_bicharacter(&g).unwrap()).unwrap();
    let phi = [c(1.0), C64::new(0.2, 0.5), c(-0.4), C64::new(0.0, -1.0)];
    let t = fourier_multiplier(&alg, &phi).unwrap();
    for s in 0..4 {
        assert!(t.apply(alg.lambda(s)).unwrap().approx_eq(&alg.lambda(s).scale(phi[s]), 1e-14));
    }
    assert!(fourier_multiplier(&alg, &phi[..3]).is_err());
}

#[test]
fn schur_examples() {
    let ones = ComplexMatrix::from_fn(3, 3, |_, _| ONE);
    let id = schur_multiplier(&ones).unwrap();
    assert!(id.approx_eq(&SuperOperator::identity(3), 0.0));
    assert!(id.is_cp(1e-12));
    let diag = schur_multiplier(&ComplexMatrix::identity(3)).unwrap();
    let want = SuperOperator::from_fn(3, 3, |x| ComplexMatrix::diag(&x.diagonal())).unwrap();
    assert!(diag.approx_eq(&want, 0.0));
    let tri = schur_multiplier(&triangular_symbol(3)).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let e = ComplexMatrix::unit(3, 3, i, j);
            let want = if i <= j { e.clone() } else { ComplexMatrix::zeros(3, 3) };
            assert_eq!(tri.apply(&e).unwrap(), want);
        }
    }
}

#[test]
fn project_schur_examples() {
    let mut r = rng(41);
    let a = crate::random::random_matrix(&mut r, 4, 4);
    assert_eq!(project_schur(&schur_multiplier(&a).unwrap()).unwrap(), a);
    let u = random_unitary(&mut r, 3);
    let phi = project_schur(&SuperOperator::conjugation(&u)).unwrap();
    let want = ComplexMatrix::from_fn(3, 3, |i, j| u[(i, i)] * u[(j, j)].conj());
    assert!(phi.approx_eq(&want, 1e-14));
    let phi = project_schur(&SuperOperator::transpose_map(3)).unwrap();
    assert_eq!(phi, ComplexMatrix::identity(3));
}

#[test]
fn project_fourier_examples() {
    let alg = GroupAlgebra::untwisted(FiniteGroup::cyclic(4));
    let phi = real(&[1.0, 2.0, 3.0, 4.0]);
    let t = fourier_multiplier(&alg, &phi).unwrap();
    let all: Vec<usize> = (0..4).collect();
    let back = project_fourier(&alg, &t, &all).unwrap();
    assert!(back.iter().zip(&phi).all(|(a, b)| (a - b).norm() < 1e-14));
    let half = project_fourier(&alg, &t, &[0, 2]).unwrap();
    let want = real(&[1.0, 0.0, 3.0, 0.0]);
    assert!(half.iter().zip(&want).all(|(a, b)| (a - b).norm() < 1e-14));
    let unit = project_fourier(&alg, &SuperOperator::identity(4), &all).unwrap();
    assert!(unit.iter().all(|z| (z - ONE).norm() < 1e-14));
    assert!(matches!(project_fourier(&alg, &t, &[1, 2]), Err(Error::NotASubgroup(_))));
}

#[test]
fn gram_examples() {
    let alg = GroupAlgebra::untwisted(FiniteGroup::cyclic(2));
    let fam = vec![vec![real(&[1.0, 0.5])]];
    let g = kernel_positive_type_gram(&alg, &fam, &[(0, 0), (0, 1)]).unwrap();
    assert_eq!(g, ComplexMatrix::from_real(2, 2, &[1.0, 0.5, 0.5, 1.0]).unwrap());
    let ev = herm_eig(&g).unwrap().eigenvalues;
    assert!((ev[0] - 1.5).abs() < 1e-15 && (ev[1] - 0.5).abs() < 1e-15);

    let delta = vec![vec![real(&[1.0, 0.0])]];
    let g = kernel_positive_type_gram(&alg, &delta, &[(0, 0), (0, 1)]).unwrap();
    assert_eq!(g, ComplexMatrix::identity(2));

    // Truncation-like family on I = {0, 1}: φ_00 = φ_01 = φ_10 = 1, φ_11 = 0.
    let triv = GroupAlgebra::untwisted(FiniteGroup::cyclic(1));
    let fam = vec![vec![real(&[1.0]), real(&[1.0])], vec![real(&[1.0]), real(&[0.0])]];
    let g = kernel_positive_type_gram(&triv, &fam, &[(0, 0), (1, 0)]).unwrap();
    assert!(herm_eig(&g).unwrap().min() < -0.5);
    assert!(kernel_positive_type_gram(&triv, &fam, &[(2, 0)]).is_err());
}

#[test]
fn file_formats() {
    let g = FiniteGroup::klein();
    let alg = GroupAlgebra::new(g.clone(), TwoCocycle::klein_bicharacter(&g).unwrap()).unwrap();
    let f = GroupFile::from_algebra(&alg);
    let s = serde_json::to_string(&f).unwrap();
    let back: GroupFile = serde_json::from_str(&s).unwrap();
    let alg2 = back.build().unwrap();
    assert_eq!(alg2.cocycle(), alg.cocycle());
    let plain: GroupFile = serde_json::from_str(r#"{"order":2,"cayley":[[0,1],[1,0]]}"#).unwrap();
    assert!(plain.build().unwrap().cocycle().is_trivial());
    let bad: GroupFile = serde_json::from_str(r#"{"order":3,"cayley":[[0,1],[1,0]]}"#).unwrap();
    assert!(bad.build().is_err());

    let sym: MultiplierSymbol = serde_json::from_str(r#"{"kind":"fourier","values":[1,-1]}"#).unwrap();
    assert_eq!(sym, MultiplierSymbol::Fourier(real(&[1.0, -1.0])));
    let s = serde_json::to_string(&sym).unwrap();
    assert_eq!(serde_json::from_str::<MultiplierSymbol>(&s).unwrap(), sym);
    let schur = r#"{"kind":"schur","values":{"rows":1,"cols":1,"re":[2],"im":[0]}}"#;
    assert!(matches!(serde_json::from_str::<MultiplierSymbol>(schur).unwrap(), MultiplierSymbol::Schur(_)));
}
