use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Which tensor factor to trace out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    First,
    Second,
}

/// Kronecker product; index (i,k),(j,l) maps to (i·rows_b + k, j·cols_b + l).
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Partial trace of an operator on C^n ⊗ C^m.
pub fn partial_trace(x: &ComplexMatrix, n: usize, m: usize, side: Side) -> Result<ComplexMatrix> {
    if x.rows() != n * m || x.cols() != n * m {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator on a {n}*{m} system",
            x.rows(),
            x.cols()
        )));
    }
    Ok(match side {
        Side::First => ComplexMatrix::from_fn(m, m, |k, l| (0..n).map(|i| x[(i * m + k, i * m + l)]).sum()),
        Side::Second => ComplexMatrix::from_fn(n, n, |i, j| (0..m).map(|k| x[(i * m + k, j * m + k)]).sum()),
    })
}

/// Partial transpose on the second factor of C^n ⊗ C^m.
pub fn partial_transpose_second(x: &ComplexMatrix, n: usize, m: usize) -> Result<ComplexMatrix> {
    if x.rows() != n * m || x.cols() != n * m {
        return Err(Error::DimensionMismatch("partial transpose".into()));
    }
    Ok(ComplexMatrix::from_fn(n * m, n * m, |r, c| {
        let (i, k) = (r / m, r % m);
        let (j, l) = (c / m, c % m);
        x[(i * m + l, j * m + k)]
    }))
}

/// Swap operator on C^n ⊗ C^n.
pub fn swap_operator(n: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for k in 0..n {
            s[(i * n + k, k * n + i)] = super::matrix::ONE;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::ONE;
    use crate::linalg::svd::singular_values;
    use crate::random::{random_matrix, rng};

    #[test]
    fn kron_identity_is_block_diagonal() {
        let mut r = rng(1);
        let b = random_matrix(&mut r, 3, 3);
        let k = kron(&ComplexMatrix::identity(2), &b);
        let z = ComplexMatrix::zeros(3, 3);
        assert_eq!(k, ComplexMatrix::block2x2(&b, &z, &z, &b).unwrap());
    }

    #[test]
    fn kron_units() {
        let e = ComplexMatrix::unit(2, 2, 0, 0);
        let k = kron(&e, &e);
        assert_eq!(k, ComplexMatrix::unit(4, 4, 0, 0));
        let k = kron(&ComplexMatrix::unit(2, 2, 0, 1), &ComplexMatrix::unit(3, 3, 2, 1));
        assert_eq!(k[(2, 4)], ONE);
        assert!((k.frobenius_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kron_singular_values_are_products() {
        let mut r = rng(2);
        let a = random_matrix(&mut r, 3, 2);
        let b = random_matrix(&mut r, 2, 4);
        let sa = singular_values(&a).unwrap();
        let sb = singular_values(&b).unwrap();
        let mut prod: Vec<f64> = sa.iter().flat_map(|x| sb.iter().map(move |y| x * y)).collect();
        prod.sort_by(|a, b| b.total_cmp(a));
        let sk = singular_values(&kron(&a, &b)).unwrap();
        for (x, y) in sk.iter().zip(&prod) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn partial_traces() {
        let mut r = rng(3);
        let a = random_matrix(&mut r, 2, 2);
        let b = random_matrix(&mut r, 3, 3);
        let pt = partial_trace(&kron(&ComplexMatrix::identity(2), &b), 2, 3, Side::First).unwrap();
        assert!(pt.approx_eq(&b.scale_real(2.0), 1e-14));
        let pt = partial_trace(&kron(&a, &ComplexMatrix::identity(3)), 2, 3, Side::Second).unwrap();
        assert!(pt.approx_eq(&a.scale_real(3.0), 1e-14));
        let pt = partial_trace(&kron(&a, &b), 2, 3, Side::First).unwrap();
        assert!(pt.approx_eq(&b.scale(a.trace()), 1e-12));
        let x = random_matrix(&mut r, 6, 6);
        for (n, m) in [(2, 3), (3, 2)] {
            let t1 = partial_trace(&x, n, m, Side::First).unwrap().trace();
            let t2 = partial_trace(&x, n, m, Side::Second).unwrap().trace();
            assert!((t1 - x.trace()).norm() < 1e-12 && (t2 - x.trace()).norm() < 1e-12);
        }
        assert!(partial_trace(&x, 2, 2, Side::First).is_err());
    }

    #[test]
    fn swap_squares_to_identity() {
        let s = swap_operator(3);
        assert!(s.matmul(&s).approx_eq(&ComplexMatrix::identity(9), 0.0));
        let x = kron(&ComplexMatrix::unit(3, 3, 0, 1), &ComplexMatrix::unit(3, 3, 2, 2));
        let y = kron(&ComplexMatrix::unit(3, 3, 2, 2), &ComplexMatrix::unit(3, 3, 0, 1));
        assert!(s.matmul(&x).matmul(&s).approx_eq(&y, 0.0));
    }
}
