use super::eig::herm_eig_fast;
use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Lower Cholesky factor L with H = L L*.
pub fn cholesky(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch("Cholesky of non-square matrix".into()));
    }
    let n = h.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = h[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let d = d.sqrt();
        l[(j, j)] = C64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = h[(i, j)];
            let (ri, rj) = (l.row(i), l.row(j));
            for k in 0..j {
                s -= ri[k] * rj[k].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix.
pub fn lower_inverse(l: &ComplexMatrix) -> ComplexMatrix {
    let n = l.rows();
    let mut inv = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = l[(j, j)].inv();
        for i in j + 1..n {
            let mut s = ZERO;
            for k in j..i {
                s += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    inv
}

/// Inverse of a Hermitian positive definite matrix via Cholesky.
pub fn hpd_inverse(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let li = lower_inverse(&cholesky(h)?);
    Ok(li.adjoint_matmul(&li))
}

/// Square root of a PSD matrix (negative eigenvalues clipped).
pub fn psd_sqrt(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(herm_eig_fast(h)?.apply_fn(|x| x.max(0.0).sqrt()))
}

/// |x| = (x* x)^{1/2}.
pub fn modulus(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    psd_sqrt(&x.adjoint_matmul(x))
}

/// Solve A x = b for general square complex A by partial-pivot LU.
pub fn lu_solve(a: &ComplexMatrix, b: &[C64]) -> Result<Vec<C64>> {
    let n = a.rows();
    if !a.is_square() || b.len() != n {
        return Err(Error::DimensionMismatch("linear solve".into()));
    }
    let mut m = a.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[(i, k)].norm().total_cmp(&m[(j, k)].norm())).unwrap();
        if m[(p, k)].norm() == 0.0 {
            return Err(Error::Invalid("singular matrix".into()));
        }
        if p != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(p, j)];
                m[(p, j)] = t;
            }
            x.swap(k, p);
        }
        let piv = m[(k, k)];
        for i in k + 1..n {
            let f = m[(i, k)] / piv;
            if f == ZERO {
                continue;
            }
            for j in k..n {
                let mk = m[(k, j)];
                m[(i, j)] -= f * mk;
            }
            let xk = x[k];
            x[i] -= f * xk;
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in k + 1..n {
            s -= m[(k, j)] * x[j];
        }
        x[k] = s / m[(k, k)];
    }
    Ok(x)
}
