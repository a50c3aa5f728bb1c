use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with matching unitary eigenvector columns.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// V diag(f(λ)) V*.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let k = self.eigenvalues.len();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        let mut scaled = v.clone();
        for i in 0..n {
            for j in 0..k {
                scaled[(i, j)] *= fl[j];
            }
        }
        scaled.matmul_adjoint(v)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(|x| x)
    }

    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("empty spectrum")
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn min_vector(&self) -> Vec<C64> {
        self.eigenvectors.column(self.eigenvalues.len() - 1)
    }
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", h.rows(), h.cols())));
    }
    let defect = h.hermitian_defect();
    if defect > 1e-10 * (1.0 + h.frobenius_norm()) {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot with a diagonal unitary,
/// then applies a real plane rotation.
pub fn herm_eig(h: &ComplexMatrix) -> Result<Spectrum> {
    check_hermitian(h)?;
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok(Spectrum { eigenvalues: vec![0.0; n], eigenvectors: v });
    }
    let target = f64::EPSILON * scale;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence("Jacobi eigenvalue sweep"));
    }
    let vals: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    Ok(sorted(vals, v))
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip pivots below the rounding level of both diagonal entries.
    if g < 1e-300 || (app.abs() + 100.0 * g == app.abs() && aqq.abs() + 100.0 * g == aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = (apq / g).conj();
    let theta = (aqq - app) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.rows();
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)] * phase;
        let np = akp * c - akq * s;
        let nq = akp * s + akq * c;
        a[(k, p)] = np;
        a[(k, q)] = nq;
        a[(p, k)] = np.conj();
        a[(q, k)] = nq.conj();
    }
    a[(p, p)] = C64::new(app - t * g, 0.0);
    a[(q, q)] = C64::new(aqq + t * g, 0.0);
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)] * phase;
        v[(k, p)] = vkp * c - vkq * s;
        v[(k, q)] = vkp * s + vkq * c;
    }
}

fn sorted(vals: Vec<f64>, v: ComplexMatrix) -> Spectrum {
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(v.rows(), n, |r, c| v[(r, order[c])]);
    Spectrum { eigenvalues, eigenvectors }
}

pub(crate) fn to_nalgebra(h: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_row_slice(h.rows(), h.cols(), h.as_slice())
}

pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Householder tridiagonalization plus implicit QL. Used in inner solver
/// loops where Jacobi is too slow; the caller owns Hermitian symmetry.
pub fn herm_eig_fast(h: &ComplexMatrix) -> Result<Spectrum> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch("eigen of non-square matrix".into()));
    }
    let m = to_nalgebra(&h.hermitian_part());
    let se = m
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or(Error::NoConvergence("tridiagonal QL"))?;
    let vals: Vec<f64> = se.eigenvalues.iter().copied().collect();
    if vals.iter().any(|x| !x.is_finite()) {
        return Err(Error::NoConvergence("tridiagonal QL"));
    }
    Ok(sorted(vals, from_nalgebra(&se.eigenvectors)))
}

/// Eigenvalues only, descending.
pub fn herm_eigenvalues_fast(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let m = to_nalgebra(&h.hermitian_part());
    let mut vals: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    if vals.iter().any(|x| !x.is_finite()) {
        return Err(Error::NoConvergence("tridiagonal QL"));
    }
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

pub fn lambda_min(h: &ComplexMatrix) -> Result<f64> {
    Ok(*herm_eigenvalues_fast(h)?.last().expect("empty matrix"))
}
