use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for (j, &sj) in self.s.iter().enumerate() {
                us[(i, j)] *= sj;
            }
        }
        us.matmul_adjoint(&self.v)
    }

    /// Polar phase U V* (a partial isometry on the support).
    pub fn phase(&self) -> ComplexMatrix {
        self.u.matmul_adjoint(&self.v)
    }
}

/// Thin SVD by one-sided (Hestenes) Jacobi: X = U diag(s) V*, s descending,
/// U and V with min(rows, cols) orthonormal columns.
pub fn svd(x: &ComplexMatrix) -> Result<Svd> {
    if x.rows() < x.cols() {
        let t = svd(&x.adjoint())?;
        return Ok(Svd { u: t.v, s: t.s, v: t.u });
    }
    let (m, n) = x.shape();
    // Columns stored contiguously: cols[j] is column j.
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| x.column(j)).collect();
    let mut vcols: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = ONE;
            e
        })
        .collect();
    let tol = f64::EPSILON * (m as f64).sqrt();
    // Columns at rounding level of the whole matrix are left alone.
    let negligible = (f64::EPSILON * x.frobenius_norm()).powi(2);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() || alpha.min(beta) <= negligible {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(q);
                rotate_pair(&mut lo[p], &mut hi[0], c, s, phase);
                let (lo, hi) = vcols.split_at_mut(q);
                rotate_pair(&mut lo[p], &mut hi[0], c, s, phase);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence("one-sided Jacobi SVD"));
    }
    let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let smax = norms.iter().cloned().fold(0.0, f64::max);
    let cutoff = smax * f64::EPSILON * (m.max(n) as f64);
    let mut u = ComplexMatrix::zeros(m, n);
    let mut v = ComplexMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut deficient = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        s.push(norms[j]);
        for i in 0..n {
            v[(i, k)] = vcols[j][i];
        }
        if norms[j] > cutoff && norms[j] > 0.0 {
            let col: Vec<C64> = cols[j].iter().map(|z| z / norms[j]).collect();
            for i in 0..m {
                u[(i, k)] = col[i];
            }
            basis.push(col);
        } else {
            deficient.push(k);
        }
    }
    // Complete U on the null directions with Gram-Schmidt on unit vectors.
    let mut e = 0;
    for k in deficient {
        loop {
            assert!(e < m, "basis completion ran out of candidates");
            let mut cand = vec![ZERO; m];
            cand[e] = ONE;
            e += 1;
            for _ in 0..2 {
                for b in &basis {
                    let proj: C64 = b.iter().zip(&cand).map(|(x, y)| x.conj() * y).sum();
                    for (c, bi) in cand.iter_mut().zip(b) {
                        *c -= proj * bi;
                    }
                }
            }
            let nrm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm > 1e-6 {
                let col: Vec<C64> = cand.iter().map(|z| z / nrm).collect();
                for i in 0..m {
                    u[(i, k)] = col[i];
                }
                basis.push(col);
                break;
            }
        }
    }
    Ok(Svd { u, s, v })
}

fn rotate_pair(a: &mut [C64], b: &mut [C64], c: f64, s: f64, phase: C64) {
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let xp = *x;
        let yq = *y * phase;
        *x = xp * c - yq * s;
        *y = xp * s + yq * c;
    }
}

pub fn singular_values(x: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(svd(x)?.s)
}

pub fn spectral_norm(x: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(x)?[0])
}
