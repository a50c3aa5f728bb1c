//! Linear maps M_n → M_m stored by their Choi matrix C(T) = Σ e_ij ⊗ T(e_ij).
//!
//! Index convention: C[(i·m + k), (j·m + l)] = T(e_ij)[k, l].

mod block;

pub use block::{modulus_block_check, BlockMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, herm_eig_fast, ComplexMatrix, C64, ZERO};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SuperOperatorFile")]
pub struct SuperOperator {
    in_dim: usize,
    out_dim: usize,
    choi: ComplexMatrix,
}

#[derive(Deserialize)]
struct SuperOperatorFile {
    in_dim: usize,
    out_dim: usize,
    choi: ComplexMatrix,
}

impl TryFrom<SuperOperatorFile> for SuperOperator {
    type Error = Error;
    fn try_from(f: SuperOperatorFile) -> Result<Self> {
        SuperOperator::from_choi(f.in_dim, f.out_dim, f.choi)
    }
}

/// Outcome of a Choi positivity test.
#[derive(Clone, Debug, Serialize)]
pub struct CpCertificate {
    pub is_cp: bool,
    pub lambda_min: f64,
    pub eigenvector: Vec<C64>,
    /// ‖C − C*‖_F; a non-Hermitian Choi matrix is never CP.
    pub hermitian_defect: f64,
}

/// λ_min test of a square matrix that should be Hermitian PSD.
pub fn psd_certificate(h: &ComplexMatrix, tol: f64) -> CpCertificate {
    let defect = h.hermitian_defect();
    let h = h.hermitian_part();
    let spec = if h.rows() <= 64 { herm_eig(&h) } else { herm_eig_fast(&h) }
        .or_else(|_| herm_eig_fast(&h))
        .expect("eigensolver on a Hermitian matrix");
    let lambda_min = spec.min();
    CpCertificate {
        is_cp: lambda_min >= -tol && defect <= tol.max(1e-12),
        lambda_min,
        eigenvector: spec.min_vector(),
        hermitian_defect: defect,
    }
}

impl SuperOperator {
    pub fn from_choi(n: usize, m: usize, choi: ComplexMatrix) -> Result<Self> {
        if n == 0 || m == 0 || choi.shape() != (n * m, n * m) {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix {}x{} for a map M_{n} -> M_{m}",
                choi.rows(),
                choi.cols()
            )));
        }
        Ok(SuperOperator { in_dim: n, out_dim: m, choi })
    }

    /// Images listed in order e_00, e_01, ..., e_(n-1)(n-1).
    pub fn from_action(n: usize, m: usize, images: &[ComplexMatrix]) -> Result<Self> {
        if images.len() != n * n {
            return Err(Error::DimensionMismatch(format!("{} images for n = {n}", images.len())));
        }
        if let Some(bad) = images.iter().find(|x| x.shape() != (m, m)) {
            return Err(Error::DimensionMismatch(format!("image of shape {:?}, expected {m}x{m}", bad.shape())));
        }
        let mut choi = ComplexMatrix::zeros(n * m, n * m);
        for i in 0..n {
            for j in 0..n {
                choi.set_block(i * m, j * m, &images[i * n + j]);
            }
        }
        Ok(SuperOperator { in_dim: n, out_dim: m, choi })
    }

    /// Evaluate `f` on every matrix unit.
    pub fn from_fn(n: usize, m: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let images: Vec<_> = (0..n * n).map(|u| f(&ComplexMatrix::unit(n, n, u / n, u % n))).collect();
        Self::from_action(n, m, &images)
    }

    /// x ↦ Σ K x K*, each K of shape m x n.
    pub fn from_kraus(ks: &[ComplexMatrix]) -> Result<Self> {
        let (m, n) = ks.first().ok_or_else(|| Error::Invalid("empty Kraus list".into()))?.shape();
        if ks.iter().any(|k| k.shape() != (m, n)) {
            return Err(Error::DimensionMismatch("Kraus operators of different shapes".into()));
        }
        let mut choi = ComplexMatrix::zeros(n * m, n * m);
        for k in ks {
            let w = ComplexMatrix::from_fn(n * m, 1, |r, _| k[(r % m, r / m)]);
            choi += &w.matmul_adjoint(&w);
        }
        Ok(SuperOperator { in_dim: n, out_dim: m, choi })
    }

    /// Map ℓ^∞_n → M_m with T(e_k) = u_k, as a map on M_n killing off-diagonal units.
    pub fn from_commutative(images: &[ComplexMatrix]) -> Result<Self> {
        let n = images.len();
        let m = images.first().ok_or_else(|| Error::Invalid("no images".into()))?.rows();
        let mut all = vec![ComplexMatrix::zeros(m, m); n * n];
        for (k, u) in images.iter().enumerate() {
            all[k * n + k] = u.clone();
        }
        Self::from_action(n, m, &all)
    }

    /// Liouville matrix L with vec(T(x)) = L vec(x), row-major vec.
    pub fn from_liouville(n: usize, m: usize, l: &ComplexMatrix) -> Result<Self> {
        if l.shape() != (m * m, n * n) {
            return Err(Error::DimensionMismatch("Liouville matrix shape".into()));
        }
        let choi = ComplexMatrix::from_fn(n * m, n * m, |r, c| {
            let (i, k, j, l2) = (r / m, r % m, c / m, c % m);
            l[(k * m + l2, i * n + j)]
        });
        Ok(SuperOperator { in_dim: n, out_dim: m, choi })
    }

    pub fn identity(n: usize) -> Self {
        Self::conjugation(&ComplexMatrix::identity(n))
    }

    pub fn zero(n: usize, m: usize) -> Self {
        SuperOperator { in_dim: n, out_dim: m, choi: ComplexMatrix::zeros(n * m, n * m) }
    }

    pub fn transpose_map(n: usize) -> Self {
        Self::from_fn(n, n, |x| x.transpose()).expect("square")
    }

    /// x ↦ U x U*.
    pub fn conjugation(u: &ComplexMatrix) -> Self {
        Self::from_kraus(std::slice::from_ref(u)).expect("single operator")
    }

    /// x ↦ A x.
    pub fn left_multiplication(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare(a.cols(), a.rows()));
        }
        Self::from_fn(a.rows(), a.rows(), |x| a.matmul(x))
    }

    /// x ↦ tr(x)·ρ.
    pub fn trace_times(n: usize, rho: &ComplexMatrix) -> Self {
        let m = rho.rows();
        let mut images = vec![ComplexMatrix::zeros(m, m); n * n];
        for i in 0..n {
            images[i * n + i] = rho.clone();
        }
        Self::from_action(n, m, &images).expect("shape")
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn into_choi(self) -> ComplexMatrix {
        self.choi
    }

    pub fn is_square(&self) -> bool {
        self.in_dim == self.out_dim
    }

    /// T(e_ij).
    pub fn image(&self, i: usize, j: usize) -> ComplexMatrix {
        let m = self.out_dim;
        self.choi.submatrix(i * m, j * m, m, m)
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (n, m) = (self.in_dim, self.out_dim);
        if x.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!("input {:?} for a map on M_{n}", x.shape())));
        }
        let mut out = ComplexMatrix::zeros(m, m);
        for i in 0..n {
            for j in 0..n {
                let xij = x[(i, j)];
                if xij == ZERO {
                    continue;
                }
                for k in 0..m {
                    let row = &self.choi.row(i * m + k)[j * m..(j + 1) * m];
                    for (l, c) in row.iter().enumerate() {
                        out[(k, l)] += xij * c;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn liouville(&self) -> ComplexMatrix {
        let (n, m) = (self.in_dim, self.out_dim);
        ComplexMatrix::from_fn(m * m, n * n, |r, c| {
            let (k, l, i, j) = (r / m, r % m, c / n, c % n);
            self.choi[(i * m + k, j * m + l)]
        })
    }

    /// self ∘ other.
    pub fn compose(&self, other: &SuperOperator) -> Result<Self> {
        if other.out_dim != self.in_dim {
            return Err(Error::DimensionMismatch(format!(
                "compose M_{} -> M_{} after M_{} -> M_{}",
                self.in_dim, self.out_dim, other.in_dim, other.out_dim
            )));
        }
        let l = self.liouville().matmul(&other.liouville());
        Self::from_liouville(other.in_dim, self.out_dim, &l)
    }

    fn with_choi(&self, choi: ComplexMatrix) -> Self {
        SuperOperator { in_dim: self.in_dim, out_dim: self.out_dim, choi }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if (self.in_dim, self.out_dim) != (other.in_dim, other.out_dim) {
            return Err(Error::DimensionMismatch("maps of different shapes".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.with_choi(&self.choi + &other.choi))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.with_choi(&self.choi - &other.choi))
    }

    pub fn scale(&self, a: C64) -> Self {
        self.with_choi(self.choi.scale(a))
    }

    pub fn scale_real(&self, a: f64) -> Self {
        self.with_choi(self.choi.scale_real(a))
    }

    /// T°(x) = T(x*)*. Its Choi matrix is C(T)*.
    pub fn opposite(&self) -> Self {
        SuperOperator { in_dim: self.in_dim, out_dim: self.out_dim, choi: self.choi.adjoint() }
    }

    /// Trace-duality adjoint: tr(T(x) y) = tr(x T'(y)).
    pub fn adjoint(&self) -> Self {
        let (n, m) = (self.in_dim, self.out_dim);
        let choi = ComplexMatrix::from_fn(m * n, m * n, |r, c| {
            let (k, i, l, j) = (r / n, r % n, c / n, c % n);
            self.choi[(j * m + l, i * m + k)]
        });
        SuperOperator { in_dim: m, out_dim: n, choi }
    }

    /// Adjoint for the Hilbert-Schmidt inner product ⟨x, y⟩ = tr(x* y).
    pub fn hs_adjoint(&self) -> Self {
        self.adjoint().opposite()
    }

    /// Id_{M_d} ⊗ T.
    pub fn amplify(&self, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Invalid("amplification degree must be positive".into()));
        }
        let (n, m) = (self.in_dim, self.out_dim);
        let (dn, dm) = (d * n, d * m);
        let mut choi = ComplexMatrix::zeros(dn * dm, dn * dm);
        for a in 0..d {
            for b in 0..d {
                for i in 0..n {
                    for j in 0..n {
                        let row0 = (a * n + i) * dm + a * m;
                        let col0 = (b * n + j) * dm + b * m;
                        for k in 0..m {
                            for l in 0..m {
                                choi[(row0 + k, col0 + l)] = self.choi[(i * m + k, j * m + l)];
                            }
                        }
                    }
                }
            }
        }
        Ok(SuperOperator { in_dim: dn, out_dim: dm, choi })
    }

    pub fn cp_certificate(&self, tol: f64) -> CpCertificate {
        psd_certificate(&self.choi, tol)
    }

    /// λ_min(C(T)) ≥ −tol.
    pub fn is_cp(&self, tol: f64) -> bool {
        self.cp_certificate(tol).is_cp
    }

    /// Default PSD slack: 1e-8 scaled by the Choi trace.
    pub fn default_psd_tol(&self) -> f64 {
        1e-8 * self.choi.trace().norm().max(1.0)
    }

    /// max over units of ‖T(e_ij*) − T(e_ij)*‖_F ≤ tol.
    pub fn is_selfadjoint_map(&self, tol: f64) -> bool {
        self.selfadjoint_defect() <= tol
    }

    pub fn selfadjoint_defect(&self) -> f64 {
        let n = self.in_dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let d = (&self.image(j, i) - &self.image(i, j).adjoint()).frobenius_norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// T(e_ij) = 0 whenever i ≠ j, within tol.
    pub fn is_diagonal_input(&self, tol: f64) -> bool {
        let n = self.in_dim;
        (0..n).all(|i| (0..n).all(|j| i == j || self.image(i, j).max_abs() <= tol))
    }

    /// [[0, T], [T°, 0]] on M_2n.
    pub fn tilde(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare(self.in_dim, self.out_dim));
        }
        let z = SuperOperator::zero(self.in_dim, self.out_dim);
        Ok(BlockMap::new(&z, self, &z)?.assembled)
    }

    /// Extract the (row, col) corner of a map on M_2n → M_2m acting on the
    /// matching corner of the input.
    pub fn corner(&self, row: usize, col: usize) -> Result<Self> {
        if self.in_dim % 2 != 0 || self.out_dim % 2 != 0 {
            return Err(Error::DimensionMismatch("corner of an odd-dimensional map".into()));
        }
        let (n, m) = (self.in_dim / 2, self.out_dim / 2);
        let mut images = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let img = self.image(row * n + i, col * n + j);
                images.push(img.submatrix(row * m, col * m, m, m));
            }
        }
        Self::from_action(n, m, &images)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.in_dim == other.in_dim && self.out_dim == other.out_dim && self.choi.approx_eq(&other.choi, tol)
    }

    pub fn write_json(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn read_json(path: &std::path::Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

#[cfg(test)]
mod tests;
