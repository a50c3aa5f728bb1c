//! General SDPs with explicitly stored constraint data.
//!
//! Variables are Hermitian matrices (a 1×1 variable is a real scalar). Every
//! PSD block is an affine expression F0 + Σ y_k F_k in the orthonormal
//! coordinates y of the variables. Linear equalities are eliminated through a
//! null-space basis before the interior-point method runs.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::coords::{basis_matrix, from_coords, herm_dim, to_coords};
use super::ipm::{solve_lmi, Blocks, LmiOperator, NewtonSystem};
use super::{NamedMatrix, SdpOptions, SdpSolution};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarId(pub usize);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spec {
    pub name: String,
    pub dim: usize,
}

/// One entry of the constant term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub re: f64,
    pub im: f64,
}

/// Coefficient of coordinate `coord` at one block entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coord: usize,
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub re: f64,
    pub im: f64,
}

/// Σ coeffs[i].1 · y[coeffs[i].0] = rhs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equality {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// minimize objective·y subject to every block ⪰ 0 and the equalities.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem {
    pub blocks: Vec<Spec>,
    pub variables: Vec<Spec>,
    pub objective: Vec<f64>,
    pub constant: Vec<Entry>,
    pub terms: Vec<Term>,
    pub equalities: Vec<Equality>,
}

impl SdpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_coords(&self) -> usize {
        self.objective.len()
    }

    pub fn add_block(&mut self, name: &str, dim: usize) -> BlockId {
        self.blocks.push(Spec { name: name.into(), dim });
        BlockId(self.blocks.len() - 1)
    }

    pub fn add_var(&mut self, name: &str, dim: usize) -> VarId {
        self.variables.push(Spec { name: name.into(), dim });
        self.objective.extend(std::iter::repeat(0.0).take(herm_dim(dim)));
        VarId(self.variables.len() - 1)
    }

    pub fn add_scalar(&mut self, name: &str) -> VarId {
        self.add_var(name, 1)
    }

    pub fn var_dim(&self, v: VarId) -> usize {
        self.variables[v.0].dim
    }

    pub fn block_dim(&self, b: BlockId) -> usize {
        self.blocks[b.0].dim
    }

    fn offset(&self, v: VarId) -> usize {
        self.variables[..v.0].iter().map(|s| herm_dim(s.dim)).sum()
    }

    pub fn add_constant(&mut self, block: BlockId, f: &ComplexMatrix) -> Result<()> {
        let d = self.block_dim(block);
        if f.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!("constant {:?} in a block of size {d}", f.shape())));
        }
        for r in 0..d {
            for c in 0..d {
                let v = f[(r, c)];
                if v != C64::new(0.0, 0.0) {
                    self.constant.push(Entry { block: block.0, row: r, col: c, re: v.re, im: v.im });
                }
            }
        }
        Ok(())
    }

    /// Adds the linear image `map(Z)` of variable `var` to `block`.
    pub fn add_map(&mut self, block: BlockId, var: VarId, mut map: impl FnMut(&ComplexMatrix) -> ComplexMatrix) -> Result<()> {
        let d = self.block_dim(block);
        let vd = self.var_dim(var);
        let off = self.offset(var);
        for k in 0..herm_dim(vd) {
            let img = map(&basis_matrix(vd, k));
            if img.shape() != (d, d) {
                return Err(Error::DimensionMismatch(format!("image {:?} in a block of size {d}", img.shape())));
            }
            for r in 0..d {
                for c in 0..d {
                    let v = img[(r, c)];
                    if v != C64::new(0.0, 0.0) {
                        self.terms.push(Term { coord: off + k, block: block.0, row: r, col: c, re: v.re, im: v.im });
                    }
                }
            }
        }
        Ok(())
    }

    /// Adds `coef · Z` on the diagonal sub-block starting at `at`.
    pub fn place(&mut self, block: BlockId, var: VarId, at: usize, coef: f64) -> Result<()> {
        let d = self.block_dim(block);
        let vd = self.var_dim(var);
        if at + vd > d {
            return Err(Error::DimensionMismatch(format!("variable of size {vd} at {at} in a block of size {d}")));
        }
        self.add_map(block, var, |z| {
            let mut m = ComplexMatrix::zeros(d, d);
            m.set_block(at, at, &z.scale_real(coef));
            m
        })
    }

    /// Adds `coef · t · I` for a scalar variable t.
    pub fn add_scalar_identity(&mut self, block: BlockId, var: VarId, coef: f64) -> Result<()> {
        let d = self.block_dim(block);
        self.add_map(block, var, |z| ComplexMatrix::identity(d).scale(z[(0, 0)] * coef))
    }

    /// Adds Re tr(W Z) to the objective.
    pub fn minimize(&mut self, var: VarId, w: &ComplexMatrix) -> Result<()> {
        let vd = self.var_dim(var);
        if w.shape() != (vd, vd) {
            return Err(Error::DimensionMismatch(format!("weight {:?} for a variable of size {vd}", w.shape())));
        }
        let off = self.offset(var);
        for (k, c) in to_coords(w).into_iter().enumerate() {
            self.objective[off + k] += c;
        }
        Ok(())
    }

    pub fn minimize_scalar(&mut self, var: VarId, coef: f64) -> Result<()> {
        self.minimize(var, &ComplexMatrix::diag_real(&[coef]))
    }

    /// Σ Re tr(W_i Z_i) = rhs.
    pub fn add_equality(&mut self, parts: &[(VarId, ComplexMatrix)], rhs: f64) -> Result<()> {
        let mut coeffs = Vec::new();
        for (var, w) in parts {
            let vd = self.var_dim(*var);
            if w.shape() != (vd, vd) {
                return Err(Error::DimensionMismatch(format!("weight {:?} for a variable of size {vd}", w.shape())));
            }
            let off = self.offset(*var);
            for (k, c) in to_coords(w).into_iter().enumerate() {
                if c != 0.0 {
                    coeffs.push((off + k, c));
                }
            }
        }
        self.equalities.push(Equality { coeffs, rhs });
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let k = self.num_coords();
        let expect: usize = self.variables.iter().map(|s| herm_dim(s.dim)).sum();
        if expect != k {
            return Err(Error::Invalid(format!("objective has {k} coordinates, variables need {expect}")));
        }
        if self.blocks.is_empty() || self.blocks.iter().any(|b| b.dim == 0) || self.variables.iter().any(|v| v.dim == 0) {
            return Err(Error::Invalid("empty block or variable".into()));
        }
        let nb = self.blocks.len();
        let inside = |b: usize, r: usize, c: usize| b < nb && r < self.blocks[b].dim && c < self.blocks[b].dim;
        for e in &self.constant {
            if !inside(e.block, e.row, e.col) || !e.re.is_finite() || !e.im.is_finite() {
                return Err(Error::Invalid(format!("bad constant entry {e:?}")));
            }
        }
        for t in &self.terms {
            if t.coord >= k || !inside(t.block, t.row, t.col) || !t.re.is_finite() || !t.im.is_finite() {
                return Err(Error::Invalid(format!("bad term {t:?}")));
            }
        }
        for e in &self.equalities {
            if e.coeffs.iter().any(|&(i, c)| i >= k || !c.is_finite()) || !e.rhs.is_finite() {
                return Err(Error::Invalid("bad equality".into()));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invalid("non-finite objective".into()));
        }
        Ok(())
    }

    pub fn solve(&self, opts: &SdpOptions) -> Result<SdpSolution> {
        self.validate()?;
        let dims: Vec<usize> = self.blocks.iter().map(|b| b.dim).collect();
        let k = self.num_coords();

        let mut full: Vec<Blocks> = vec![Vec::new(); k];
        for t in &self.terms {
            let f = &mut full[t.coord];
            if f.is_empty() {
                *f = dims.iter().map(|&d| ComplexMatrix::zeros(d, d)).collect();
            }
            f[t.block][(t.row, t.col)] += C64::new(t.re, t.im);
        }
        let mut f0: Blocks = dims.iter().map(|&d| ComplexMatrix::zeros(d, d)).collect();
        for e in &self.constant {
            f0[e.block][(e.row, e.col)] += C64::new(e.re, e.im);
        }
        for (i, f) in full.iter().enumerate() {
            for (b, m) in f.iter().enumerate() {
                if m.hermitian_defect() > 1e-12 * (1.0 + m.frobenius_norm()) {
                    return Err(Error::Invalid(format!("coefficient of coordinate {i} is not Hermitian in block {b}")));
                }
            }
        }
        for (b, m) in f0.iter().enumerate() {
            if m.hermitian_defect() > 1e-12 * (1.0 + m.frobenius_norm()) {
                return Err(Error::Invalid(format!("constant is not Hermitian in block {b}")));
            }
        }

        // y = y0 + N z.
        let (y0, basis) = self.eliminate(k)?;
        let r = basis.ncols();
        let mut f0r = f0.clone();
        for (i, f) in full.iter().enumerate() {
            if y0[i] != 0.0 {
                for (b, m) in f.iter().enumerate() {
                    f0r[b].axpy_real(y0[i], m);
                }
            }
        }
        let mut fs = Vec::with_capacity(r);
        let mut c = Vec::with_capacity(r);
        for j in 0..r {
            let mut acc: Blocks = dims.iter().map(|&d| ComplexMatrix::zeros(d, d)).collect();
            let mut cj = 0.0;
            for i in 0..k {
                let w = basis[(i, j)];
                if w == 0.0 {
                    continue;
                }
                cj += w * self.objective[i];
                for (b, m) in full[i].iter().enumerate() {
                    acc[b].axpy_real(w, m);
                }
            }
            fs.push(Sparse::from_blocks(&acc));
            c.push(cj);
        }
        let offset: f64 = y0.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        let op = DenseLmi { dims, f0: f0r, fs, c };
        let out = solve_lmi(&op, opts)?;

        let y: Vec<f64> = (0..k).map(|i| y0[i] + (0..r).map(|j| basis[(i, j)] * out.y[j]).sum::<f64>()).collect();
        let eq_violation = self
            .equalities
            .iter()
            .map(|e| (e.coeffs.iter().map(|&(i, a)| a * y[i]).sum::<f64>() - e.rhs).abs())
            .fold(0.0, f64::max);
        let mut variables = Vec::new();
        let mut off = 0;
        for v in &self.variables {
            let n = herm_dim(v.dim);
            variables.push(NamedMatrix { name: v.name.clone(), value: from_coords(&y[off..off + n], v.dim) });
            off += n;
        }
        let multipliers = self.blocks.iter().zip(out.x).map(|(b, x)| NamedMatrix { name: b.name.clone(), value: x }).collect();
        Ok(SdpSolution {
            status: out.status,
            iterations: out.iterations,
            primal_objective: out.primal_objective + offset,
            dual_objective: out.dual_objective + offset,
            gap: out.gap,
            violation: out.violation.max(eq_violation),
            variables,
            multipliers,
        })
    }

    /// Particular solution and orthonormal null-space basis of the equalities.
    fn eliminate(&self, k: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
        if self.equalities.is_empty() {
            return Ok((vec![0.0; k], DMatrix::identity(k, k)));
        }
        let e = self.equalities.len();
        let mut a = DMatrix::<f64>::zeros(e.max(k), k);
        let mut b = DVector::<f64>::zeros(e.max(k));
        for (row, eq) in self.equalities.iter().enumerate() {
            for &(i, c) in &eq.coeffs {
                a[(row, i)] += c;
            }
            b[row] = eq.rhs;
        }
        // Padding with zero rows gives a full V from the thin SVD.
        let svd = a.clone().svd(true, true);
        let v_t = svd.v_t.as_ref().expect("requested");
        let u = svd.u.as_ref().expect("requested");
        let smax = svd.singular_values.max();
        let cut = 1e-12 * smax.max(1.0) * (e.max(k) as f64);
        let mut y0 = DVector::<f64>::zeros(k);
        let mut null = Vec::new();
        for (idx, &s) in svd.singular_values.iter().enumerate() {
            if s > cut {
                let coef = u.column(idx).dot(&b) / s;
                y0 += v_t.row(idx).transpose() * coef;
            } else {
                null.push(idx);
            }
        }
        let resid = (&a * &y0 - &b).amax();
        if resid > 1e-9 * (1.0 + b.amax()) {
            return Err(Error::Infeasible);
        }
        let mut basis = DMatrix::<f64>::zeros(k, null.len());
        for (c, &idx) in null.iter().enumerate() {
            basis.set_column(c, &v_t.row(idx).transpose());
        }
        Ok((y0.iter().copied().collect(), basis))
    }

    pub fn write_json(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn read_json(path: &std::path::Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Nonzero entries (block, row, col, value).
struct Sparse(Vec<(usize, usize, usize, C64)>);

impl Sparse {
    fn from_blocks(blocks: &[ComplexMatrix]) -> Self {
        let mut v = Vec::new();
        for (b, m) in blocks.iter().enumerate() {
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    let z = m[(r, c)];
                    if z.norm() > 0.0 {
                        v.push((b, r, c, z));
                    }
                }
            }
        }
        Sparse(v)
    }

    fn pair(&self, x: &[ComplexMatrix]) -> f64 {
        self.0.iter().map(|&(b, r, c, v)| (v * x[b][(c, r)]).re).sum()
    }
}

struct DenseLmi {
    dims: Vec<usize>,
    f0: Blocks,
    fs: Vec<Sparse>,
    c: Vec<f64>,
}

impl LmiOperator for DenseLmi {
    fn num_vars(&self) -> usize {
        self.fs.len()
    }

    fn block_dims(&self) -> &[usize] {
        &self.dims
    }

    fn constant(&self) -> &[ComplexMatrix] {
        &self.f0
    }

    fn objective(&self) -> &[f64] {
        &self.c
    }

    fn apply(&self, y: &[f64]) -> Blocks {
        let mut out: Blocks = self.dims.iter().map(|&d| ComplexMatrix::zeros(d, d)).collect();
        for (f, &yj) in self.fs.iter().zip(y) {
            for &(b, r, c, v) in &f.0 {
                out[b][(r, c)] += v * yj;
            }
        }
        out
    }

    fn apply_adjoint(&self, x: &[ComplexMatrix]) -> Vec<f64> {
        self.fs.iter().map(|f| f.pair(x)).collect()
    }

    fn newton_system<'a>(&'a self, w: &'a [ComplexMatrix], _w_inv: &'a [ComplexMatrix]) -> Result<Box<dyn NewtonSystem + 'a>> {
        let k = self.fs.len();
        let mut m = DMatrix::<f64>::zeros(k, k);
        for j in 0..k {
            let mut touched: Vec<usize> = self.fs[j].0.iter().map(|e| e.0).collect();
            touched.dedup();
            let mut img: Blocks = self.dims.iter().map(|_| ComplexMatrix::zeros(1, 1)).collect();
            let mut fj: Blocks = self.dims.iter().map(|&d| ComplexMatrix::zeros(d, d)).collect();
            for &(b, r, c, v) in &self.fs[j].0 {
                fj[b][(r, c)] += v;
            }
            for b in 0..self.dims.len() {
                img[b] = if touched.contains(&b) {
                    w[b].matmul(&fj[b]).matmul(&w[b])
                } else {
                    ComplexMatrix::zeros(self.dims[b], self.dims[b])
                };
            }
            for i in j..k {
                let v = self.fs[i].pair(&img);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(Box::new(DenseNewton::new(m)?))
    }
}

enum DenseNewton {
    Chol(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    Lu(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl DenseNewton {
    fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NoConvergence("non-finite Newton system"));
        }
        match m.clone().cholesky() {
            Some(c) => Ok(DenseNewton::Chol(c)),
            None => Ok(DenseNewton::Lu(m.lu())),
        }
    }
}

impl NewtonSystem for DenseNewton {
    fn solve(&self, r: &[f64]) -> Result<Vec<f64>> {
        let b = DVector::from_column_slice(r);
        let x = match self {
            DenseNewton::Chol(c) => c.solve(&b),
            DenseNewton::Lu(l) => l.solve(&b).ok_or(Error::NoConvergence("singular Newton system"))?,
        };
        Ok(x.iter().copied().collect())
    }
}
