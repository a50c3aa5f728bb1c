//! Structured programs of the form
//!
//!   minimize t  s.t.  [[Z1, C], [C*, Z2]] ⪰ 0,   t·I − Σ_k V_k* Z_side V_k ⪰ 0 per cap,
//!
//! where each V_k is a column selector. The Newton system is solved through a
//! closed-form inverse of the 2×2-block part plus a Woodbury correction for
//! the caps, so the cost grows like N³ rather than N⁶.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::coords::{basis_matrix, from_coords, herm_dim, push_coords, to_coords};
use super::ipm::{solve_lmi, Blocks, LmiOperator, NewtonSystem};
use super::{SdpOptions, SdpStatus};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, herm_eig_fast, hpd_inverse, lower_inverse, ComplexMatrix, Side};

/// t·I_dim − Σ_k (Z_side restricted to selectors[k]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub side: Side,
    pub dim: usize,
    pub selectors: Vec<Vec<usize>>,
}

impl Cap {
    fn apply(&self, z: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for s in &self.selectors {
            for a in 0..self.dim {
                for b in 0..self.dim {
                    out[(a, b)] += z[(s[a], s[b])];
                }
            }
        }
        out
    }

    fn add_adjoint(&self, h: &ComplexMatrix, z: &mut ComplexMatrix) {
        for s in &self.selectors {
            for a in 0..self.dim {
                for b in 0..self.dim {
                    z[(s[a], s[b])] += h[(a, b)];
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockProgram {
    pub c: ComplexMatrix,
    pub caps: Vec<Cap>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockSolution {
    pub status: SdpStatus,
    pub iterations: usize,
    pub t: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub violation: f64,
    pub z1: ComplexMatrix,
    pub z2: ComplexMatrix,
    pub block_multiplier: ComplexMatrix,
    pub cap_multipliers: Vec<ComplexMatrix>,
}

impl BlockProgram {
    pub fn new(c: ComplexMatrix, caps: Vec<Cap>) -> Result<Self> {
        let (n1, n2) = c.shape();
        if caps.is_empty() {
            return Err(Error::Invalid("a block program needs at least one cap".into()));
        }
        for cap in &caps {
            let n = if cap.side == Side::First { n1 } else { n2 };
            if cap.dim == 0 || cap.selectors.is_empty() {
                return Err(Error::Invalid("empty cap".into()));
            }
            for s in &cap.selectors {
                if s.len() != cap.dim || s.iter().any(|&i| i >= n) {
                    return Err(Error::DimensionMismatch(format!("selector {s:?} for a cap of size {} on {n}", cap.dim)));
                }
            }
        }
        Ok(BlockProgram { c, caps })
    }

    pub fn solve(&self, opts: &SdpOptions) -> Result<BlockSolution> {
        let op = BlockLmi::new(self);
        let out = solve_lmi(&op, opts)?;
        let (n1, n2) = self.c.shape();
        let z1 = from_coords(&out.y[..n1 * n1], n1);
        let z2 = from_coords(&out.y[n1 * n1..n1 * n1 + n2 * n2], n2);
        let mut x = out.x.into_iter();
        let block_multiplier = x.next().expect("main block");
        Ok(BlockSolution {
            status: out.status,
            iterations: out.iterations,
            t: out.primal_objective,
            dual_objective: out.dual_objective,
            gap: out.gap,
            violation: out.violation,
            z1,
            z2,
            block_multiplier,
            cap_multipliers: x.collect(),
        })
    }
}

struct BlockLmi<'p> {
    prog: &'p BlockProgram,
    n1: usize,
    n2: usize,
    dims: Vec<usize>,
    f0: Blocks,
    c: Vec<f64>,
}

impl<'p> BlockLmi<'p> {
    fn new(prog: &'p BlockProgram) -> Self {
        let (n1, n2) = prog.c.shape();
        let mut dims = vec![n1 + n2];
        dims.extend(prog.caps.iter().map(|c| c.dim));
        let zero1 = ComplexMatrix::zeros(n1, n1);
        let zero2 = ComplexMatrix::zeros(n2, n2);
        let mut f0 = vec![ComplexMatrix::block2x2(&zero1, &prog.c, &prog.c.adjoint(), &zero2).expect("shapes")];
        f0.extend(prog.caps.iter().map(|c| ComplexMatrix::zeros(c.dim, c.dim)));
        let nv = n1 * n1 + n2 * n2 + 1;
        let mut c = vec![0.0; nv];
        c[nv - 1] = 1.0;
        BlockLmi { prog, n1, n2, dims, f0, c }
    }

    fn split(&self, y: &[f64]) -> (ComplexMatrix, ComplexMatrix, f64) {
        let (n1, n2) = (self.n1, self.n2);
        (from_coords(&y[..n1 * n1], n1), from_coords(&y[n1 * n1..n1 * n1 + n2 * n2], n2), y[n1 * n1 + n2 * n2])
    }

    fn join(&self, z1: &ComplexMatrix, z2: &ComplexMatrix, t: f64) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.c.len());
        push_coords(z1, &mut v);
        push_coords(z2, &mut v);
        v.push(t);
        v
    }

    fn side<'a>(&self, s: Side, z1: &'a ComplexMatrix, z2: &'a ComplexMatrix) -> &'a ComplexMatrix {
        if s == Side::First {
            z1
        } else {
            z2
        }
    }
}

impl LmiOperator for BlockLmi<'_> {
    fn num_vars(&self) -> usize {
        self.c.len()
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
        let (z1, z2, t) = self.split(y);
        let mut out = Vec::with_capacity(self.dims.len());
        let mut b0 = ComplexMatrix::zeros(self.n1 + self.n2, self.n1 + self.n2);
        b0.set_block(0, 0, &z1);
        b0.set_block(self.n1, self.n1, &z2);
        out.push(b0);
        for cap in &self.prog.caps {
            let mut m = -&cap.apply(self.side(cap.side, &z1, &z2));
            m.add_identity(t);
            out.push(m);
        }
        out
    }

    fn apply_adjoint(&self, x: &[ComplexMatrix]) -> Vec<f64> {
        let (n1, n2) = (self.n1, self.n2);
        let mut r1 = x[0].submatrix(0, 0, n1, n1);
        let mut r2 = x[0].submatrix(n1, n1, n2, n2);
        let mut t = 0.0;
        for (cap, xc) in self.prog.caps.iter().zip(&x[1..]) {
            let neg = -xc;
            match cap.side {
                Side::First => cap.add_adjoint(&neg, &mut r1),
                Side::Second => cap.add_adjoint(&neg, &mut r2),
            }
            t += xc.trace().re;
        }
        self.join(&r1, &r2, t)
    }

    fn newton_system<'a>(&'a self, w: &'a [ComplexMatrix], w_inv: &'a [ComplexMatrix]) -> Result<Box<dyn NewtonSystem + 'a>> {
        Ok(Box::new(BlockNewton::new(self, w, &w_inv[0])?))
    }
}

/// Closed-form inverse of P(Z1, Z2) = diagonal blocks of W0·diag(Z1, Z2)·W0.
struct BlockInverse {
    j: ComplexMatrix,
    a: ComplexMatrix,
    t2: ComplexMatrix,
    gamma: Vec<f64>,
}

impl BlockInverse {
    /// `v0` is W0⁻¹; its (2,2) block is the inverse Schur complement, which
    /// is far more accurate than forming W22 − W21 W11⁻¹ W12 late in a solve.
    fn new(w0: &ComplexMatrix, v0: &ComplexMatrix, n1: usize, n2: usize) -> Result<Self> {
        let w11 = w0.submatrix(0, 0, n1, n1).hermitian_part();
        let w21 = w0.submatrix(n1, 0, n2, n1);
        let w22 = w0.submatrix(n1, n1, n2, n2).hermitian_part();
        let v22 = v0.submatrix(n1, n1, n2, n2).hermitian_part();
        let j = hpd_inverse(&w11)?;
        let a = w21.matmul(&j);
        let l = cholesky(&w22)?;
        // μ = eig(L⁻¹ S L⁻*) = 1 / eig(L* V22 L).
        let spec = herm_eig_fast(&l.adjoint_matmul(&v22).matmul(&l).hermitian_part())?;
        let mu: Vec<f64> = spec.eigenvalues.iter().map(|&nu| (1.0 / nu.max(1.0)).max(1e-300)).collect();
        let t2 = lower_inverse(&l).adjoint_matmul(&spec.eigenvectors);
        let gamma = (0..n2 * n2).map(|k| {
            let (i, l) = (k / n2, k % n2);
            mu[i] + mu[l] - mu[i] * mu[l]
        });
        Ok(BlockInverse { j, a, t2, gamma: gamma.collect() })
    }

    /// Q(S2 − A S1 A*) = T2*(S2 − A S1 A*)T2.
    fn q(&self, s: &ComplexMatrix) -> ComplexMatrix {
        self.t2.adjoint_matmul(s).matmul(&self.t2)
    }

    fn divide(&self, y: &mut ComplexMatrix) {
        for (v, g) in y.as_mut_slice().iter_mut().zip(&self.gamma) {
            *v /= *g;
        }
    }

    fn apply(&self, r1: &ComplexMatrix, r2: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
        let rp = r2 - &self.a.matmul(r1).matmul_adjoint(&self.a);
        let mut y = self.q(&rp);
        self.divide(&mut y);
        let z2 = self.t2.matmul(&y).matmul_adjoint(&self.t2).hermitian_part();
        let z1 = (&self.j.matmul(r1).matmul(&self.j) - &self.a.adjoint_matmul(&z2).matmul(&self.a)).hermitian_part();
        (z1, z2)
    }
}

struct BlockNewton<'a> {
    lmi: &'a BlockLmi<'a>,
    inv: BlockInverse,
    /// Coordinates of W_j² per cap, concatenated.
    w: Vec<f64>,
    gamma: f64,
    /// W' = 𝒲 − w wᵀ/γ.
    wp: DMatrix<f64>,
    /// I + W' G.
    core: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    offsets: Vec<usize>,
}

impl<'a> BlockNewton<'a> {
    fn new(lmi: &'a BlockLmi<'a>, w: &'a [ComplexMatrix], v0: &ComplexMatrix) -> Result<Self> {
        let (n1, n2) = (lmi.n1, lmi.n2);
        let caps = &lmi.prog.caps;
        let inv = BlockInverse::new(&w[0], v0, n1, n2)?;
        let mut offsets = vec![0];
        for c in caps {
            offsets.push(offsets.last().unwrap() + herm_dim(c.dim));
        }
        let dd = *offsets.last().unwrap();

        let mut wv = Vec::with_capacity(dd);
        let mut gamma = 0.0;
        let mut script_w = DMatrix::<f64>::zeros(dd, dd);
        for (j, cap) in caps.iter().enumerate() {
            let wj = &w[j + 1];
            let w2 = wj.matmul(wj);
            gamma += w2.trace().re;
            push_coords(&w2, &mut wv);
            for b in 0..herm_dim(cap.dim) {
                let img = to_coords(&wj.matmul(&basis_matrix(cap.dim, b)).matmul(wj));
                for (a, v) in img.into_iter().enumerate() {
                    script_w[(offsets[j] + a, offsets[j] + b)] = v;
                }
            }
        }
        let wvec = DVector::from_column_slice(&wv);
        let wp = &script_w - &wvec * wvec.transpose() / gamma;

        // G = E P⁻¹ Eᵀ via ⟨S1_a, J R1_b J⟩ + ⟨Q_a, Q_b ⊘ Γ⟩.
        let bmat = inv.t2.adjoint_matmul(&inv.a);
        let mut qs: Vec<ComplexMatrix> = Vec::with_capacity(dd);
        let mut hs: Vec<(usize, ComplexMatrix)> = Vec::with_capacity(dd);
        for (j, cap) in caps.iter().enumerate() {
            for b in 0..herm_dim(cap.dim) {
                let h = basis_matrix(cap.dim, b);
                let mut q = ComplexMatrix::zeros(n2, n2);
                for s in &cap.selectors {
                    let v = match cap.side {
                        Side::First => bmat.select(&(0..n2).collect::<Vec<_>>(), s),
                        Side::Second => inv.t2.adjoint().select(&(0..n2).collect::<Vec<_>>(), s),
                    };
                    let term = v.matmul(&h).matmul_adjoint(&v);
                    match cap.side {
                        Side::First => q -= &term,
                        Side::Second => q += &term,
                    }
                }
                qs.push(q);
                hs.push((j, h));
            }
        }
        let mut qg: Vec<ComplexMatrix> = qs.clone();
        for q in &mut qg {
            inv.divide(q);
        }
        // J S1_b J for side-one basis elements.
        let jsj: Vec<Option<(ComplexMatrix, ComplexMatrix)>> = hs
            .iter()
            .map(|(j, h)| {
                (caps[*j].side == Side::First).then(|| {
                    let mut s1 = ComplexMatrix::zeros(n1, n1);
                    caps[*j].add_adjoint(h, &mut s1);
                    let p = inv.j.matmul(&s1).matmul(&inv.j);
                    (s1, p)
                })
            })
            .collect();
        let mut g = DMatrix::<f64>::zeros(dd, dd);
        for a in 0..dd {
            for b in a..dd {
                let mut v = qs[a].real_inner(&qg[b]);
                if let (Some((sa, _)), Some((_, pb))) = (&jsj[a], &jsj[b]) {
                    v += sa.real_inner(pb);
                }
                g[(a, b)] = v;
                g[(b, a)] = v;
            }
        }
        let core = (DMatrix::<f64>::identity(dd, dd) + &wp * &g).lu();
        Ok(BlockNewton { lmi, inv, w: wv, gamma, wp, core, offsets })
    }

    fn e(&self, z1: &ComplexMatrix, z2: &ComplexMatrix) -> Vec<f64> {
        let mut v = Vec::with_capacity(*self.offsets.last().unwrap());
        for cap in &self.lmi.prog.caps {
            push_coords(&cap.apply(self.lmi.side(cap.side, z1, z2)), &mut v);
        }
        v
    }

    fn e_adjoint(&self, h: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
        let mut z1 = ComplexMatrix::zeros(self.lmi.n1, self.lmi.n1);
        let mut z2 = ComplexMatrix::zeros(self.lmi.n2, self.lmi.n2);
        for (j, cap) in self.lmi.prog.caps.iter().enumerate() {
            let hm = from_coords(&h[self.offsets[j]..self.offsets[j + 1]], cap.dim);
            match cap.side {
                Side::First => cap.add_adjoint(&hm, &mut z1),
                Side::Second => cap.add_adjoint(&hm, &mut z2),
            }
        }
        (z1, z2)
    }
}

impl NewtonSystem for BlockNewton<'_> {
    fn solve(&self, r: &[f64]) -> Result<Vec<f64>> {
        let (mut r1, mut r2, rt) = self.lmi.split(r);
        let scaled: Vec<f64> = self.w.iter().map(|v| v * rt / self.gamma).collect();
        let (e1, e2) = self.e_adjoint(&scaled);
        r1 += &e1;
        r2 += &e2;
        let (z1, z2) = self.inv.apply(&r1, &r2);
        let ez = DVector::from_vec(self.e(&z1, &z2));
        let q = self.core.solve(&(&self.wp * ez)).ok_or(Error::NoConvergence("singular cap system"))?;
        let (q1, q2) = self.e_adjoint(q.as_slice());
        let (c1, c2) = self.inv.apply(&q1, &q2);
        let u1 = &z1 - &c1;
        let u2 = &z2 - &c2;
        let eu = self.e(&u1, &u2);
        let dt = (rt + self.w.iter().zip(&eu).map(|(a, b)| a * b).sum::<f64>()) / self.gamma;
        Ok(self.lmi.join(&u1, &u2, dt))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, random_psd, rng};

    fn sample_program(seed: u64, n1: usize, n2: usize) -> BlockProgram {
        let mut r = rng(seed);
        let c = random_matrix(&mut r, n1, n2);
        let caps = vec![
            Cap { side: Side::First, dim: 2, selectors: vec![vec![0, 1], vec![2, 3]] },
            Cap { side: Side::Second, dim: 1, selectors: vec![vec![0]] },
            Cap { side: Side::Second, dim: 2, selectors: vec![vec![1, 2]] },
        ];
        BlockProgram::new(c, caps).unwrap()
    }

    #[test]
    fn newton_solve_inverts_the_normal_operator() {
        let prog = sample_program(60, 4, 3);
        let lmi = BlockLmi::new(&prog);
        let mut r = rng(61);
        let w: Vec<ComplexMatrix> =
            lmi.dims.iter().map(|&d| { let mut p = random_psd(&mut r, d, d); p.add_identity(0.1); p }).collect();
        let winv: Vec<ComplexMatrix> = w.iter().map(|x| crate::linalg::hpd_inverse(x).unwrap()).collect();
            let sys = lmi.newton_system(&w, &winv).unwrap();
        let nv = lmi.num_vars();
        for k in 0..nv {
            let mut e = vec![0.0; nv];
            e[k] = 1.0;
            let x = sys.solve(&e).unwrap();
            let lx = lmi.apply(&x);
            let wl: Blocks = lx.iter().zip(&w).map(|(l, wb)| wb.matmul(l).matmul(wb)).collect();
            let mx = lmi.apply_adjoint(&wl);
            for (i, v) in mx.iter().enumerate() {
                assert!((v - e[i]).abs() < 1e-8, "column {k} entry {i}: {v}");
            }
        }
    }

    #[test]
    fn adjoint_pairing() {
        let prog = sample_program(62, 4, 3);
        let lmi = BlockLmi::new(&prog);
        let mut r = rng(63);
        let y: Vec<f64> = (0..lmi.num_vars()).map(|_| crate::random::gaussian(&mut r)).collect();
        let x: Blocks = lmi.dims.iter().map(|&d| crate::random::random_hermitian(&mut r, d)).collect();
        let lhs: f64 = lmi.apply(&y).iter().zip(&x).map(|(a, b)| a.real_inner(b)).sum();
        let rhs: f64 = lmi.apply_adjoint(&x).iter().zip(&y).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn schur_norm_of_identity_symbol() {
        let n = 3;
        let caps = (0..n)
            .flat_map(|j| [Side::First, Side::Second].map(|side| Cap { side, dim: 1, selectors: vec![vec![j]] }))
            .collect();
        let prog = BlockProgram::new(ComplexMatrix::identity(n), caps).unwrap();
        let s = prog.solve(&SdpOptions::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.t - 1.0).abs() < 1e-7);
    }
}
