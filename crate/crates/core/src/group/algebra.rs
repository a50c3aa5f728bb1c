use super::{FiniteGroup, TwoCocycle};
use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, C64, ONE, ZERO};
use crate::superop::SuperOperator;

const RELATION_TOL: f64 = 1e-12;

/// Twisted left regular representation λ_s ε_t = σ(s,t) ε_st on ℓ²(G).
#[derive(Clone, Debug)]
pub struct GroupAlgebra {
    group: FiniteGroup,
    cocycle: TwoCocycle,
    lambdas: Vec<ComplexMatrix>,
}

impl GroupAlgebra {
    pub fn new(group: FiniteGroup, cocycle: TwoCocycle) -> Result<Self> {
        let n = group.order();
        let cocycle = TwoCocycle::new(&group, cocycle.table().to_vec())?;
        let lambdas = (0..n)
            .map(|s| {
                let mut l = ComplexMatrix::zeros(n, n);
                for t in 0..n {
                    l[(group.mul(s, t), t)] = cocycle.get(s, t);
                }
                l
            })
            .collect();
        let alg = GroupAlgebra { group, cocycle, lambdas };
        alg.check_relations()?;
        Ok(alg)
    }

    pub fn untwisted(group: FiniteGroup) -> Self {
        let n = group.order();
        Self::new(group, TwoCocycle::trivial(n)).expect("trivial cocycle")
    }

    fn check_relations(&self) -> Result<()> {
        let g = &self.group;
        let n = g.order();
        for s in 0..n {
            let ls = &self.lambdas[s];
            let adj = self.lambdas[g.inv(s)].scale(self.cocycle.get(s, g.inv(s)).conj());
            if !ls.adjoint().approx_eq(&adj, RELATION_TOL) {
                return Err(Error::InvalidCocycle(format!("adjoint relation fails at {s}")));
            }
            for t in 0..n {
                let prod = ls.matmul(&self.lambdas[t]);
                let want = self.lambdas[g.mul(s, t)].scale(self.cocycle.get(s, t));
                if !prod.approx_eq(&want, RELATION_TOL) {
                    return Err(Error::InvalidCocycle(format!("product relation fails at ({s},{t})")));
                }
            }
            let tau = self.tau(ls);
            let want = if s == g.identity() { ONE } else { ZERO };
            if (tau - want).norm() > RELATION_TOL {
                return Err(Error::InvalidCocycle(format!("trace relation fails at {s}")));
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn cocycle(&self) -> &TwoCocycle {
        &self.cocycle
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn lambda(&self, s: usize) -> &ComplexMatrix {
        &self.lambdas[s]
    }

    pub fn lambdas(&self) -> &[ComplexMatrix] {
        &self.lambdas
    }

    /// τ(x) = ⟨ε_e, x ε_e⟩.
    pub fn tau(&self, x: &ComplexMatrix) -> C64 {
        let e = self.group.identity();
        x[(e, e)]
    }

    /// Normalized matrix trace on M_|G|; agrees with τ on span{λ_s}.
    pub fn normalized_trace(&self, x: &ComplexMatrix) -> C64 {
        x.trace() / self.order() as f64
    }

    /// Σ_s c_s λ_s.
    pub fn element(&self, coeffs: &[C64]) -> ComplexMatrix {
        let n = self.order();
        let mut x = ComplexMatrix::zeros(n, n);
        for (c, l) in coeffs.iter().zip(&self.lambdas) {
            x.axpy(*c, l);
        }
        x
    }

    /// Twisted convolution coefficients of x ∈ span{λ_s}: c_s = tr_n(λ_s* x).
    pub fn coefficients(&self, x: &ComplexMatrix) -> Vec<C64> {
        self.lambdas.iter().map(|l| l.adjoint().trace_product(x) / self.order() as f64).collect()
    }
}

/// Extension x ↦ Σ_s φ(s) tr_n(λ_s* x) λ_s of the Fourier multiplier to M_|G|.
///
/// Choi matrix: (1/|G|) Σ_s φ(s) conj(λ_s) ⊗ λ_s.
pub fn fourier_multiplier(alg: &GroupAlgebra, phi: &[C64]) -> Result<SuperOperator> {
    let n = alg.order();
    if phi.len() != n {
        return Err(Error::DimensionMismatch(format!("symbol of length {} on a group of order {n}", phi.len())));
    }
    let mut choi = ComplexMatrix::zeros(n * n, n * n);
    for (s, &p) in phi.iter().enumerate() {
        if p == ZERO {
            continue;
        }
        let l = alg.lambda(s);
        choi.axpy(p / n as f64, &kron(&l.conj(), l));
    }
    SuperOperator::from_choi(n, n, choi)
}

/// Schur multiplier [a_ij] ↦ [A_ij a_ij].
pub fn schur_multiplier(a: &ComplexMatrix) -> Result<SuperOperator> {
    if !a.is_square() {
        return Err(Error::NotSquare(a.cols(), a.rows()));
    }
    let n = a.rows();
    let mut choi = ComplexMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            choi[(i * n + i, j * n + j)] = a[(i, j)];
        }
    }
    SuperOperator::from_choi(n, n, choi)
}

/// Upper-triangular 0/1 symbol (A_ij = 1 for i ≤ j).
pub fn triangular_symbol(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| if i <= j { ONE } else { ZERO })
}

/// φ_ij = tr(T(e_ij) e_ij*) = T(e_ij)[i, j].
pub fn project_schur(t: &SuperOperator) -> Result<ComplexMatrix> {
    if !t.is_square() {
        return Err(Error::NotSquare(t.in_dim(), t.out_dim()));
    }
    let n = t.in_dim();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| t.choi()[(i * n + i, j * n + j)]))
}

/// φ(s) = tr_n(T(λ_s) λ_s*) on the subgroup H, zero elsewhere.
pub fn project_fourier(alg: &GroupAlgebra, t: &SuperOperator, h: &[usize]) -> Result<Vec<C64>> {
    let n = alg.order();
    if t.in_dim() != n || t.out_dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "map M_{} -> M_{} on a group of order {n}",
            t.in_dim(),
            t.out_dim()
        )));
    }
    alg.group().check_subgroup(h)?;
    let mut phi = vec![ZERO; n];
    for &s in h {
        let l = alg.lambda(s);
        phi[s] = t.apply(l)?.matmul_adjoint(l).trace() / n as f64;
    }
    Ok(phi)
}

/// Gram matrix (k, l) ↦ φ_{i_k i_l}(s_k⁻¹ s_l) for the family symbols[i][j].
pub fn kernel_positive_type_gram(
    alg: &GroupAlgebra,
    symbols: &[Vec<Vec<C64>>],
    points: &[(usize, usize)],
) -> Result<ComplexMatrix> {
    let n = alg.order();
    let idx = symbols.len();
    for row in symbols {
        if row.len() != idx || row.iter().any(|phi| phi.len() != n) {
            return Err(Error::DimensionMismatch("symbol family is not I x I over G".into()));
        }
    }
    if points.iter().any(|&(i, s)| i >= idx || s >= n) {
        return Err(Error::DimensionMismatch("point outside I x G".into()));
    }
    let g = alg.group();
    Ok(ComplexMatrix::from_fn(points.len(), points.len(), |k, l| {
        let (ik, sk) = points[k];
        let (il, sl) = points[l];
        symbols[ik][il][g.mul(g.inv(sk), sl)]
    }))
}
