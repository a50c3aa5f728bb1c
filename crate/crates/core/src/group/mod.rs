//! Finite groups, normalized unimodular 2-cocycles and twisted group algebras.

mod algebra;
mod io;

pub use algebra::{
    fourier_multiplier, kernel_positive_type_gram, project_fourier, project_schur, schur_multiplier,
    triangular_symbol, GroupAlgebra,
};
pub use io::{GroupFile, MultiplierSymbol};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{C64, ONE};

const COCYCLE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroup {
    order: usize,
    cayley: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validate a multiplication table cayley[s][t] = st.
    pub fn from_cayley(cayley: Vec<Vec<usize>>) -> Result<Self> {
        let n = cayley.len();
        if n == 0 || n > 64 {
            return Err(Error::InvalidGroup(format!("order {n} outside 1..=64")));
        }
        for row in &cayley {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return Err(Error::InvalidGroup("table is not n x n over 0..n".into()));
            }
            let mut seen = vec![false; n];
            for &x in row {
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidGroup("not a Latin square (row)".into()));
                }
            }
        }
        for c in 0..n {
            let mut seen = vec![false; n];
            for row in &cayley {
                if std::mem::replace(&mut seen[row[c]], true) {
                    return Err(Error::InvalidGroup("not a Latin square (column)".into()));
                }
            }
        }
        for s in 0..n {
            for t in 0..n {
                for r in 0..n {
                    if cayley[cayley[s][t]][r] != cayley[s][cayley[t][r]] {
                        return Err(Error::InvalidGroup(format!("associativity fails at ({s},{t},{r})")));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|s| cayley[e][s] == s && cayley[s][e] == s))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let inverse = (0..n)
            .map(|s| (0..n).find(|&t| cayley[s][t] == identity).expect("Latin square row contains e"))
            .collect();
        Ok(FiniteGroup { order: n, cayley, identity, inverse })
    }

    pub fn cyclic(n: usize) -> Self {
        Self::from_cayley((0..n).map(|s| (0..n).map(|t| (s + t) % n).collect()).collect()).expect("Z_n")
    }

    /// Direct product; element (g, h) has index g·|H| + h.
    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> Result<Self> {
        let (a, b) = (g.order, h.order);
        let table = (0..a * b)
            .map(|s| (0..a * b).map(|t| g.mul(s / b, t / b) * b + h.mul(s % b, t % b)).collect())
            .collect();
        Self::from_cayley(table)
    }

    /// Klein four-group Z_2 × Z_2.
    pub fn klein() -> Self {
        Self::product(&Self::cyclic(2), &Self::cyclic(2)).expect("Z2xZ2")
    }

    /// Symmetric group on three letters; permutations in lexicographic order,
    /// (st)(x) = s(t(x)).
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> =
            vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let idx = |p: [usize; 3]| perms.iter().position(|&q| q == p).expect("permutation");
        let table = perms
            .iter()
            .map(|s| perms.iter().map(|t| idx([s[t[0]], s[t[1]], s[t[2]]])).collect())
            .collect();
        Self::from_cayley(table).expect("S_3")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, s: usize, t: usize) -> usize {
        self.cayley[s][t]
    }

    pub fn inv(&self, s: usize) -> usize {
        self.inverse[s]
    }

    pub fn cayley(&self) -> &[Vec<usize>] {
        &self.cayley
    }

    /// Closed under products (nonempty finite sets are then subgroups).
    pub fn check_subgroup(&self, h: &[usize]) -> Result<()> {
        if h.is_empty() || h.iter().any(|&s| s >= self.order) {
            return Err(Error::NotASubgroup(format!("{h:?}")));
        }
        let mut mem = vec![false; self.order];
        for &s in h {
            mem[s] = true;
        }
        for &s in h {
            for &t in h {
                if !mem[self.mul(s, t)] {
                    return Err(Error::NotASubgroup(format!("{h:?}: {s}*{t} missing")));
                }
            }
        }
        Ok(())
    }
}

/// Normalized unimodular 2-cocycle σ(s,t)σ(st,r) = σ(t,r)σ(s,tr).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoCocycle {
    sigma: Vec<Vec<C64>>,
}

impl TwoCocycle {
    pub fn trivial(n: usize) -> Self {
        TwoCocycle { sigma: vec![vec![ONE; n]; n] }
    }

    pub fn new(group: &FiniteGroup, sigma: Vec<Vec<C64>>) -> Result<Self> {
        let n = group.order();
        if sigma.len() != n || sigma.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidCocycle(format!("table is not {n}x{n}")));
        }
        if let Some(z) = sigma.iter().flatten().find(|z| (z.norm() - 1.0).abs() > COCYCLE_TOL) {
            return Err(Error::InvalidCocycle(format!("entry {z} is not unimodular")));
        }
        let e = group.identity();
        for s in 0..n {
            if (sigma[s][e] - ONE).norm() > COCYCLE_TOL || (sigma[e][s] - ONE).norm() > COCYCLE_TOL {
                return Err(Error::InvalidCocycle("not normalized at the identity".into()));
            }
        }
        for s in 0..n {
            for t in 0..n {
                for r in 0..n {
                    let lhs = sigma[s][t] * sigma[group.mul(s, t)][r];
                    let rhs = sigma[t][r] * sigma[s][group.mul(t, r)];
                    if (lhs - rhs).norm() > COCYCLE_TOL {
                        return Err(Error::InvalidCocycle(format!("cocycle identity fails at ({s},{t},{r})")));
                    }
                }
            }
        }
        Ok(TwoCocycle { sigma })
    }

    /// σ((a,b),(a',b')) = (−1)^{b·a'} on Z_2 × Z_2, indexing (a,b) as 2a + b.
    pub fn klein_bicharacter(group: &FiniteGroup) -> Result<Self> {
        let table = (0..4)
            .map(|s| (0..4).map(|t| if (s % 2) * (t / 2) == 1 { -ONE } else { ONE }).collect())
            .collect();
        Self::new(group, table)
    }

    /// Coboundary σ(s,t) = f(s) f(t) / f(st) of a unimodular f with f(e) = 1.
    pub fn coboundary(group: &FiniteGroup, f: &[C64]) -> Result<Self> {
        if f.len() != group.order() {
            return Err(Error::DimensionMismatch("coboundary potential length".into()));
        }
        let fe = f[group.identity()];
        let f: Vec<C64> = f.iter().map(|z| z / fe).collect();
        let n = group.order();
        let table = (0..n).map(|s| (0..n).map(|t| f[s] * f[t] / f[group.mul(s, t)]).collect()).collect();
        Self::new(group, table)
    }

    pub fn get(&self, s: usize, t: usize) -> C64 {
        self.sigma[s][t]
    }

    pub fn table(&self) -> &[Vec<C64>] {
        &self.sigma
    }

    pub fn is_trivial(&self) -> bool {
        self.sigma.iter().flatten().all(|z| (z - ONE).norm() <= COCYCLE_TOL)
    }
}

#[cfg(test)]
mod tests;
