use serde::Serialize;

use super::{psd_certificate, CpCertificate, SuperOperator};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

/// [[a, b], [c, d]] ↦ [[v1(a), t(b)], [t°(c), v2(d)]].
#[derive(Clone, Debug, Serialize)]
pub struct BlockMap {
    pub v1: SuperOperator,
    pub t: SuperOperator,
    pub v2: SuperOperator,
    pub assembled: SuperOperator,
}

impl BlockMap {
    pub fn new(v1: &SuperOperator, t: &SuperOperator, v2: &SuperOperator) -> Result<Self> {
        let dims = (t.in_dim(), t.out_dim());
        if (v1.in_dim(), v1.out_dim()) != dims || (v2.in_dim(), v2.out_dim()) != dims {
            return Err(Error::DimensionMismatch("block map components differ in shape".into()));
        }
        let (n, m) = dims;
        let top = t.opposite();
        let parts = [[v1, t], [&top, v2]];
        let mut images = Vec::with_capacity(4 * n * n);
        for a in 0..2 {
            for i in 0..n {
                for c in 0..2 {
                    for j in 0..n {
                        let mut img = ComplexMatrix::zeros(2 * m, 2 * m);
                        img.set_block(a * m, c * m, &parts[a][c].image(i, j));
                        images.push(img);
                    }
                }
            }
        }
        let assembled = SuperOperator::from_action(2 * n, 2 * m, &images)?;
        Ok(BlockMap { v1: v1.clone(), t: t.clone(), v2: v2.clone(), assembled })
    }

    /// The nonzero part of the assembled Choi matrix, [[C(v1), C(t)], [C(t)*, C(v2)]].
    pub fn reduced_choi(&self) -> ComplexMatrix {
        let c = self.t.choi();
        ComplexMatrix::block2x2(self.v1.choi(), c, &c.adjoint(), self.v2.choi()).expect("matching blocks")
    }

    pub fn cp_certificate(&self, tol: f64) -> CpCertificate {
        psd_certificate(&self.reduced_choi(), tol)
    }
}

/// Map between commutative algebras with coordinate matrix B (m x n): e_j ↦ Σ_i B_ij e_i.
pub(crate) fn commutative_map(b: &ComplexMatrix) -> SuperOperator {
    let images: Vec<ComplexMatrix> = (0..b.cols()).map(|j| ComplexMatrix::diag(&b.column(j))).collect();
    SuperOperator::from_commutative(&images).expect("nonempty")
}

/// Choi test of [[|B|, B], [B°, |B|]] for the commutative map with matrix B.
pub fn modulus_block_check(b: &ComplexMatrix, tol: f64) -> CpCertificate {
    let t = commutative_map(b);
    let abs = commutative_map(&b.map(|z| C64::new(z.norm(), 0.0)));
    BlockMap::new(&abs, &t, &abs).expect("same shape").cp_certificate(tol)
}
