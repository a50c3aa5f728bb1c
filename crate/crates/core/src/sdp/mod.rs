//! Semidefinite programs over Hermitian blocks and the norm programs built on them.

mod block;
pub mod coords;
mod dense;
pub mod ipm;
mod norms;

use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;

pub use block::{BlockProgram, BlockSolution, Cap};
pub use dense::{BlockId, Entry, Equality, SdpProblem, Spec, Term, VarId};
pub use norms::{
    cb_norm_inf, dec_norm_from_commutative, dec_norm_inf, dec_norm_one, dec_norm_selfadjoint, property_p_witness, schur_cb_norm,
    CbNorm, DecNorm, PropertyPWitness, SchurNorm,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    MaxIter,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpOptions {
    /// Absolute duality-gap target.
    pub tol_abs: f64,
    /// Relative duality-gap target.
    pub tol_rel: f64,
    pub max_iter: usize,
    /// Relative primal and dual residual target.
    pub feas_tol: f64,
    #[serde(default)]
    pub verbose: bool,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions { tol_abs: 1e-8, tol_rel: 1e-7, max_iter: 500, feas_tol: 1e-9, verbose: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub name: String,
    pub value: ComplexMatrix,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub iterations: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub violation: f64,
    /// Variable blocks, in declaration order.
    pub variables: Vec<NamedMatrix>,
    /// Dual multipliers of the PSD blocks.
    pub multipliers: Vec<NamedMatrix>,
}

impl SdpSolution {
    pub fn variable(&self, name: &str) -> Option<&ComplexMatrix> {
        self.variables.iter().find(|v| v.name == name).map(|v| &v.value)
    }

    pub fn multiplier(&self, name: &str) -> Option<&ComplexMatrix> {
        self.multipliers.iter().find(|v| v.name == name).map(|v| &v.value)
    }

    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.variable(name).map(|m| m[(0, 0)].re)
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }
}
