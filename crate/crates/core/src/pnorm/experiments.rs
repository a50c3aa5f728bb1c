use serde::{Deserialize, Serialize};

use super::estimate::{pq_norm_lower_with_starts, NormEstimate};
use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::group::{fourier_multiplier, triangular_symbol, GroupAlgebra};
use crate::linalg::{ComplexMatrix, Exponent, C64};
use crate::sdp::{schur_cb_norm, SdpOptions};
use crate::superop::SuperOperator;

/// Slack for the p = 2 comparison.
pub const MATSAEV_TOL: f64 = 1e-8;
/// The SDP value is a primal upper bound; at n = 1 the comparison is an equality.
pub const BOUND_SLACK: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatsaevReport {
    pub p: Exponent,
    pub truncation: usize,
    /// Lower bounds for ‖P(M_φ)‖ at amplification degrees 1 and 2.
    pub lhs: [f64; 2],
    /// max_s |P(φ(s))|.
    pub spectral: f64,
    /// sup_{|z|=1} |P(z)|.
    pub rhs_p2: f64,
    /// Lower bound for ‖P(S_N)‖ on ℓ^p_N, S_N the truncated shift.
    pub rhs_pn: f64,
    /// rhs_p2 − max(lhs).
    pub margin: f64,
    /// Only meaningful at p = 2.
    pub violated: bool,
}

/// Diagonal embedding of x ↦ A x on ℓ^p_N as a map on M_N.
pub fn diagonal_operator_map(a: &ComplexMatrix) -> Result<SuperOperator> {
    if !a.is_square() {
        return Err(Error::NotSquare(a.cols(), a.rows()));
    }
    let n = a.rows();
    let images: Vec<ComplexMatrix> = (0..n)
        .map(|k| ComplexMatrix::diag(&a.column(k)))
        .collect();
    SuperOperator::from_commutative(&images)
}

/// Nilpotent shift e_k ↦ e_{k+1} on C^N.
pub fn truncated_shift(n: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(n, n);
    for k in 0..n.saturating_sub(1) {
        s[(k + 1, k)] = C64::new(1.0, 0.0);
    }
    s
}

/// Compare P applied to the multiplier of φ with P on the unit circle and on the
/// truncated shift. The multiplier is P∘φ on span{λ_s}; the complement of that
/// span is left out, since it is not part of the group algebra.
pub fn matsaev_check(
    alg: &GroupAlgebra,
    phi: &[f64],
    poly: &Polynomial,
    p: Exponent,
    truncation: usize,
    restarts: usize,
    seed: u64,
) -> Result<MatsaevReport> {
    if phi.len() != alg.order() {
        return Err(Error::DimensionMismatch(format!("symbol of length {} on a group of order {}", phi.len(), alg.order())));
    }
    if truncation == 0 {
        return Err(Error::Invalid("truncation must be positive".into()));
    }
    let values: Vec<C64> = phi.iter().map(|&x| poly.eval(C64::new(x, 0.0))).collect();
    let spectral = values.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    let map = fourier_multiplier(alg, &values)?;
    let lhs1 = pq_norm_lower_with_starts(&map, p, 1, restarts, seed, alg.lambdas())?.value;
    let lhs2 = pq_norm_lower_with_starts(&map, p, 2, restarts, seed, alg.lambdas())?.value.max(lhs1);
    let rhs_p2 = poly.sup_on_circle();
    let shift = diagonal_operator_map(&poly.apply_matrix(&truncated_shift(truncation))?)?;
    let diag_starts: Vec<ComplexMatrix> = (0..truncation).map(|k| ComplexMatrix::unit(truncation, truncation, k, k)).collect();
    let rhs_pn = pq_norm_lower_with_starts(&shift, p, 1, restarts, seed, &diag_starts)?.value;
    let lhs_max = lhs1.max(lhs2);
    let violated = p == Exponent::Finite(2.0) && lhs_max > rhs_p2 + MATSAEV_TOL;
    Ok(MatsaevReport {
        p,
        truncation,
        lhs: [lhs1, lhs2],
        spectral,
        rhs_p2,
        rhs_pn,
        margin: rhs_p2 - lhs_max,
        violated,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationRow {
    pub n: usize,
    /// ‖M_A‖ on B(ℓ²_n) for the upper-triangular 0/1 symbol.
    pub value: f64,
    /// n^{1/2}·max|a_ij| = n^{1/2}.
    pub bound: f64,
    pub within_bound: bool,
    /// Strictly above the previous row (true for the first row).
    pub increasing: bool,
    pub iterations: usize,
}

pub fn truncation_growth(ns: &[usize], opts: &SdpOptions) -> Result<Vec<TruncationRow>> {
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("sizes must be strictly ascending".into()));
    }
    let mut rows: Vec<TruncationRow> = Vec::with_capacity(ns.len());
    for &n in ns {
        if n == 0 || n > 128 {
            return Err(Error::Invalid(format!("size {n} out of range")));
        }
        let s = schur_cb_norm(&triangular_symbol(n), opts)?;
        let bound = (n as f64).sqrt();
        let increasing = rows.last().map_or(true, |r| s.value > r.value);
        rows.push(TruncationRow { n, value: s.value, bound, within_bound: s.value <= bound + BOUND_SLACK, increasing, iterations: s.iterations });
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitCriterion {
    /// Column index pushed out first, then the row index.
    pub s: C64,
    /// Row index pushed out first, then the column index.
    pub t: C64,
    pub gap: f64,
}

/// Finite-section reading of the iterated limits lim_i lim_j a_ij and
/// lim_j lim_i a_ij on the given index tails.
///
/// For s the inner index sits at the end of the column tail and the outer index
/// runs over row-tail entries below it, taking the last; t swaps the roles.
pub fn schur_limit_criterion(a: &ComplexMatrix, row_tail: &[usize], col_tail: &[usize]) -> Result<LimitCriterion> {
    if row_tail.len() < 3 || col_tail.len() < 3 {
        return Err(Error::DimensionMismatch("index tails need at least three entries".into()));
    }
    if row_tail.iter().any(|&i| i >= a.rows()) || col_tail.iter().any(|&j| j >= a.cols()) {
        return Err(Error::DimensionMismatch(format!("tail index outside a {}x{} matrix", a.rows(), a.cols())));
    }
    let mut rows = row_tail.to_vec();
    let mut cols = col_tail.to_vec();
    rows.sort_unstable();
    rows.dedup();
    cols.sort_unstable();
    cols.dedup();
    let (rmax, cmax) = (*rows.last().expect("nonempty"), *cols.last().expect("nonempty"));
    let i_star = rows.iter().rev().copied().find(|&i| i < cmax).unwrap_or(rows[0]);
    let j_star = cols.iter().rev().copied().find(|&j| j < rmax).unwrap_or(cols[0]);
    let s = a[(i_star, cmax)];
    let t = a[(rmax, j_star)];
    Ok(LimitCriterion { s, t, gap: (s - t).norm() })
}

/// Degree-d estimate of a multiplier map, seeded with the λ-basis.
pub fn multiplier_estimate(
    alg: &GroupAlgebra,
    phi: &[C64],
    p: Exponent,
    d: usize,
    restarts: usize,
    seed: u64,
) -> Result<NormEstimate> {
    let map = fourier_multiplier(alg, phi)?;
    pq_norm_lower_with_starts(&map, p, d, restarts, seed, alg.lambdas())
}
