//! Lower bounds for amplified Schatten p→p norms, polynomial comparisons with the
//! shift, and truncation experiments for Schur multipliers.

mod estimate;
mod experiments;
mod poly;
#[cfg(test)]
mod tests;

pub use estimate::{pq_norm_ladder, pq_norm_lower, pq_norm_lower_with_starts, NormEstimate};
pub use experiments::{
    diagonal_operator_map, matsaev_check, multiplier_estimate, schur_limit_criterion, truncated_shift,
    truncation_growth, LimitCriterion, MatsaevReport, TruncationRow, BOUND_SLACK, MATSAEV_TOL,
};
pub use poly::{Polynomial, MAX_DEGREE};
