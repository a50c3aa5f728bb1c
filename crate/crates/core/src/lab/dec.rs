use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Check, ExperimentReport, LabConfig, Outcome};
use crate::error::{Error, Result};
use crate::group::{fourier_multiplier, schur_multiplier, GroupAlgebra, MultiplierSymbol};
use crate::linalg::Exponent;
use crate::pnorm::pq_norm_lower_with_starts;
use crate::sdp::{cb_norm_inf, dec_norm_inf, schur_cb_norm};
use crate::superop::{BlockMap, SuperOperator};

/// Input of the dec-norm command.
#[derive(Clone, Debug)]
pub enum MapInput {
    Map(SuperOperator),
    Schur(crate::linalg::ComplexMatrix),
    Fourier { algebra: GroupAlgebra, symbol: Vec<crate::linalg::C64> },
}

impl MapInput {
    /// A map file holds either a map (`in_dim`, `out_dim`, `choi`) or a multiplier
    /// symbol (`kind`, `values`); Fourier symbols need the group.
    pub fn from_json(map: &serde_json::Value, group: Option<GroupAlgebra>) -> Result<Self> {
        if map.get("kind").is_some() {
            match serde_json::from_value::<MultiplierSymbol>(map.clone())? {
                MultiplierSymbol::Schur(a) => Ok(MapInput::Schur(a)),
                MultiplierSymbol::Fourier(symbol) => {
                    let algebra = group.ok_or_else(|| Error::Invalid("a Fourier symbol needs a group file".into()))?;
                    if symbol.len() != algebra.order() {
                        return Err(Error::DimensionMismatch(format!(
                            "symbol of length {} on a group of order {}",
                            symbol.len(),
                            algebra.order()
                        )));
                    }
                    Ok(MapInput::Fourier { algebra, symbol })
                }
            }
        } else {
            Ok(MapInput::Map(serde_json::from_value(map.clone())?))
        }
    }

    pub fn map(&self) -> Result<SuperOperator> {
        match self {
            MapInput::Map(t) => Ok(t.clone()),
            MapInput::Schur(a) => schur_multiplier(a),
            MapInput::Fourier { algebra, symbol } => fourier_multiplier(algebra, symbol),
        }
    }

    pub fn is_multiplier(&self) -> bool {
        !matches!(self, MapInput::Map(_))
    }
}

/// v1, v2 attaining the decomposable norm.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecWitness {
    pub value: f64,
    pub v1: SuperOperator,
    pub v2: SuperOperator,
}

/// dec and cb norms of one map, with consistency checks.
///
/// General maps are only handled at p = ∞. For multipliers the value at any p is
/// the ∞-level one, and a lower estimate at p is checked against it.
pub fn dec_norm_experiment(
    input: &MapInput,
    p: Exponent,
    cfg: &LabConfig,
    inputs: &serde_json::Value,
) -> Result<(ExperimentReport, DecWitness)> {
    cfg.validate()?;
    if !p.is_infinite() && !input.is_multiplier() {
        return Err(Error::Invalid("general maps are only supported at p = inf".into()));
    }
    let started = Instant::now();
    let t = input.map()?;
    let dec = dec_norm_inf(&t, &cfg.sdp)?;
    let cb = cb_norm_inf(&t, &cfg.sdp)?;
    let mut out = Outcome::default();
    out.scalar("dec", dec.value);
    out.scalar("dec_gap", dec.gap);
    out.scalar("cb", cb.value);
    out.scalar("cb_upper", cb.upper);

    let mut below = Check::new("cb below dec", "‖T‖_cb ≤ ‖T‖_dec for every decomposable map", cfg.tol(1e-9));
    below.record(cb.value - dec.value, || json!({ "cb": cb.value, "dec": dec.value }));
    out.assertions.push(below.finish(format!("cb = {:.9}, dec = {:.9}", cb.value, dec.value)));

    let mut block = Check::new("witness block", "[[v1, T], [T°, v2]] is completely positive for the returned v1, v2", cfg.tol(1e-7) * (1.0 + dec.value));
    let lmin = BlockMap::new(&dec.v1, &t, &dec.v2)?.cp_certificate(block.tolerance()).lambda_min;
    block.record(-lmin, || json!({ "lambda_min": lmin }));
    out.assertions.push(block.finish(format!("block Choi λ_min = {lmin:.3e}")));

    if let MapInput::Schur(a) = input {
        let s = schur_cb_norm(a, &cfg.sdp)?.value;
        out.scalar("schur", s);
        let mut id = Check::new("schur dec identity", "the decomposable norm of a Schur multiplier on M_n equals its cb norm", cfg.tol(1e-5));
        id.record((s - dec.value).abs(), || json!({ "schur": s, "dec": dec.value }));
        out.assertions.push(id.finish(format!("factorization program {s:.9}")));
    }
    if input.is_multiplier() && !p.is_infinite() {
        let starts = match input {
            MapInput::Fourier { algebra, .. } => algebra.lambdas().to_vec(),
            _ => Vec::new(),
        };
        let est = pq_norm_lower_with_starts(&t, p, 2, cfg.restarts, cfg.seed, &starts)?;
        out.scalar("dec_at_p", dec.value);
        out.scalar("estimate_at_p", est.value);
        let mut check = Check::new(
            "estimate below dec",
            "for multipliers, amplified Schatten p norms are bounded by the decomposable norm at p = ∞",
            cfg.tol(1e-6),
        );
        check.record(est.value - dec.value, || json!({ "estimate": est.value, "dec": dec.value, "witness": est.witness }));
        out.assertions.push(check.finish(format!("p = {p}, d ≤ 2 lower estimate {:.9}", est.value)));
    }
    let inputs = json!({ "map": inputs, "p": p.to_string() });
    let report = ExperimentReport::new("dec-norm", cfg, &inputs, out, started);
    Ok((report, DecWitness { value: dec.value, v1: dec.v1, v2: dec.v2 }))
}
