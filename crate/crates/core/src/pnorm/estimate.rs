use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{schatten_norm, svd, ComplexMatrix, Exponent};
use crate::random::{complex_gaussian, index, random_matrix, random_unit_vector, rng_stream};
use crate::superop::SuperOperator;

const MAX_STEPS: usize = 300;
const STEP_TOL: f64 = 1e-12;

/// Lower bound for ‖Id_{M_d} ⊗ T : S^p → S^p‖, certified by `witness`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub p: Exponent,
    pub d: usize,
    /// Input of size d·n achieving `value`.
    pub witness: ComplexMatrix,
    pub restarts: usize,
    pub seed: u64,
    /// Restarts whose ascent met the step tolerance before the step cap.
    pub converged_restarts: usize,
}

impl NormEstimate {
    /// Recompute ‖(Id ⊗ T)(W)‖_p / ‖W‖_p for the stored witness.
    pub fn ratio(&self, t: &SuperOperator) -> Result<f64> {
        Amplified::new(t, self.d).ratio(&self.witness, self.p)
    }
}

/// Id_{M_d} ⊗ T applied blockwise, without forming the amplified Choi matrix.
struct Amplified<'a> {
    t: &'a SuperOperator,
    adj: SuperOperator,
    d: usize,
}

impl<'a> Amplified<'a> {
    fn new(t: &'a SuperOperator, d: usize) -> Self {
        Amplified { t, adj: t.hs_adjoint(), d }
    }

    fn blockwise(map: &SuperOperator, d: usize, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (n, m) = (map.in_dim(), map.out_dim());
        if x.shape() != (d * n, d * n) {
            return Err(Error::DimensionMismatch(format!("witness {:?} for degree {d} on M_{n}", x.shape())));
        }
        let mut y = ComplexMatrix::zeros(d * m, d * m);
        for a in 0..d {
            for b in 0..d {
                y.set_block(a * m, b * m, &map.apply(&x.submatrix(a * n, b * n, n, n))?);
            }
        }
        Ok(y)
    }

    fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        Self::blockwise(self.t, self.d, x)
    }

    fn apply_adjoint(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        Self::blockwise(&self.adj, self.d, y)
    }

    fn ratio(&self, x: &ComplexMatrix, p: Exponent) -> Result<f64> {
        let den = schatten_norm(x, p)?;
        if den == 0.0 {
            return Ok(0.0);
        }
        Ok(schatten_norm(&self.apply(x)?, p)? / den)
    }
}

/// A norming element for Y in the dual class: ⟨J, Y⟩ = ‖Y‖_p with ‖J‖_{p*} = 1,
/// up to a positive scale. At p = 1 this is the polar phase, at p = ∞ the top
/// singular pair.
fn duality_map(y: &ComplexMatrix, p: Exponent) -> Result<ComplexMatrix> {
    let f = svd(y)?;
    let top = f.s.first().copied().unwrap_or(0.0);
    let mut u = f.u.clone();
    let weights: Vec<f64> = match p {
        Exponent::Infinity => f.s.iter().enumerate().map(|(i, _)| if i == 0 { 1.0 } else { 0.0 }).collect(),
        Exponent::Finite(q) if q == 1.0 => f.s.iter().map(|&s| if s > 1e-12 * top { 1.0 } else { 0.0 }).collect(),
        Exponent::Finite(q) => f.s.iter().map(|&s| if top > 0.0 { (s / top).powf(q - 1.0) } else { 0.0 }).collect(),
    };
    for i in 0..u.rows() {
        for (j, w) in weights.iter().enumerate() {
            u[(i, j)] *= *w;
        }
    }
    Ok(u.matmul_adjoint(&f.v))
}

fn normalize(x: &ComplexMatrix, p: Exponent) -> Result<Option<ComplexMatrix>> {
    let s = schatten_norm(x, p)?;
    if !(s > 0.0 && s.is_finite()) {
        return Ok(None);
    }
    Ok(Some(x.scale_real(1.0 / s)))
}

/// Starting point `k` of the restart schedule on M_dim. Restart 0 is the
/// identity; afterwards matrix units, Ginibre matrices and rank-one matrices rotate.
fn start(seed: u64, k: usize, dim: usize) -> ComplexMatrix {
    if k == 0 {
        return ComplexMatrix::identity(dim);
    }
    let mut r = rng_stream(seed, k as u64);
    match k % 3 {
        1 => {
            let (i, j) = (index(&mut r, dim), index(&mut r, dim));
            let mut e = ComplexMatrix::unit(dim, dim, i, j);
            // A tiny perturbation lets the ascent leave the unit's face.
            for z in e.as_mut_slice() {
                *z += complex_gaussian(&mut r) * 1e-3;
            }
            e
        }
        2 => random_matrix(&mut r, dim, dim),
        _ => {
            let u = ComplexMatrix::new(dim, 1, random_unit_vector(&mut r, dim)).expect("shape");
            let v = ComplexMatrix::new(dim, 1, random_unit_vector(&mut r, dim)).expect("shape");
            u.matmul_adjoint(&v)
        }
    }
}

struct Ascent {
    value: f64,
    witness: ComplexMatrix,
    converged: bool,
}

/// Fixed-point ascent X ← J_{p*}(A†(J_p(A X))), keeping the best exact ratio seen.
fn ascend(a: &Amplified<'_>, x0: &ComplexMatrix, p: Exponent) -> Result<Ascent> {
    let q = p.conjugate();
    let Some(mut x) = normalize(x0, p)? else {
        let dim = x0.rows();
        return Ok(Ascent { value: 0.0, witness: ComplexMatrix::identity(dim), converged: true });
    };
    let mut best = a.ratio(&x, p)?;
    let mut best_x = x.clone();
    let mut last = best;
    for _ in 0..MAX_STEPS {
        let y = a.apply(&x)?;
        let g = a.apply_adjoint(&duality_map(&y, p)?)?;
        let Some(next) = normalize(&duality_map(&g, q)?, p)? else {
            return Ok(Ascent { value: best, witness: best_x, converged: true });
        };
        x = next;
        let r = a.ratio(&x, p)?;
        if r > best {
            best = r;
            best_x = x.clone();
        }
        if (r - last).abs() <= STEP_TOL * (1.0 + r) {
            return Ok(Ascent { value: best, witness: best_x, converged: true });
        }
        last = r;
    }
    Ok(Ascent { value: best, witness: best_x, converged: false })
}

/// Exact S²→S² norm: the top singular value of the Liouville matrix.
fn exact_p2(t: &SuperOperator) -> Result<(f64, ComplexMatrix)> {
    let n = t.in_dim();
    let f = svd(&t.liouville())?;
    let v = f.v.column(0);
    let w = ComplexMatrix::from_fn(n, n, |i, j| v[i * n + j]);
    Ok((f.s[0], w))
}

/// Place an n·k × n·k matrix in the top-left corner of M_dim.
fn embed(x: &ComplexMatrix, dim: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim, dim);
    out.set_block(0, 0, x);
    out
}

/// Randomized lower bound for ‖Id_{M_d} ⊗ T‖ on S^p of a square or rectangular map.
///
/// Deterministic given `seed`. The best witness at degree d − 1 seeds degree d, so
/// the value is nondecreasing in d.
pub fn pq_norm_lower(t: &SuperOperator, p: Exponent, d: usize, restarts: usize, seed: u64) -> Result<NormEstimate> {
    pq_norm_lower_with_starts(t, p, d, restarts, seed, &[])
}

/// Same as [`pq_norm_lower`] with extra starting inputs (of size k·n, k ≤ d) tried
/// before the random schedule.
pub fn pq_norm_lower_with_starts(
    t: &SuperOperator,
    p: Exponent,
    d: usize,
    restarts: usize,
    seed: u64,
    extra: &[ComplexMatrix],
) -> Result<NormEstimate> {
    Ok(pq_norm_ladder(t, p, d, restarts, seed, extra)?.pop().expect("d ≥ 1"))
}

/// Estimates for every degree 1..=d_max, each seeded by the previous one.
pub fn pq_norm_ladder(
    t: &SuperOperator,
    p: Exponent,
    d_max: usize,
    restarts: usize,
    seed: u64,
    extra: &[ComplexMatrix],
) -> Result<Vec<NormEstimate>> {
    if d_max == 0 {
        return Err(Error::Invalid("amplification degree must be positive".into()));
    }
    let n = t.in_dim();
    if let Some(bad) = extra.iter().find(|x| !x.is_square() || x.rows() % n != 0 || x.rows() > d_max * n) {
        return Err(Error::DimensionMismatch(format!("starting input {:?} for degree {d_max} on M_{n}", bad.shape())));
    }
    let mut out: Vec<NormEstimate> = Vec::with_capacity(d_max);
    for d in 1..=d_max {
        let dim = d * n;
        if p == Exponent::Finite(2.0) && d == 1 {
            let (value, witness) = exact_p2(t)?;
            out.push(NormEstimate { value, p, d, witness, restarts: 0, seed, converged_restarts: 0 });
            continue;
        }
        let a = Amplified::new(t, d);
        let mut starts: Vec<ComplexMatrix> = Vec::new();
        if let Some(prev) = out.last() {
            starts.push(embed(&prev.witness, dim));
        }
        starts.extend(extra.iter().filter(|x| x.rows() <= dim).map(|x| embed(x, dim)));
        starts.extend((0..restarts.max(1)).map(|k| start(seed, k, dim)));

        let mut best: Option<Ascent> = None;
        let mut converged = 0;
        for x0 in &starts {
            let run = ascend(&a, x0, p)?;
            converged += usize::from(run.converged);
            if best.as_ref().map_or(true, |b| run.value > b.value) {
                best = Some(run);
            }
        }
        let best = best.expect("at least one start");
        // Recomputed from the stored witness; the floor keeps the ladder monotone
        // when the embedded witness re-evaluates an ulp lower.
        let floor = out.last().map_or(0.0, |e| e.value);
        let value = a.ratio(&best.witness, p)?.max(floor);
        out.push(NormEstimate { value, p, d, witness: best.witness, restarts: starts.len(), seed, converged_restarts: converged });
    }
    Ok(out)
}
