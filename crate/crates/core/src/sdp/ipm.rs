//! Infeasible-start primal-dual interior-point method with Nesterov-Todd
//! scaling and Mehrotra predictor-corrector steps.
//!
//! Problem form: minimize cᵀy subject to S = F0 + 𝓛y ⪰ 0 (block diagonal,
//! Hermitian blocks). Multiplier X ⪰ 0 with 𝓛ᵀX = c; dual value −⟨F0, X⟩.

use serde::{Deserialize, Serialize};

use super::{SdpOptions, SdpStatus};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, herm_eig_fast, herm_eigenvalues_fast, lower_inverse, ComplexMatrix, C64};

pub type Blocks = Vec<ComplexMatrix>;

/// Linear matrix inequality data accessed through its action.
pub trait LmiOperator {
    fn num_vars(&self) -> usize;
    fn block_dims(&self) -> &[usize];
    fn constant(&self) -> &[ComplexMatrix];
    fn objective(&self) -> &[f64];
    /// 𝓛y without the constant term.
    fn apply(&self, y: &[f64]) -> Blocks;
    /// 𝓛ᵀX, entries Re⟨F_i, X⟩.
    fn apply_adjoint(&self, x: &[ComplexMatrix]) -> Vec<f64>;
    /// Solver for M Δy = r with M = 𝓛ᵀ(W 𝓛(·) W), W blockwise Hermitian PD.
    /// `w_inv` holds the inverses of the blocks of W.
    fn newton_system<'a>(&'a self, w: &'a [ComplexMatrix], w_inv: &'a [ComplexMatrix]) -> Result<Box<dyn NewtonSystem + 'a>>;
}

pub trait NewtonSystem {
    fn solve(&self, r: &[f64]) -> Result<Vec<f64>>;
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IpmOutput {
    pub y: Vec<f64>,
    pub s: Blocks,
    pub x: Blocks,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    /// max(−λ_min(F0 + 𝓛y), ‖c − 𝓛ᵀX‖_∞).
    pub violation: f64,
    pub status: SdpStatus,
    pub iterations: usize,
}

fn inner(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.real_inner(y)).sum()
}

fn norm_blocks(a: &[ComplexMatrix]) -> f64 {
    a.iter().map(|x| x.frobenius_norm().powi(2)).sum::<f64>().sqrt()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Per-block Nesterov-Todd scaling data.
struct Scaling {
    g: ComplexMatrix,
    ginv: ComplexMatrix,
    w: ComplexMatrix,
    lambda: Vec<f64>,
}

fn nt_scaling(x: &ComplexMatrix, s: &ComplexMatrix) -> Result<Scaling> {
    let l = cholesky(x)?;
    let lsl = l.adjoint_matmul(s).matmul(&l);
    let spec = herm_eig_fast(&lsl)?;
    if spec.min() <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    let lambda: Vec<f64> = spec.eigenvalues.iter().map(|v| v.sqrt()).collect();
    let u = &spec.eigenvectors;
    let d = lambda.len();
    let mut lu = l.matmul(u);
    for i in 0..d {
        for j in 0..d {
            lu[(i, j)] *= lambda[j].powf(-0.5);
        }
    }
    let g = lu;
    let mut ginv = u.adjoint_matmul(&lower_inverse(&l));
    for i in 0..d {
        for j in 0..d {
            ginv[(i, j)] *= lambda[i].sqrt();
        }
    }
    let w = g.matmul_adjoint(&g).hermitian_part();
    Ok(Scaling { g, ginv, w, lambda })
}

fn sandwich(w: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    w.matmul(x).matmul(w)
}

/// Largest α ≤ limit with V + αΔ̃ ⪰ 0 in scaled coordinates.
fn max_step(lambda: &[f64], dt: &ComplexMatrix) -> Result<f64> {
    let d = lambda.len();
    let m = ComplexMatrix::from_fn(d, d, |i, j| dt[(i, j)] / (lambda[i] * lambda[j]).sqrt());
    let lmin = *herm_eigenvalues_fast(&m)?.last().expect("nonempty");
    Ok(if lmin < 0.0 { -1.0 / lmin } else { f64::INFINITY })
}

pub fn solve_lmi(op: &dyn LmiOperator, opts: &SdpOptions) -> Result<IpmOutput> {
    let dims = op.block_dims().to_vec();
    let nvar = op.num_vars();
    let f0 = op.constant();
    let c = op.objective();
    let nu: f64 = dims.iter().sum::<usize>() as f64;
    let f0_norm = norm_blocks(f0);
    let c_norm = norm2(c);

    let c_inf = c.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let start = 10f64.max(nu.sqrt()).max(1.0 + f0_norm).max(1.0 + c_inf);
    let mut y = vec![0.0; nvar];
    let mut x: Blocks = dims.iter().map(|&d| ComplexMatrix::identity(d).scale_real(start)).collect();
    let mut s: Blocks = x.clone();

    let mut status = SdpStatus::MaxIter;
    let mut iterations = 0;
    let mut stalls = 0;
    let mut worse = 0;
    let mut best: Option<(f64, Vec<f64>, Blocks, Blocks)> = None;

    for it in 0..=opts.max_iter {
        iterations = it;
        let ly = op.apply(&y);
        let rp: Blocks = (0..dims.len()).map(|b| &(&f0[b] + &ly[b]) - &s[b]).collect();
        let ltx = op.apply_adjoint(&x);
        let rd: Vec<f64> = c.iter().zip(&ltx).map(|(a, b)| a - b).collect();
        let pobj: f64 = c.iter().zip(&y).map(|(a, b)| a * b).sum();
        let dobj = -inner(f0, &x);
        let mu = inner(&x, &s) / nu;
        let pinf = norm_blocks(&rp) / (1.0 + f0_norm);
        let dinf = norm2(&rd) / (1.0 + c_norm);
        let gap = pobj - dobj;
        let rel = gap.abs() / (1.0 + pobj.abs() + dobj.abs());
        if opts.verbose {
            eprintln!("it {it:3} p {pobj:+.10e} d {dobj:+.10e} gap {gap:.2e} mu {mu:.2e} pinf {pinf:.2e} dinf {dinf:.2e}");
        }
        let merit = pinf.max(dinf).max(rel);
        if best.as_ref().map_or(true, |b| merit < b.0) {
            best = Some((merit, y.clone(), s.clone(), x.clone()));
            worse = 0;
        } else if best.as_ref().is_some_and(|b| merit > 10.0 * b.0) {
            worse += 1;
        }
        let feasible = pinf <= opts.feas_tol && dinf <= opts.feas_tol;
        if feasible && (gap.abs() <= opts.tol_abs || rel <= opts.tol_rel) {
            status = SdpStatus::Optimal;
            break;
        }
        // Dual improving ray: X/(−⟨F0,X⟩) with vanishing 𝓛ᵀ.
        if dobj > 1e8 * (1.0 + c_norm) && norm2(&ltx) / dobj <= 1e-8 {
            status = SdpStatus::Infeasible;
            break;
        }
        if it == opts.max_iter || stalls >= 8 || worse >= 3 {
            break;
        }

        // Loss of definiteness this late means the iterates cannot improve.
        let sc: Vec<Scaling> = match (0..dims.len()).map(|b| nt_scaling(&x[b], &s[b])).collect() {
            Ok(v) => v,
            Err(_) => break,
        };
        let w: Blocks = sc.iter().map(|q| q.w.clone()).collect();
        let w_inv: Blocks = sc.iter().map(|q| q.ginv.adjoint_matmul(&q.ginv).hermitian_part()).collect();
        let newton = match op.newton_system(&w, &w_inv) {
            Ok(n) => n,
            Err(_) => break,
        };

        let direction = |rc: &Blocks| -> Result<(Vec<f64>, Blocks, Blocks)> {
            let t: Blocks = (0..dims.len()).map(|b| &rc[b] - &sandwich(&w[b], &rp[b])).collect();
            let lt = op.apply_adjoint(&t);
            let rhs: Vec<f64> = lt.iter().zip(&rd).map(|(a, b)| a - b).collect();
            let mut dy = newton.solve(&rhs)?;
            // Iterative refinement against the exact operator. Late in a solve M is
            // so ill conditioned that refinement can diverge; keep the best candidate.
            let mut best_res = f64::INFINITY;
            let mut best_dy = dy.clone();
            for _ in 0..5 {
                let ldy = op.apply(&dy);
                let wl: Blocks = (0..dims.len()).map(|b| sandwich(&w[b], &ldy[b])).collect();
                let mdy = op.apply_adjoint(&wl);
                let res: Vec<f64> = rhs.iter().zip(&mdy).map(|(a, b)| a - b).collect();
                let rn = norm2(&res);
                if rn >= best_res {
                    break;
                }
                best_res = rn;
                best_dy.clone_from(&dy);
                if rn <= 1e-14 * (1.0 + norm2(&rhs)) {
                    break;
                }
                let corr = newton.solve(&res)?;
                for (d, e) in dy.iter_mut().zip(corr) {
                    *d += e;
                }
            }
            let dy = best_dy;
            let ldy = op.apply(&dy);
            let ds: Blocks = (0..dims.len()).map(|b| &ldy[b] + &rp[b]).collect();
            let dx: Blocks = (0..dims.len()).map(|b| &rc[b] - &sandwich(&w[b], &ds[b])).collect();
            Ok((dy, ds, dx))
        };

        let scaled = |ds: &Blocks, dx: &Blocks| -> (Blocks, Blocks) {
            let dst = (0..dims.len()).map(|b| sc[b].g.adjoint_matmul(&ds[b]).matmul(&sc[b].g)).collect();
            let dxt = (0..dims.len()).map(|b| sc[b].ginv.matmul(&dx[b]).matmul_adjoint(&sc[b].ginv)).collect();
            (dst, dxt)
        };
        let steps = |dst: &Blocks, dxt: &Blocks| -> Result<(f64, f64)> {
            let mut ap = f64::INFINITY;
            let mut ad = f64::INFINITY;
            for b in 0..dims.len() {
                ap = ap.min(max_step(&sc[b].lambda, &dst[b])?);
                ad = ad.min(max_step(&sc[b].lambda, &dxt[b])?);
            }
            Ok((ap, ad))
        };

        // Predictor.
        let rc_aff: Blocks = x.iter().map(|xb| -xb).collect();
        let (_, ds_a, dx_a) = direction(&rc_aff)?;
        let (dst_a, dxt_a) = scaled(&ds_a, &dx_a);
        let (ap, ad) = steps(&dst_a, &dxt_a)?;
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let mut mu_aff = 0.0;
        for b in 0..dims.len() {
            let mut xa = x[b].clone();
            xa.axpy_real(ad, &dx_a[b]);
            let mut sa = s[b].clone();
            sa.axpy_real(ap, &ds_a[b]);
            mu_aff += xa.real_inner(&sa);
        }
        mu_aff /= nu;
        // Short predictor steps mean the iterate is far from the central path; the
        // exponent drops to 1 so the corrector recentres more.
        let short = ap.min(ad);
        let expon = if short < 1.0 / 3f64.sqrt() { 1.0 } else { (3.0 * short * short).max(1.0) };
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powf(expon);

        // Corrector.
        let mut rc: Blocks = Vec::with_capacity(dims.len());
        for b in 0..dims.len() {
            let lam = &sc[b].lambda;
            let d = lam.len();
            let prod = dxt_a[b].matmul(&dst_a[b]);
            let mut dmat = ComplexMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    let sym = (prod[(i, j)] + prod[(j, i)].conj()) * 0.5;
                    let mut r = -sym;
                    if i == j {
                        r += C64::new(sigma * mu - lam[i] * lam[i], 0.0);
                    }
                    dmat[(i, j)] = r * (2.0 / (lam[i] + lam[j]));
                }
            }
            rc.push(sc[b].g.matmul(&dmat).matmul_adjoint(&sc[b].g).hermitian_part());
        }
        let (dy, ds, dx) = direction(&rc)?;
        let (dst, dxt) = scaled(&ds, &dx);
        let (ap, ad) = steps(&dst, &dxt)?;
        let tau = 0.95f64.max(1.0 - 10.0 * mu.min(1.0)).min(0.995);
        let ap = (tau * ap).min(1.0);
        let ad = (tau * ad).min(1.0);
        if ap < 1e-8 && ad < 1e-8 {
            stalls += 1;
        } else {
            stalls = 0;
        }
        for (yi, di) in y.iter_mut().zip(&dy) {
            *yi += ap * di;
        }
        for b in 0..dims.len() {
            s[b].axpy_real(ap, &ds[b]);
            s[b] = s[b].hermitian_part();
            x[b].axpy_real(ad, &dx[b]);
            x[b] = x[b].hermitian_part();
        }
    }

    if status == SdpStatus::MaxIter {
        if let Some((_, by, bs, bx)) = best {
            y = by;
            s = bs;
            x = bx;
        }
    }
    let ly = op.apply(&y);
    let mut lmi_violation: f64 = 0.0;
    let mut rp_norm = 0.0;
    for b in 0..dims.len() {
        let val = &f0[b] + &ly[b];
        rp_norm += (&val - &s[b]).frobenius_norm().powi(2);
        let lmin = *herm_eigenvalues_fast(&val)?.last().expect("nonempty");
        lmi_violation = lmi_violation.max(-lmin);
    }
    let rd: Vec<f64> = c.iter().zip(op.apply_adjoint(&x)).map(|(a, b)| a - b).collect();
    let rd_inf = rd.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let pobj: f64 = c.iter().zip(&y).map(|(a, b)| a * b).sum();
    let dobj = -inner(f0, &x);
    let violation = lmi_violation.max(rd_inf);
    let gap = pobj - dobj;
    let within = gap.abs() <= 1e-6 * (1.0 + pobj.abs()) && violation <= 1e-7;
    if status == SdpStatus::Optimal && !within {
        status = SdpStatus::MaxIter;
    }
    // A solve that broke down numerically still counts when the best iterate is
    // within ten times the requested gap.
    let loose = 10.0 * opts.tol_abs.max(opts.tol_rel * (1.0 + pobj.abs() + dobj.abs()));
    if status == SdpStatus::MaxIter && within && gap.abs() <= loose {
        status = SdpStatus::Optimal;
    }
    Ok(IpmOutput {
        status,
        iterations,
        primal_objective: pobj,
        dual_objective: dobj,
        gap: pobj - dobj,
        primal_infeasibility: rp_norm.sqrt() / (1.0 + f0_norm),
        dual_infeasibility: norm2(&rd) / (1.0 + c_norm),
        violation,
        y,
        s,
        x,
    })
}
