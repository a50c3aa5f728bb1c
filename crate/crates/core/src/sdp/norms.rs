//! Decomposable, completely bounded and Schur-multiplier norms at the ∞ level.

use serde::{Deserialize, Serialize};

use super::block::{BlockProgram, BlockSolution, Cap};
use super::{SdpOptions, SdpProblem, SdpSolution, SdpStatus, VarId};
use crate::error::{Error, Result};
use crate::group::{fourier_multiplier, GroupAlgebra};
use crate::linalg::{kron, psd_sqrt, singular_values, ComplexMatrix, Side, C64};
use crate::superop::SuperOperator;

/// Value of an ∞-level decomposable norm with the optimal v1, v2.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecNorm {
    pub value: f64,
    pub v1: SuperOperator,
    pub v2: SuperOperator,
    pub iterations: usize,
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CbNorm {
    /// ‖(√ρ0 ⊗ I) J (√ρ1 ⊗ I)‖_1 for the dual densities: a certified lower bound.
    pub value: f64,
    /// Primal objective of the same program.
    pub upper: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchurNorm {
    pub value: f64,
    pub p: ComplexMatrix,
    pub q: ComplexMatrix,
    pub iterations: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PropertyPWitness {
    pub psi1: Vec<f64>,
    pub psi2: Vec<f64>,
    /// Smallest eigenvalue of the block Choi matrix at the optimum.
    pub margin: f64,
}

fn require_optimal(status: SdpStatus, iterations: usize) -> Result<()> {
    if status == SdpStatus::Optimal {
        Ok(())
    } else {
        Err(Error::Solver { status, iterations })
    }
}

fn check_block(sol: &BlockSolution) -> Result<()> {
    require_optimal(sol.status, sol.iterations)
}

fn check_dense(sol: &SdpSolution) -> Result<()> {
    require_optimal(sol.status, sol.iterations)
}

/// Selectors picking the diagonal m×m blocks of an (n·m)-dim Choi matrix.
fn block_selectors(n: usize, m: usize) -> Vec<Vec<usize>> {
    (0..n).map(|i| (i * m..(i + 1) * m).collect()).collect()
}

/// min max(‖v1(1)‖, ‖v2(1)‖) over v1, v2 with [[v1, T], [T°, v2]] CP.
pub fn dec_norm_inf(t: &SuperOperator, opts: &SdpOptions) -> Result<DecNorm> {
    let (n, m) = (t.in_dim(), t.out_dim());
    let caps = [Side::First, Side::Second]
        .into_iter()
        .map(|side| Cap { side, dim: m, selectors: block_selectors(n, m) })
        .collect();
    let sol = BlockProgram::new(t.choi().clone(), caps)?.solve(opts)?;
    check_block(&sol)?;
    Ok(DecNorm {
        value: sol.t,
        v1: SuperOperator::from_choi(n, m, sol.z1)?,
        v2: SuperOperator::from_choi(n, m, sol.z2)?,
        iterations: sol.iterations,
        gap: sol.gap,
    })
}

/// Decomposable norm of T on trace class, S^1_n → S^1_m: min max(‖v1'(1)‖, ‖v2'(1)‖)
/// over the same block constraint, v' the trace-duality adjoint.
pub fn dec_norm_one(t: &SuperOperator, opts: &SdpOptions) -> Result<DecNorm> {
    let (n, m) = (t.in_dim(), t.out_dim());
    // Tracing out the output factor of the Choi matrix gives v'(1) transposed.
    let selectors: Vec<Vec<usize>> = (0..m).map(|k| (0..n).map(|i| i * m + k).collect()).collect();
    let caps = [Side::First, Side::Second]
        .into_iter()
        .map(|side| Cap { side, dim: n, selectors: selectors.clone() })
        .collect();
    let sol = BlockProgram::new(t.choi().clone(), caps)?.solve(opts)?;
    check_block(&sol)?;
    Ok(DecNorm {
        value: sol.t,
        v1: SuperOperator::from_choi(n, m, sol.z1)?,
        v2: SuperOperator::from_choi(n, m, sol.z2)?,
        iterations: sol.iterations,
        gap: sol.gap,
    })
}

/// ‖T‖_cb for T: M_n → M_m, via the diamond norm of the trace-dual map.
pub fn cb_norm_inf(t: &SuperOperator, opts: &SdpOptions) -> Result<CbNorm> {
    let (n, m) = (t.in_dim(), t.out_dim());
    // J lives on C^m ⊗ C^n; the caps trace out the C^n factor.
    let j = t.hs_adjoint().into_choi();
    let selectors: Vec<Vec<usize>> = (0..n).map(|k| (0..m).map(|a| a * n + k).collect()).collect();
    let caps = [Side::First, Side::Second]
        .into_iter()
        .map(|side| Cap { side, dim: m, selectors: selectors.clone() })
        .collect();
    let sol = BlockProgram::new(j.clone(), caps)?.solve(opts)?;
    check_block(&sol)?;
    let root = |x: &ComplexMatrix| -> Result<Option<ComplexMatrix>> {
        let tr = x.trace().re;
        if tr <= 0.0 {
            return Ok(None);
        }
        Ok(Some(kron(&psd_sqrt(&x.scale_real(1.0 / tr))?, &ComplexMatrix::identity(n))))
    };
    let value = match (root(&sol.cap_multipliers[0])?, root(&sol.cap_multipliers[1])?) {
        (Some(r0), Some(r1)) => singular_values(&r0.matmul(&j).matmul(&r1))?.iter().sum(),
        _ => 0.0,
    };
    Ok(CbNorm { value, upper: sol.t, iterations: sol.iterations })
}

/// min max(max_i P_ii, max_j Q_jj) s.t. [[P, A], [A*, Q]] ⪰ 0.
pub fn schur_cb_norm(a: &ComplexMatrix, opts: &SdpOptions) -> Result<SchurNorm> {
    if !a.is_square() {
        return Err(Error::NotSquare(a.rows(), a.cols()));
    }
    let n = a.rows();
    let caps = (0..n)
        .flat_map(|j| [Side::First, Side::Second].map(|side| Cap { side, dim: 1, selectors: vec![vec![j]] }))
        .collect();
    let sol = BlockProgram::new(a.clone(), caps)?.solve(opts)?;
    check_block(&sol)?;
    Ok(SchurNorm { value: sol.t, p: sol.z1, q: sol.z2, iterations: sol.iterations })
}

/// Decomposable norm of T: ℓ^∞_n → M_m given by T(e_k) = u_k.
pub fn dec_norm_from_commutative(t: &SuperOperator, opts: &SdpOptions) -> Result<DecNorm> {
    if !t.is_diagonal_input(1e-12 * (1.0 + t.choi().max_abs())) {
        return Err(Error::NotDiagonalInput);
    }
    let (n, m) = (t.in_dim(), t.out_dim());
    let mut p = SdpProblem::new();
    let tv = p.add_scalar("t");
    let a: Vec<VarId> = (0..n).map(|k| p.add_var(&format!("v1_{k}"), m)).collect();
    let b: Vec<VarId> = (0..n).map(|k| p.add_var(&format!("v2_{k}"), m)).collect();
    for k in 0..n {
        let u = t.image(k, k);
        let blk = p.add_block(&format!("pair_{k}"), 2 * m);
        let zero = ComplexMatrix::zeros(m, m);
        p.add_constant(blk, &ComplexMatrix::block2x2(&zero, &u, &u.adjoint(), &zero)?)?;
        p.place(blk, a[k], 0, 1.0)?;
        p.place(blk, b[k], m, 1.0)?;
    }
    for (name, vars) in [("cap1", &a), ("cap2", &b)] {
        let cap = p.add_block(name, m);
        p.add_scalar_identity(cap, tv, 1.0)?;
        for &v in vars.iter() {
            p.place(cap, v, 0, -1.0)?;
        }
    }
    p.minimize_scalar(tv, 1.0)?;
    let sol = p.solve(opts)?;
    check_dense(&sol)?;
    let images = |vars: &[VarId]| -> Vec<ComplexMatrix> {
        vars.iter().map(|v| sol.variables[v.0].value.clone()).collect()
    };
    Ok(DecNorm {
        value: sol.primal_objective,
        v1: SuperOperator::from_commutative(&images(&a))?,
        v2: SuperOperator::from_commutative(&images(&b))?,
        iterations: sol.iterations,
        gap: sol.gap,
    })
}

/// For selfadjoint T: min ‖S(1)‖ over S with S − T and S + T CP.
pub fn dec_norm_selfadjoint(t: &SuperOperator, opts: &SdpOptions) -> Result<DecNorm> {
    let c = t.choi();
    if !c.is_hermitian(1e-10 * (1.0 + c.frobenius_norm())) {
        return Err(Error::Invalid("map is not selfadjoint".into()));
    }
    let c = c.hermitian_part();
    let (n, m) = (t.in_dim(), t.out_dim());
    let d = n * m;
    let mut p = SdpProblem::new();
    let tv = p.add_scalar("t");
    let s = p.add_var("S", d);
    let plus = p.add_block("S+T", d);
    p.place(plus, s, 0, 1.0)?;
    p.add_constant(plus, &c)?;
    let minus = p.add_block("S-T", d);
    p.place(minus, s, 0, 1.0)?;
    p.add_constant(minus, &(-&c))?;
    let cap = p.add_block("cap", m);
    p.add_scalar_identity(cap, tv, 1.0)?;
    p.add_map(cap, s, |z| {
        let mut out = ComplexMatrix::zeros(m, m);
        for i in 0..n {
            out.axpy_real(-1.0, &z.submatrix(i * m, i * m, m, m));
        }
        out
    })?;
    p.minimize_scalar(tv, 1.0)?;
    let sol = p.solve(opts)?;
    check_dense(&sol)?;
    let smap = SuperOperator::from_choi(n, m, sol.variables[s.0].value.clone())?;
    Ok(DecNorm { value: sol.primal_objective, v1: smap.clone(), v2: smap, iterations: sol.iterations, gap: sol.gap })
}

const PROPERTY_P_TOL: f64 = 1e-7;

/// Real symmetric ψ1, ψ2 with ψ_i(e) = 1 making [[M̃ψ1, M̃φ], [M̃φ°, M̃ψ2]] CP.
///
/// Maximizes the smallest eigenvalue of the reduced block Choi matrix; the
/// witness is accepted when it is ≥ −1e-7.
pub fn property_p_witness(alg: &GroupAlgebra, phi: &[f64], opts: &SdpOptions) -> Result<PropertyPWitness> {
    let n = alg.order();
    if phi.len() != n {
        return Err(Error::DimensionMismatch(format!("symbol of length {} on a group of order {n}", phi.len())));
    }
    let g = alg.group();
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if !orbits.iter().any(|o| o.contains(&s)) {
            let si = g.inv(s);
            orbits.push(if si == s { vec![s] } else { vec![s, si] });
        }
    }
    let indicator = |o: &[usize]| -> Vec<C64> {
        (0..n).map(|s| if o.contains(&s) { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect()
    };
    let basis: Vec<ComplexMatrix> =
        orbits.iter().map(|o| fourier_multiplier(alg, &indicator(o)).map(|f| f.into_choi())).collect::<Result<_>>()?;
    let cphi = fourier_multiplier(alg, &phi.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())?.into_choi();

    let d = n * n;
    let mut p = SdpProblem::new();
    let margin = p.add_scalar("margin");
    let psi1: Vec<VarId> = (0..orbits.len()).map(|k| p.add_scalar(&format!("psi1_{k}"))).collect();
    let psi2: Vec<VarId> = (0..orbits.len()).map(|k| p.add_scalar(&format!("psi2_{k}"))).collect();
    let blk = p.add_block("block", 2 * d);
    let zero = ComplexMatrix::zeros(d, d);
    p.add_constant(blk, &ComplexMatrix::block2x2(&zero, &cphi, &cphi.adjoint(), &zero)?)?;
    p.add_scalar_identity(blk, margin, -1.0)?;
    let e = g.identity();
    let e_orbit = orbits.iter().position(|o| o[0] == e).expect("identity orbit");
    for (k, bm) in basis.iter().enumerate() {
        for (vars, at) in [(&psi1, 0), (&psi2, d)] {
            p.add_map(blk, vars[k], |z| {
                let mut out = ComplexMatrix::zeros(2 * d, 2 * d);
                out.set_block(at, at, &bm.scale(z[(0, 0)]));
                out
            })?;
        }
    }
    let one = ComplexMatrix::diag_real(&[1.0]);
    p.add_equality(&[(psi1[e_orbit], one.clone())], 1.0)?;
    p.add_equality(&[(psi2[e_orbit], one)], 1.0)?;
    p.minimize_scalar(margin, -1.0)?;
    let sol = p.solve(opts)?;
    check_dense(&sol)?;
    let m = sol.variables[margin.0].value[(0, 0)].re;
    if m < -PROPERTY_P_TOL {
        return Err(Error::Infeasible);
    }
    let symbol = |vars: &[VarId]| -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (k, o) in orbits.iter().enumerate() {
            for &s in o {
                out[s] = sol.variables[vars[k].0].value[(0, 0)].re;
            }
        }
        out
    };
    Ok(PropertyPWitness { psi1: symbol(&psi1), psi2: symbol(&psi2), margin: m })
}
