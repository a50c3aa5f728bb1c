use rand::Rng;
use serde_json::{json, Value};

use super::{Check, LabConfig, Outcome, Table};
use crate::error::{Error, Result};
use crate::group::{
    fourier_multiplier, project_fourier, project_schur, schur_multiplier, triangular_symbol, FiniteGroup, GroupAlgebra,
    TwoCocycle,
};
use crate::linalg::{herm_eig, ComplexMatrix, Exponent, C64};
use crate::pnorm::{matsaev_check, pq_norm_ladder, schur_limit_criterion, truncation_growth, Polynomial};
use crate::random::{complex_gaussian, gaussian, index, random_cp_map, random_map, random_matrix, uniform, LabRng};
use crate::sdp::{cb_norm_inf, dec_norm_from_commutative, dec_norm_inf, dec_norm_one, dec_norm_selfadjoint, schur_cb_norm};
use crate::sdp::property_p_witness;
use crate::superop::{modulus_block_check, BlockMap, SuperOperator};

// Stream ids, one per battery, so that batteries stay independent of each other.
const CB_DEC: u64 = 2;
const AXIOMS: u64 = 3;
const SELFADJOINT: u64 = 4;
const PROJECTIONS: u64 = 5;
const COCYCLE: u64 = 6;
const SCHUR_DEC: u64 = 7;
const ESTIMATES: u64 = 8;
const MODULUS: u64 = 9;
const PROPERTY_P: u64 = 10;
const MATSAEV: u64 = 11;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn map_json(t: &SuperOperator) -> Value {
    serde_json::to_value(t).unwrap_or(Value::Null)
}

fn real(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| C64::new(x, 0.0)).collect()
}

fn clock(n: usize) -> ComplexMatrix {
    let w = 2.0 * std::f64::consts::PI / n as f64;
    ComplexMatrix::diag(&(0..n).map(|k| C64::from_polar(1.0, w * k as f64)).collect::<Vec<_>>())
}

fn cyclic_shift(n: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        s[((j + 1) % n, j)] = C64::new(1.0, 0.0);
    }
    s
}

/// ψ(s) = ⟨ξ, λ_s ξ⟩/‖ξ‖² for a random real ξ: real, symmetric, positive definite, ψ(e) = 1.
fn positive_definite_real(r: &mut LabRng, untwisted: &GroupAlgebra) -> Vec<f64> {
    let n = untwisted.order();
    let xi: Vec<C64> = (0..n).map(|_| C64::new(gaussian(r), 0.0)).collect();
    let norm: f64 = xi.iter().map(|z| z.norm_sqr()).sum();
    (0..n)
        .map(|s| {
            let v = untwisted.lambda(s).mat_vec(&xi);
            xi.iter().zip(&v).map(|(a, b)| (a.conj() * b).re).sum::<f64>() / norm
        })
        .collect()
}

/// a·ψ1 − b·ψ2 with a + b ≤ 1, hence decomposable norm at most 1.
fn contractive_real_symbol(r: &mut LabRng, untwisted: &GroupAlgebra) -> Vec<f64> {
    let psi1 = positive_definite_real(r, untwisted);
    let psi2 = positive_definite_real(r, untwisted);
    let total = uniform(r, 0.5, 1.0);
    let w = uniform(r, 0.0, 1.0);
    psi1.iter().zip(&psi2).map(|(x, y)| total * (w * x - (1.0 - w) * y)).collect()
}

/// ψ(s) = ⟨ξ, λ_s ξ⟩ for a random complex ξ on the untwisted algebra.
fn positive_definite_complex(r: &mut LabRng, untwisted: &GroupAlgebra) -> Vec<C64> {
    let n = untwisted.order();
    let xi: Vec<C64> = (0..n).map(|_| complex_gaussian(r)).collect();
    let norm: f64 = xi.iter().map(|z| z.norm_sqr()).sum();
    (0..n)
        .map(|s| {
            let v = untwisted.lambda(s).mat_vec(&xi);
            xi.iter().zip(&v).map(|(a, b)| a.conj() * b).sum::<C64>() / norm
        })
        .collect()
}

fn cyclic_subgroup(g: &FiniteGroup, s: usize) -> Vec<usize> {
    let mut h = vec![g.identity()];
    let mut x = s;
    while x != g.identity() {
        h.push(x);
        x = g.mul(x, s);
    }
    h.sort_unstable();
    h
}

fn fixed_rows() -> Vec<(usize, Vec<ComplexMatrix>)> {
    let pauli_x = cyclic_shift(2);
    let pauli_z = clock(2);
    vec![(2, vec![pauli_x, pauli_z]), (3, vec![clock(3), cyclic_shift(3), clock(3).matmul(&cyclic_shift(3))])]
}

/// e_k ↦ u_k for trace-orthogonal unitaries in M_n.
pub fn unitary_rows(cfg: &LabConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut check = Check::new(
        "unitary row",
        "the decomposable norm of e_k ↦ u_k for trace-orthogonal unitaries u_k in M_n is n at p = ∞",
        cfg.tol(1e-4),
    );
    for (n, us) in fixed_rows() {
        let t = SuperOperator::from_commutative(&us)?;
        let d = dec_norm_from_commutative(&t, &cfg.sdp)?;
        out.scalar(format!("dec_n{n}"), d.value);
        check.record((d.value - n as f64).abs(), || json!({ "n": n, "dec": d.value, "map": map_json(&t) }));
    }
    out.assertions.push(check.finish("n = 2 (X, Z) and n = 3 (clock, shift, product)"));
    Ok(out)
}

/// dec and cb of the transpose on M_2 and M_3.
pub fn transpose_norms(cfg: &LabConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut dec = Check::new("transpose dec", "the decomposable norm of the transpose on M_n is n", cfg.tol(1e-4));
    let mut cb = Check::new("transpose cb", "the cb norm of the transpose on M_n is n", cfg.tol(1e-4));
    for n in 2..=3 {
        let t = SuperOperator::transpose_map(n);
        let d = dec_norm_inf(&t, &cfg.sdp)?.value;
        let c = cb_norm_inf(&t, &cfg.sdp)?.value;
        out.scalar(format!("transpose_dec_n{n}"), d);
        out.scalar(format!("transpose_cb_n{n}"), c);
        dec.record((d - n as f64).abs(), || json!({ "n": n, "dec": d }));
        cb.record((c - n as f64).abs(), || json!({ "n": n, "cb": c }));
    }
    out.assertions.push(dec.finish("n = 2, 3"));
    out.assertions.push(cb.finish("n = 2, 3"));
    Ok(out)
}

/// cb lower bound ≤ dec upper bound on random maps between M_2 and M_3.
pub fn cb_below_dec(cfg: &LabConfig) -> Result<Outcome> {
    let mut r = cfg.stream(CB_DEC);
    let mut out = Outcome::default();
    let mut check = Check::new("cb below dec", "‖T‖_cb ≤ ‖T‖_dec for every decomposable map", cfg.tol(1e-9));
    let trials = cfg.count(100);
    let mut min_slack = f64::INFINITY;
    for _ in 0..trials {
        let (n, m) = (2 + index(&mut r, 2), 2 + index(&mut r, 2));
        let t = random_map(&mut r, n, m);
        let c = cb_norm_inf(&t, &cfg.sdp)?.value;
        let d = dec_norm_inf(&t, &cfg.sdp)?.value;
        min_slack = min_slack.min(d - c);
        check.record(c - d, || json!({ "cb": c, "dec": d, "map": map_json(&t) }));
    }
    out.scalar("min_slack", min_slack);
    out.assertions.push(check.finish(format!("{trials} random maps, smallest dec − cb = {min_slack:.3e}")));
    Ok(out)
}

/// Norm axioms and invariances of the decomposable norm on random maps in M_2 and M_3.
pub fn dec_axioms(cfg: &LabConfig) -> Result<Outcome> {
    let mut r = cfg.stream(AXIOMS);
    let tol = cfg.tol(1e-6);
    let mut homog = Check::new("homogeneity", "‖λT‖_dec = |λ|·‖T‖_dec", tol);
    let mut triangle = Check::new("triangle", "‖S + T‖_dec ≤ ‖S‖_dec + ‖T‖_dec", tol);
    let mut compose = Check::new("composition", "‖T∘S‖_dec ≤ ‖T‖_dec·‖S‖_dec", tol);
    let mut duality = Check::new(
        "adjoint duality",
        "the trace-duality adjoint has the same decomposable norm on trace class as T on the full matrix algebra",
        tol,
    );
    let mut opposite = Check::new("opposite", "‖T°‖_dec = ‖T‖_dec", tol);
    let mut tilde = Check::new("tilde", "the selfadjoint 2×2 dilation [[0, T], [T°, 0]] has the decomposable norm of T", tol);
    let trials = cfg.count(30);
    for k in 0..trials {
        let n = 2 + k % 2;
        let t = random_map(&mut r, n, n);
        let s = random_map(&mut r, n, n);
        let lambda = complex_gaussian(&mut r) * 2.0;
        let dt = dec_norm_inf(&t, &cfg.sdp)?.value;
        let ds = dec_norm_inf(&s, &cfg.sdp)?.value;
        let w = || json!({ "T": map_json(&t), "S": map_json(&s) });

        let dl = dec_norm_inf(&t.scale(lambda), &cfg.sdp)?.value;
        homog.record(rel(dl, lambda.norm() * dt), || json!({ "lambda": [lambda.re, lambda.im], "dec": dt, "scaled": dl, "maps": w() }));

        let dsum = dec_norm_inf(&t.add(&s)?, &cfg.sdp)?.value;
        triangle.record((dsum - ds - dt) / (ds + dt).max(1.0), || json!({ "sum": dsum, "dec_s": ds, "dec_t": dt, "maps": w() }));

        let dcomp = dec_norm_inf(&t.compose(&s)?, &cfg.sdp)?.value;
        compose.record((dcomp - dt * ds) / (dt * ds).max(1.0), || json!({ "composition": dcomp, "dec_s": ds, "dec_t": dt, "maps": w() }));

        let dadj = dec_norm_one(&t.adjoint(), &cfg.sdp)?.value;
        duality.record(rel(dadj, dt), || json!({ "dec": dt, "adjoint_trace_class": dadj, "maps": w() }));

        let dop = dec_norm_inf(&t.opposite(), &cfg.sdp)?.value;
        opposite.record(rel(dop, dt), || json!({ "dec": dt, "opposite": dop, "maps": w() }));

        let dtl = dec_norm_inf(&t.tilde()?, &cfg.sdp)?.value;
        tilde.record(rel(dtl, dt), || json!({ "dec": dt, "tilde": dtl, "maps": w() }));
    }
    let mut out = Outcome::default();
    for c in [homog, triangle, compose, duality, opposite, tilde] {
        let worst = c.worst();
        out.assertions.push(c.finish(format!("{trials} random maps, worst relative discrepancy {worst:.3e}")));
    }
    Ok(out)
}

/// Block program versus the −S ≤ T ≤ S program on random selfadjoint maps.
pub fn selfadjoint_forms(cfg: &LabConfig) -> Result<Outcome> {
    let mut r = cfg.stream(SELFADJOINT);
    let mut check = Check::new(
        "selfadjoint forms",
        "for selfadjoint T, ‖T‖_dec = min ‖S(1)‖ over S with S − T and S + T completely positive",
        cfg.tol(1e-6),
    );
    let trials = cfg.count(30);
    for k in 0..trials {
        let n = 2 + k % 2;
        let t = random_map(&mut r, n, n);
        let sa = t.add(&t.opposite())?.scale_real(0.5);
        let a = dec_norm_inf(&sa, &cfg.sdp)?.value;
        let b = dec_norm_selfadjoint(&sa, &cfg.sdp)?.value;
        check.record((a - b).abs(), || json!({ "block": a, "sandwich": b, "map": map_json(&sa) }));
    }
    let worst = check.worst();
    let mut out = Outcome::default();
    out.scalar("worst_difference", worst);
    out.assertions.push(check.finish(format!("{trials} random selfadjoint maps, worst |difference| {worst:.3e}")));
    Ok(out)
}

/// Schur and Fourier projections of random maps: idempotent, CP-preserving, cb-contractive.
pub fn projections(cfg: &LabConfig) -> Result<Outcome> {
    let mut r = cfg.stream(PROJECTIONS);
    let mut idem = Check::new("projection idempotent", "projecting a multiplier returns its own symbol", cfg.tol(1e-14));
    let mut cp = Check::new("projection keeps CP", "the projection of a completely positive map is completely positive", cfg.tol(1e-8));
    let mut cb = Check::new("projection cb-contractive", "the projection onto multipliers is a cb contraction", cfg.tol(1e-6));
    let klein = FiniteGroup::klein();
    let algebras = [
        GroupAlgebra::untwisted(FiniteGroup::cyclic(3)),
        GroupAlgebra::new(klein.clone(), TwoCocycle::klein_bicharacter(&klein)?)?,
        GroupAlgebra::untwisted(FiniteGroup::symmetric3()),
    ];
    let trials = cfg.count(30);
    for k in 0..trials {
        if k % 2 == 0 {
            let n = 3;
            let t = random_cp_map(&mut r, n, n, 2);
            let a = project_schur(&t)?;
            let m = schur_multiplier(&a)?;
            let again = project_schur(&m)?;
            idem.record(again.try_sub(&a)?.max_abs(), || json!({ "kind": "schur", "map": map_json(&t) }));
            let cert = m.cp_certificate(cp.tolerance());
            cp.record(-cert.lambda_min, || json!({ "kind": "schur", "lambda_min": cert.lambda_min, "map": map_json(&t) }));
            let g = random_map(&mut r, n, n);
            let pg = schur_multiplier(&project_schur(&g)?)?;
            let (lo, hi) = (cb_norm_inf(&pg, &cfg.sdp)?.value, cb_norm_inf(&g, &cfg.sdp)?.upper);
            cb.record(lo - hi, || json!({ "kind": "schur", "projected": lo, "original": hi, "map": map_json(&g) }));
        } else {
            let alg = &algebras[(k / 2) % algebras.len()];
            let n = alg.order();
            let h = cyclic_subgroup(alg.group(), index(&mut r, n));
            let t = random_cp_map(&mut r, n, n, 2);
            let phi = project_fourier(alg, &t, &h)?;
            let m = fourier_multiplier(alg, &phi)?;
            let again = project_fourier(alg, &m, &h)?;
            let diff = phi.iter().zip(&again).fold(0.0f64, |acc, (a, b)| acc.max((a - b).norm()));
            idem.record(diff, || json!({ "kind": "fourier", "order": n, "subgroup": h, "map": map_json(&t) }));
            let cert = m.cp_certificate(cp.tolerance());
            cp.record(-cert.lambda_min, || json!({ "kind": "fourier", "order": n, "subgroup": h, "lambda_min": cert.lambda_min, "map": map_json(&t) }));
            let g = random_map(&mut r, n, n);
            let pg = fourier_multiplier(alg, &project_fourier(alg, &g, &h)?)?;
            let (lo, hi) = (cb_norm_inf(&pg, &cfg.sdp)?.value, cb_norm_inf(&g, &cfg.sdp)?.upper);
            cb.record(lo - hi, || json!({ "kind": "fourier", "order": n, "subgroup": h, "projected": lo, "original": hi, "map": map_json(&g) }));
        }
    }
    let mut out = Outcome::default();
    out.scalar("worst_idempotence_defect", idem.worst());
    for c in [idem, cp, cb] {
        let worst = c.worst();
        out.assertions.push(c.finish(format!("{trials} maps (Schur on M_3, Fourier on Z_3, twisted Z_2×Z_2, S_3), worst {worst:.3e}")));
    }
    Ok(out)
}

/// Same symbol with and without a cocycle: same CP status, same cb norm.
pub fn cocycle_invariance(cfg: &LabConfig) -> Result<Outcome> {
    let mut r = cfg.stream(COCYCLE);
    let mut cp = Check::new("cocycle CP status", "a Fourier multiplier is CP on the twisted algebra exactly when it is CP untwisted", 0.0);
    let mut cb = Check::new("cocycle cb norm", "the cb norm of a Fourier multiplier does not depend on the cocycle", cfg.tol(1e-5));
    let klein = FiniteGroup::klein();
    let z4 = FiniteGroup::cyclic(4);
    let phases: Vec<C64> = (0..4).map(|_| C64::from_polar(1.0, uniform(&mut r, 0.0, std::f64::consts::TAU))).collect();
    let pairs = [
        ("klein", GroupAlgebra::untwisted(klein.clone()), GroupAlgebra::new(klein.clone(), TwoCocycle::klein_bicharacter(&klein)?)?),
        ("z4", GroupAlgebra::untwisted(z4.clone()), GroupAlgebra::new(z4.clone(), TwoCocycle::coboundary(&z4, &phases)?)?),
    ];
    let trials = cfg.count(20);
    let mut out = Outcome::default();
    let mut cp_count = 0usize;
    for (name, plain, twisted) in &pairs {
        let n = plain.order();
        let mut worst = 0.0f64;
        for k in 0..trials {
            let phi: Vec<C64> = match k % 3 {
                0 => positive_definite_complex(&mut r, plain),
                1 => (0..n).map(|_| complex_gaussian(&mut r)).collect(),
                // A positive definite symbol pushed slightly off the cone.
                _ => {
                    let mut v = positive_definite_complex(&mut r, plain);
                    let s = 1 + index(&mut r, n - 1);
                    v[s] += C64::new(0.3, 0.0);
                    v
                }
            };
            let a = fourier_multiplier(plain, &phi)?;
            let b = fourier_multiplier(twisted, &phi)?;
            let (ca, cb_) = (a.is_cp(1e-8), b.is_cp(1e-8));
            cp_count += usize::from(ca);
            let w = || json!({ "group": name, "symbol_re": phi.iter().map(|z| z.re).collect::<Vec<_>>(), "symbol_im": phi.iter().map(|z| z.im).collect::<Vec<_>>() });
            cp.record_bool(ca == cb_, || json!({ "untwisted_cp": ca, "twisted_cp": cb_, "instance": w() }));
            let (na, nb) = (cb_norm_inf(&a, &cfg.sdp)?.value, cb_norm_inf(&b, &cfg.sdp)?.value);
            worst = worst.max((na - nb).abs());
            cb.record((na - nb).abs(), || json!({ "untwisted": na, "twisted": nb, "instance": w() }));
        }
        out.scalar(format!("{name}_worst_cb_difference"), worst);
    }
    out.scalar("cp_symbols", cp_count as f64);
    out.assertions.push(cp.finish(format!("{trials} symbols on each of Z_2×Z_2 (bicharacter) and Z_4 (coboundary); {cp_count} CP")));
    let worst = cb.worst();
    out.assertions.push(cb.finish(format!("worst |difference| {worst:.3e}")));
    Ok(out)
}

/// dec of the Schur multiplier against the factorization program.
pub fn schur_dec_identity(cfg: &LabConfig) -> Result<Outcome> {
    let mut r = cfg.stream(SCHUR_DEC);
    let mut check = Check::new(
        "schur dec identity",
        "the decomposable norm of a Schur multiplier on M_n equals its cb norm",
        cfg.tol(1e-5),
    );
    let max_n = if cfg.quick { 4 } else { 8 };
    let trials = cfg.count(20);
    let mut table = Table::new(&["n", "dec", "schur", "difference"]);
    for k in 0..trials {
        let n = 2 + k % (max_n - 1);
        let a = random_matrix(&mut r, n, n);
        let d = dec_norm_inf(&schur_multiplier(&a)?, &cfg.sdp)?.value;
        let s = schur_cb_norm(&a, &cfg.sdp)?.value;
        table.push(vec![json!(n), json!(d), json!(s), json!(d - s)]);
        check.record((d - s).abs(), || json!({ "n": n, "dec": d, "schur": s, "symbol": a }));
    }
    let worst = check.worst();
    let mut out = Outcome::default();
    out.scalar("worst_difference", worst);
    out.tables.insert("schur_dec".into(), table);
    out.assertions.push(check.finish(format!("{trials} random complex symbols, n ≤ {max_n}, worst {worst:.3e}")));
    Ok(out)
}

/// Amplified lower bounds stay below the ∞-level dec norm; p = 2 is exact.
pub fn multiplier_estimates(cfg: &LabConfig) -> Result<Outcome> {
    let mut r = cfg.stream(ESTIMATES);
    let mut below = Check::new(
        "estimates below dec",
        "for multipliers, amplified Schatten p norms are bounded by the decomposable norm at p = ∞",
        cfg.tol(1e-6),
    );
    let mut exact = Check::new("p = 2 exact", "at p = 2 the norm is the top singular value of the Liouville matrix", cfg.tol(1e-9));
    let mut ps: Vec<Exponent> = [1.5, 2.0, 3.0].iter().map(|&p| Exponent::Finite(p)).collect();
    ps.push(Exponent::Infinity);
    if let Some(p) = cfg.p {
        if !ps.contains(&p) {
            ps.push(p);
        }
    }
    let d_max = if cfg.quick { 2 } else { 4 };
    let groups = [
        GroupAlgebra::untwisted(FiniteGroup::cyclic(3)),
        GroupAlgebra::untwisted(FiniteGroup::cyclic(4)),
        GroupAlgebra::untwisted(FiniteGroup::klein()),
    ];
    let trials = cfg.count(20);
    let mut table = Table::new(&["trial", "kind", "dim", "p", "d", "estimate", "dec"]);
    for k in 0..trials {
        let (kind, map, starts) = if k % 2 == 0 {
            let n = 2 + index(&mut r, 2);
            ("schur", schur_multiplier(&random_matrix(&mut r, n, n))?, Vec::new())
        } else {
            let alg = &groups[(k / 2) % groups.len()];
            let phi: Vec<C64> = (0..alg.order()).map(|_| complex_gaussian(&mut r)).collect();
            ("fourier", fourier_multiplier(alg, &phi)?, alg.lambdas().to_vec())
        };
        let dec = dec_norm_inf(&map, &cfg.sdp)?.value;
        let l = map.liouville();
        let oracle = herm_eig(&l.adjoint_matmul(&l))?.max().max(0.0).sqrt();
        let seed: u64 = r.random();
        for &p in &ps {
            for e in pq_norm_ladder(&map, p, d_max, cfg.restarts, seed, &starts)? {
                table.push(vec![json!(k), json!(kind), json!(map.in_dim()), json!(p.to_string()), json!(e.d), json!(e.value), json!(dec)]);
                below.record(e.value - dec, || json!({ "kind": kind, "p": p.to_string(), "d": e.d, "estimate": e.value, "dec": dec, "map": map_json(&map) }));
                if p == Exponent::Finite(2.0) {
                    exact.record((e.value - oracle).abs(), || json!({ "kind": kind, "d": e.d, "estimate": e.value, "oracle": oracle, "map": map_json(&map) }));
                }
            }
        }
    }
    let mut out = Outcome::default();
    out.tables.insert("estimates".into(), table);
    let (wb, we) = (below.worst(), exact.worst());
    out.scalar("worst_excess_over_dec", wb);
    out.scalar("worst_p2_error", we);
    out.assertions.push(below.finish(format!("{trials} multipliers, d ≤ {d_max}, worst excess {wb:.3e}")));
    out.assertions.push(exact.finish(format!("worst error {we:.3e}")));
    Ok(out)
}

/// The 2×2 block built from the entrywise modulus is CP.
pub fn modulus_blocks(cfg: &LabConfig) -> Result<Outcome> {
    let mut r = cfg.stream(MODULUS);
    let mut check = Check::new(
        "modulus block",
        "for a map between commutative algebras with matrix B, [[|B|, B], [B°, |B|]] is completely positive",
        cfg.tol(1e-8),
    );
    let trials = cfg.count(50);
    for _ in 0..trials {
        let (rows, cols) = (1 + index(&mut r, 6), 1 + index(&mut r, 6));
        let b = random_matrix(&mut r, rows, cols);
        let cert = modulus_block_check(&b, check.tolerance());
        check.record(-cert.lambda_min, || json!({ "lambda_min": cert.lambda_min, "matrix": b }));
    }
    let worst = check.worst();
    let mut out = Outcome::default();
    out.scalar("worst_negative_eigenvalue", worst.max(0.0));
    out.assertions.push(check.finish(format!("{trials} random complex B up to 6×6")));
    Ok(out)
}

/// Property (P) witnesses for real symbols of decomposable norm at most 1.
pub fn property_p_battery(cfg: &LabConfig) -> Result<Outcome> {
    let mut r = cfg.stream(PROPERTY_P);
    let mut pre = Check::new("property P precondition", "the sampled symbols have decomposable norm at most 1", cfg.tol(1e-6));
    let mut feasible = Check::new(
        "property P",
        "a real symbol of decomposable norm at most 1 extends to a unital CP selfadjoint 2×2 block multiplier",
        cfg.tol(1e-7),
    );
    let trials = cfg.count(20);
    let mut out = Outcome::default();
    for (name, g) in [("z4", FiniteGroup::cyclic(4)), ("s3", FiniteGroup::symmetric3())] {
        let alg = GroupAlgebra::untwisted(g);
        let mut worst_margin = f64::INFINITY;
        for _ in 0..trials {
            let phi = contractive_real_symbol(&mut r, &alg);
            let m = fourier_multiplier(&alg, &real(&phi))?;
            let d = dec_norm_inf(&m, &cfg.sdp)?.value;
            pre.record(d - 1.0, || json!({ "group": name, "symbol": phi, "dec": d }));
            match property_p_witness(&alg, &phi, &cfg.sdp) {
                Ok(w) => {
                    // Independent check of the returned witness.
                    let block = BlockMap::new(&fourier_multiplier(&alg, &real(&w.psi1))?, &m, &fourier_multiplier(&alg, &real(&w.psi2))?)?;
                    let lmin = block.cp_certificate(feasible.tolerance()).lambda_min;
                    worst_margin = worst_margin.min(lmin);
                    feasible.record(-lmin, || json!({ "group": name, "symbol": phi, "psi1": w.psi1, "psi2": w.psi2, "lambda_min": lmin }));
                }
                Err(Error::Infeasible) => {
                    feasible.record(f64::INFINITY, || json!({ "group": name, "symbol": phi, "dec": d, "error": "infeasible" }));
                }
                Err(e) => return Err(e),
            }
        }
        out.scalar(format!("{name}_worst_block_eigenvalue"), worst_margin);
    }
    out.assertions.push(pre.finish(format!("{trials} symbols a·ψ1 − b·ψ2 (a + b ≤ 1) on each of Z_4 and S_3")));
    out.assertions.push(feasible.finish("witness block Choi matrix checked independently"));
    Ok(out)
}

fn random_polynomial(r: &mut LabRng) -> Result<Polynomial> {
    let degree = 1 + index(r, 6);
    let mut c: Vec<C64> = (0..=degree).map(|_| complex_gaussian(r)).collect();
    if c[degree].norm() < 1e-3 {
        c[degree] = C64::new(1.0, 0.0);
    }
    Polynomial::new(c)
}

/// P(M_φ) against sup |P| on the circle, for contractively decomposable real φ.
pub fn matsaev_battery(cfg: &LabConfig) -> Result<Outcome> {
    let mut r = cfg.stream(MATSAEV);
    let mut spectral = Check::new(
        "matsaev spectral",
        "max_s |P(φ(s))| ≤ sup_{|z| = 1} |P(z)| for a contractively decomposable real symbol",
        cfg.tol(1e-8),
    );
    let mut operator = Check::new("matsaev operator", "‖P(M_φ)‖ on L² is at most sup_{|z| = 1} |P(z)|", cfg.tol(1e-8));
    let groups = [
        ("z3", GroupAlgebra::untwisted(FiniteGroup::cyclic(3))),
        ("z4", GroupAlgebra::untwisted(FiniteGroup::cyclic(4))),
        ("s3", GroupAlgebra::untwisted(FiniteGroup::symmetric3())),
    ];
    let truncation = if cfg.quick { 8 } else { 16 };
    let extra = cfg.p.filter(|&p| p != Exponent::Finite(2.0));
    let trials = cfg.count(50);
    let mut table = Table::new(&["trial", "group", "degree", "p", "lhs_d1", "lhs_d2", "spectral", "rhs_circle", "rhs_shift", "margin"]);
    for k in 0..trials {
        let (name, alg) = &groups[k % groups.len()];
        let phi = contractive_real_symbol(&mut r, alg);
        let poly = random_polynomial(&mut r)?;
        let seed: u64 = r.random();
        let mut ps = vec![Exponent::Finite(2.0)];
        ps.extend(extra);
        for p in ps {
            let rep = matsaev_check(alg, &phi, &poly, p, truncation, cfg.restarts, seed)?;
            table.push(vec![
                json!(k),
                json!(name),
                json!(poly.degree()),
                json!(p.to_string()),
                json!(rep.lhs[0]),
                json!(rep.lhs[1]),
                json!(rep.spectral),
                json!(rep.rhs_p2),
                json!(rep.rhs_pn),
                json!(rep.margin),
            ]);
            if p == Exponent::Finite(2.0) {
                let w = || json!({ "group": name, "symbol": phi, "poly_re": poly.coeffs().iter().map(|z| z.re).collect::<Vec<_>>(), "poly_im": poly.coeffs().iter().map(|z| z.im).collect::<Vec<_>>(), "report": rep });
                spectral.record(rep.spectral - rep.rhs_p2, w);
                operator.record(rep.lhs[0].max(rep.lhs[1]) - rep.rhs_p2, w);
            }
        }
    }
    let mut out = Outcome::default();
    out.tables.insert("matsaev".into(), table);
    let (ws, wo) = (spectral.worst(), operator.worst());
    out.scalar("worst_spectral_excess", ws);
    out.scalar("worst_operator_excess", wo);
    out.assertions.push(spectral.finish(format!("{trials} pairs, degree ≤ 6, on Z_3, Z_4, S_3")));
    out.assertions.push(operator.finish(format!("amplification degrees 1 and 2, worst excess {wo:.3e}")));
    Ok(out)
}

/// Growth of the triangular truncation and its limit criterion.
pub fn truncation_battery(cfg: &LabConfig) -> Result<Outcome> {
    let ns: &[usize] = if cfg.quick { &[2, 4, 8, 16] } else { &[2, 4, 8, 16, 32, 64] };
    let rows = truncation_growth(ns, &cfg.sdp)?;
    let mut incr = Check::new("truncation increasing", "the norm of the triangular truncation on M_n increases with n", 0.0);
    let mut bound = Check::new("truncation bound", "‖M_A‖ on M_n is at most n^{1/2}·max|a_ij|", 0.0);
    let mut table = Table::new(&["n", "value", "bound", "within_bound", "increasing", "iterations"]);
    for row in &rows {
        table.push(vec![json!(row.n), json!(row.value), json!(row.bound), json!(row.within_bound), json!(row.increasing), json!(row.iterations)]);
        incr.record_bool(row.increasing, || json!(row));
        bound.record_bool(row.within_bound, || json!(row));
    }
    let n = *ns.last().expect("nonempty");
    let tail: Vec<usize> = (n - 4..n).collect();
    let crit = schur_limit_criterion(&triangular_symbol(n), &tail, &tail)?;
    let mut limit = Check::new("limit criterion", "the iterated limits of the triangular symbol differ by 1", cfg.tol(1e-12));
    limit.record((crit.gap - 1.0).abs(), || json!(crit));
    let mut out = Outcome::default();
    for row in &rows {
        out.scalar(format!("n{}", row.n), row.value);
    }
    out.scalar("limit_gap", crit.gap);
    out.tables.insert("truncation".into(), table);
    out.assertions.push(incr.finish(format!("n ∈ {ns:?}")));
    out.assertions.push(bound.finish(format!("n ∈ {ns:?}")));
    out.assertions.push(limit.finish(format!("tails {tail:?} of the {n}×{n} symbol")));
    Ok(out)
}
