//! Seeded generators for test and experiment data. Everything random in the
//! crate is drawn through a `ChaCha8Rng` built from an explicit seed and stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, C64};
use crate::superop::SuperOperator;

pub type LabRng = ChaCha8Rng;

pub fn rng(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded by `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> LabRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian(r: &mut LabRng) -> f64 {
    r.sample(StandardNormal)
}

/// Standard complex Gaussian (E|z|² = 1).
pub fn complex_gaussian(r: &mut LabRng) -> C64 {
    C64::new(gaussian(r), gaussian(r)) * std::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre matrix with unit-variance complex entries.
pub fn random_matrix(r: &mut LabRng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(r))
}

pub fn random_real_matrix(r: &mut LabRng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| C64::new(gaussian(r), 0.0))
}

pub fn random_hermitian(r: &mut LabRng, n: usize) -> ComplexMatrix {
    random_matrix(r, n, n).hermitian_part()
}

/// G G* with G of shape n x rank.
pub fn random_psd(r: &mut LabRng, n: usize, rank: usize) -> ComplexMatrix {
    let g = random_matrix(r, n, rank);
    g.matmul_adjoint(&g)
}

/// Haar-distributed unitary from QR of a Ginibre matrix.
pub fn random_unitary(r: &mut LabRng, n: usize) -> ComplexMatrix {
    let g = random_matrix(r, n, n);
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for b in &q {
                let p: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= p * bi;
                }
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        q.push(v.into_iter().map(|z| z / nrm).collect());
    }
    ComplexMatrix::from_fn(n, n, |i, j| q[j][i])
}

pub fn random_unit_vector(r: &mut LabRng, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| complex_gaussian(r)).collect();
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / nrm).collect()
}

/// Map with Choi matrix of independent Gaussian entries (generally neither CP
/// nor selfadjoint).
pub fn random_map(r: &mut LabRng, n: usize, m: usize) -> SuperOperator {
    let scale = 1.0 / ((n * m) as f64).sqrt();
    SuperOperator::from_choi(n, m, random_matrix(r, n * m, n * m).scale_real(scale)).expect("shape")
}

/// CP map x ↦ Σ K_i x K_i* with `kraus` Gaussian Kraus operators.
pub fn random_cp_map(r: &mut LabRng, n: usize, m: usize, kraus: usize) -> SuperOperator {
    let scale = 1.0 / ((n * kraus) as f64).sqrt();
    let ks: Vec<ComplexMatrix> = (0..kraus).map(|_| random_matrix(r, m, n).scale_real(scale)).collect();
    SuperOperator::from_kraus(&ks).expect("shape")
}

pub fn uniform(r: &mut LabRng, lo: f64, hi: f64) -> f64 {
    r.random_range(lo..hi)
}

pub fn index(r: &mut LabRng, n: usize) -> usize {
    r.random_range(0..n)
}
