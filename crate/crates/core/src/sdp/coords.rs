//! Orthonormal real coordinates on Herm(d): Z_ii, then √2·Re Z_ij and
//! √2·Im Z_ij for i < j. With these, ⟨Z, W⟩ = Re tr(Z W) is the dot product.

use std::f64::consts::SQRT_2;

use crate::linalg::{ComplexMatrix, C64};

pub fn herm_dim(d: usize) -> usize {
    d * d
}

/// Basis element k of Herm(d) as (i, j, kind): kind 0 diagonal, 1 real pair, 2 imaginary pair.
pub fn basis_index(d: usize, k: usize) -> (usize, usize, u8) {
    if k < d {
        return (k, k, 0);
    }
    let mut r = k - d;
    for i in 0..d {
        let span = 2 * (d - i - 1);
        if r < span {
            let j = i + 1 + r / 2;
            return (i, j, 1 + (r % 2) as u8);
        }
        r -= span;
    }
    panic!("coordinate {k} out of range for Herm({d})");
}

/// Nonzero entries (row, col, value) of basis element k.
pub fn basis_entries(d: usize, k: usize) -> Vec<(usize, usize, C64)> {
    let s = 1.0 / SQRT_2;
    match basis_index(d, k) {
        (i, _, 0) => vec![(i, i, C64::new(1.0, 0.0))],
        (i, j, 1) => vec![(i, j, C64::new(s, 0.0)), (j, i, C64::new(s, 0.0))],
        (i, j, _) => vec![(i, j, C64::new(0.0, s)), (j, i, C64::new(0.0, -s))],
    }
}

pub fn basis_matrix(d: usize, k: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for (i, j, v) in basis_entries(d, k) {
        m[(i, j)] = v;
    }
    m
}

/// Appends coordinates of the Hermitian part of z.
pub fn push_coords(z: &ComplexMatrix, out: &mut Vec<f64>) {
    let d = z.rows();
    for i in 0..d {
        out.push(z[(i, i)].re);
    }
    for i in 0..d {
        for j in i + 1..d {
            let v = (z[(i, j)] + z[(j, i)].conj()) * 0.5;
            out.push(SQRT_2 * v.re);
            out.push(SQRT_2 * v.im);
        }
    }
}

pub fn to_coords(z: &ComplexMatrix) -> Vec<f64> {
    let mut v = Vec::with_capacity(z.rows() * z.rows());
    push_coords(z, &mut v);
    v
}

pub fn from_coords(c: &[f64], d: usize) -> ComplexMatrix {
    assert_eq!(c.len(), d * d);
    let mut z = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        z[(i, i)] = C64::new(c[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in i + 1..d {
            let v = C64::new(c[k], c[k + 1]) / SQRT_2;
            z[(i, j)] = v;
            z[(j, i)] = v.conj();
            k += 2;
        }
    }
    z
}
