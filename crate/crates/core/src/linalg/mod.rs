//! Dense complex linear algebra.

pub mod eig;
pub mod factor;
pub mod matrix;
pub mod norms;
pub mod svd;
pub mod tensor;

pub use eig::{herm_eig, herm_eig_fast, herm_eigenvalues_fast, lambda_min, Spectrum};
pub use factor::{cholesky, hpd_inverse, lower_inverse, lu_solve, modulus, psd_sqrt};
pub use matrix::{ComplexMatrix, MatrixFile, C64, I, ONE, ZERO};
pub use norms::{schatten_norm, schatten_norm_f64, vector_p_norm, Exponent};
pub use svd::{singular_values, spectral_norm, svd, Svd};
pub use tensor::{kron, partial_trace, partial_transpose_second, swap_operator, Side};
