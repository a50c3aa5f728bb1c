//! Numerical laboratory for decomposable, completely bounded and Schatten
//! norms of linear maps on matrix algebras and finite twisted group algebras.

pub mod error;
pub mod group;
pub mod lab;
pub mod linalg;
pub mod pnorm;
pub mod random;
pub mod sdp;
pub mod superop;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Exponent, Spectrum, C64};
pub use superop::{BlockMap, CpCertificate, SuperOperator};
