//! Dense and sparse complex linear algebra used by the norm algorithms.
//!
//! Everything here is written against `alloc` only, so the core crate stays
//! usable without `std`.

mod arnoldi;
mod dense;
pub mod eig;
mod lu;
mod sparse;
mod svd;

pub type C64 = num_complex::Complex64;

pub use arnoldi::shift_invert_ritz_values;
pub use dense::{abs1, dotc, norm2, normalize, CMat};
pub use eig::{eigenvalues, generalized_eigenvalues, inverse_iteration, GenEig};
pub use lu::Lu;
pub use sparse::{CscMatrix, SparseLu};
pub use svd::{largest_triplet, smallest_singular_value, spectral_norm, Svd};
