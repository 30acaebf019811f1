//! α-circulant and α-Toeplitz matrices: construction, closed-form singular
//! values checked against a Jacobi SVD oracle, singular value distribution
//! experiments, and multigrid projection spectra.

pub mod dense;
pub mod distribution;
pub mod error;
pub mod index;
pub mod multigrid;
pub mod rng;
pub mod spectra;
pub mod structured;
pub mod symbols;
pub mod verify;

pub use dense::{DenseMatrix, MatrixKind, StructuredMatrix, C64};
pub use error::{Error, Result};
pub use index::MultiIndex;
pub use symbols::SymbolSpec;
