//! Higher-order and mixed partial derivatives of matrix functions.
//!
//! Given a matrix path `A(x)` described by its partial derivatives at a
//! point ([`PathJet`]) and a matrix function `f`, the crate computes
//! `∂^α f(A(x))` by several independent routes:
//!
//! - [`blocktri`]: exact, from one evaluation of `f` on a block upper
//!   triangular matrix, or as a sum of higher-order Fréchet derivatives;
//! - [`divdiff`]: divided-difference formulas for Hermitian paths;
//! - [`cstep`]: complex-step, multicomplex-step, hybrid and finite-difference
//!   approximations;
//! - [`qperturb`]: closed forms for density-matrix response and eigenvector
//!   corrections of a Hermitian operator.
//!
//! Dense complex linear algebra (matrix type, exponential, Hermitian
//! eigensolver, text format) lives in the remaining modules.

pub mod blocks;
pub mod blocktri;
pub mod cstep;
pub mod divdiff;
pub mod eig;
pub mod error;
pub mod expm;
pub mod function;
mod lu;
pub mod matrix;
pub mod multiindex;
pub mod qperturb;
pub mod textio;

pub use blocktri::{
    build_xk, frechet_via_blocktri, graph_recursion, longest_path, partial_via_blocktri, partial_via_frechet_sum,
    DerivativeRequest, PathJet,
};
pub use eig::{hermitian_eig, SpectralDecomp};
pub use error::{Error, Result};
pub use expm::{matrix_cos, matrix_exp, matrix_sin};
pub use function::{MatrixFunction, ScalarFunction, Spectral, StemFunction};
pub use matrix::{ComplexMatrix, C64};
pub use multiindex::{s_partitions, t_permutations, MultiIndex, PartitionMultiset};
