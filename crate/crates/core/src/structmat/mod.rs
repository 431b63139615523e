//! Accurate kernels for structured matrix classes: Cauchy, Vandermonde,
//! diagonally dominant M-matrices, scaled totally unimodular matrices,
//! acyclic sparsity, totally nonnegative bidiagonal decompositions and
//! Green's matrices.

mod acyclic;
mod bidiag;
mod cauchy;
mod dstu;
mod greens;
mod mmatrix;
mod vandermonde;

pub use acyclic::{acyclic_minor, AcyclicMatrix};
pub use bidiag::{bd_assemble, bd_det, bd_from_matrix_exact, BidiagDecomp};
pub use cauchy::{cauchy_det, cauchy_gecp_ldu, cauchy_inverse, cauchy_inverse_values, CauchyParams};
pub use dstu::{dstu_ge, is_totally_unimodular, DstuMatrix, DstuPivot};
pub use greens::{det2_box, greens_minor, greens_minor_dag, GreensParams};
pub use mmatrix::{mmatrix_ldu, MMatrixParams, MPivot};
pub use vandermonde::{schur_function, vandermonde_bp_solve, vandermonde_det, vandermonde_minor, VandermondeParams};

use crate::exprdag::DagError;

/// Largest partition weight accepted by the Schur function evaluator.
pub const MAX_SCHUR_WEIGHT: u32 = 30;

/// Largest order for which total unimodularity is verified by enumeration.
pub const MAX_TU_CHECK: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructError {
    #[error("entry ({i}, {j}) is undefined (x_i + y_j = 0)")]
    EntryUndefined { i: usize, j: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("pivot {step} is zero")]
    SingularPivot { step: usize },
    #[error("zero pivot at step {step} without pivoting")]
    ZeroPivot { step: usize },
    #[error("matrix must be square")]
    NotSquare,
    #[error("bad index set: {0}")]
    BadIndexSet(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bipartite graph of the sparsity pattern has a cycle")]
    NotAcyclic,
    #[error("matrix is not totally nonnegative")]
    NotTotallyNonnegative,
    #[error("matrix is not totally unimodular")]
    NotTotallyUnimodular,
    #[error("total unimodularity cannot be checked for n > {MAX_TU_CHECK}; pass trusted = true")]
    TooLargeToVerify,
    #[error("partition weight {0} exceeds {MAX_SCHUR_WEIGHT}")]
    SchurTooLarge(u32),
    #[error("parameter must be nonnegative: {0}")]
    NegativeParameter(String),
    #[error(transparent)]
    Dag(#[from] DagError),
}

/// Sorted, duplicate-free, in-range index set.
pub(crate) fn check_index_set(idx: &[usize], bound: usize, what: &str) -> Result<Vec<usize>, StructError> {
    let mut v = idx.to_vec();
    v.sort_unstable();
    if v.windows(2).any(|w| w[0] == w[1]) {
        return Err(StructError::BadIndexSet(format!("repeated {what} index")));
    }
    if v.last().is_some_and(|&m| m >= bound) {
        return Err(StructError::BadIndexSet(format!("{what} index out of range")));
    }
    Ok(v)
}

pub(crate) fn check_minor_sets(
    rows: &[usize],
    cols: &[usize],
    nrows: usize,
    ncols: usize,
) -> Result<(Vec<usize>, Vec<usize>), StructError> {
    if rows.len() != cols.len() {
        return Err(StructError::BadIndexSet("row and column sets differ in size".into()));
    }
    Ok((check_index_set(rows, nrows, "row")?, check_index_set(cols, ncols, "column")?))
}
