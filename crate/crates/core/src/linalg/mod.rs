//! Dense orthogonal kernels: compressions, generalized Schur forms and block swaps,
//! staircase separation, and the small Lyapunov solves.

mod compress;
pub(crate) mod lapack;
mod lyapunov;
mod schur;
mod staircase;

use nalgebra::DMatrix;

pub use compress::{column_compress, row_compress_full_rank, ColumnCompression};
pub use lyapunov::{cholesky_update, lyapunov_residual, sqrt_lyapunov};
pub(crate) use schur::{
    block_eigenvalues, blocks_from_alphai, clean_structure, standardize_window, swap_window, Window,
};
pub use schur::{grsf, reorder_blocks, Eigenvalue, SchurPair};
pub use staircase::{finite_infinite_split, FiniteInfiniteSplit};

/// `P·Mᵀ·P` with `P` the secondary-diagonal permutation.
pub fn pertranspose(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    DMatrix::from_fn(c, r, |i, j| m[(r - 1 - j, c - 1 - i)])
}

/// Rows `start..start+q.nrows()` of `m` are replaced by `q · rows`.
pub(crate) fn apply_rows(m: &mut DMatrix<f64>, start: usize, q: &DMatrix<f64>) {
    let k = q.nrows();
    if k == 0 || m.ncols() == 0 {
        return;
    }
    let block = m.rows(start, k).clone_owned();
    m.rows_mut(start, k).copy_from(&(q * block));
}

/// Columns `start..start+z.ncols()` of `m` are replaced by `cols · z`.
pub(crate) fn apply_cols(m: &mut DMatrix<f64>, start: usize, z: &DMatrix<f64>) {
    let k = z.ncols();
    if k == 0 || m.nrows() == 0 {
        return;
    }
    let block = m.columns(start, k).clone_owned();
    m.columns_mut(start, k).copy_from(&(block * z));
}

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    lapack::gesvd(m, false).s
}

/// Singular values of a complex matrix in decreasing order.
pub fn complex_singular_values(m: &DMatrix<num_complex::Complex64>) -> Vec<f64> {
    lapack::zgesvd_values(m)
}

/// `‖QᵀQ − I‖_F`.
pub fn orthogonality_error(q: &DMatrix<f64>) -> f64 {
    let n = q.ncols();
    (q.transpose() * q - DMatrix::<f64>::identity(n, n)).norm()
}

/// Full `n×n` orthogonal factor of a QR decomposition of `a` (`n×k`, `k ≤ n`),
/// with `Qᵀ·a = [R; 0]`.
pub(crate) fn full_qr(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let k = a.ncols();
    let mut padded = DMatrix::<f64>::zeros(n, n);
    padded
        .columns_mut(0, k.min(n))
        .copy_from(&a.columns(0, k.min(n)));
    let qr = padded.qr();
    let q = qr.q();
    let r = q.transpose() * a;
    (q, r)
}

/// Columns of `m` in reverse order.
pub(crate) fn reverse_cols(m: &DMatrix<f64>) -> DMatrix<f64> {
    let c = m.ncols();
    DMatrix::from_fn(m.nrows(), c, |i, j| m[(i, c - 1 - j)])
}

/// Rows of `m` in reverse order.
pub(crate) fn reverse_rows(m: &DMatrix<f64>) -> DMatrix<f64> {
    let r = m.nrows();
    DMatrix::from_fn(r, m.ncols(), |i, j| m[(r - 1 - i, j)])
}
