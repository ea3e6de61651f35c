use nalgebra::DMatrix;

use super::reverse_cols;

#[derive(Debug, Clone)]
pub struct ColumnCompression {
    /// Orthogonal `Z1` with `E·Z1 = [0 | E2]`.
    pub z: DMatrix<f64>,
    pub rank: usize,
}

/// Orthogonal `Z1` such that `E·Z1 = [0 | E2]`, `E2` of full column rank.
///
/// Uses the right singular vectors in reverse order, so the null space of `E`
/// comes first.
pub fn column_compress(e: &DMatrix<f64>, rank_tol: f64) -> ColumnCompression {
    compress_columns(e, |top| rank_tol * top)
}

/// As [`column_compress`] with an absolute singular value threshold.
pub(crate) fn column_compress_abs(e: &DMatrix<f64>, threshold: f64) -> ColumnCompression {
    compress_columns(e, |_| threshold)
}

fn compress_columns(e: &DMatrix<f64>, threshold: impl Fn(f64) -> f64) -> ColumnCompression {
    let n = e.ncols();
    if n == 0 {
        return ColumnCompression {
            z: DMatrix::zeros(0, 0),
            rank: 0,
        };
    }
    let svd = super::lapack::gesvd(e, true);
    let sv = svd.s.as_slice();
    let top = sv.iter().copied().fold(0.0, f64::max);
    let thr = threshold(top);
    let rank = if top == 0.0 {
        0
    } else {
        sv.iter().filter(|&&s| s > thr).count()
    };
    let v = svd.vt.transpose();
    ColumnCompression {
        z: reverse_cols(&v),
        rank,
    }
}

/// Orthogonal `U` (square) with `U·E = [E1; 0]`, `E1` of full row rank, using an
/// absolute singular value threshold. Returns `(U, rank)`.
pub fn row_compress_full_rank(e: &DMatrix<f64>, threshold: f64) -> (DMatrix<f64>, usize) {
    let c = column_compress_abs(&e.transpose(), threshold);
    // Eᵀ·Z = [0 | X] gives Zᵀ·E = [0; Xᵀ]; reversing the rows moves the zeros to the bottom.
    let zt = super::reverse_rows(&c.z.transpose());
    (zt, c.rank)
}
