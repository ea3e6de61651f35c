use nalgebra::DMatrix;

use super::{full_qr, reverse_cols, reverse_rows, row_compress_full_rank};
use crate::error::{Error, Result};

/// `Q·(A − λE)·Z` with a leading finite block and a trailing upper-triangular
/// infinite block whose `E` part is nilpotent.
#[derive(Debug, Clone)]
pub struct FiniteInfiniteSplit {
    pub q: DMatrix<f64>,
    pub z: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub e: DMatrix<f64>,
    pub n_finite: usize,
    pub n_infinite: usize,
}

/// Separates the finite and infinite eigenvalues of a regular pencil by a row staircase
/// on `E`: each step row-compresses the leading `E` block, then makes the exposed rows of
/// `A` upper triangular on the trailing columns.
pub fn finite_infinite_split(
    a: &DMatrix<f64>,
    e: &DMatrix<f64>,
    rank_tol: f64,
) -> Result<FiniteInfiniteSplit> {
    let n = a.nrows();
    let mut a = a.clone();
    let mut e = e.clone();
    let mut q = DMatrix::<f64>::identity(n, n);
    let mut z = DMatrix::<f64>::identity(n, n);
    let scale = a.norm().max(e.norm()).max(f64::MIN_POSITIVE);
    let e_scale = e.norm();
    let mut k = n;
    while k > 0 {
        let e11 = e.view((0, 0), (k, k)).clone_owned();
        let (u, rho) = row_compress_full_rank(&e11, rank_tol * e_scale);
        let nu = k - rho;
        if nu == 0 {
            break;
        }
        super::apply_rows(&mut a, 0, &u);
        super::apply_rows(&mut e, 0, &u);
        super::apply_rows(&mut q, 0, &u);
        for r in rho..k {
            for c in 0..k {
                e[(r, c)] = 0.0;
            }
        }
        // Rows rho..k of A restricted to columns 0..k: find Zw with J·A2·Zw = [0 | T].
        let a2 = a.view((rho, 0), (nu, k)).clone_owned();
        let (qq, _) = full_qr(&a2.transpose());
        let zw = reverse_cols(&qq);
        let flip = reverse_rows(&DMatrix::<f64>::identity(nu, nu));
        super::apply_rows(&mut a, rho, &flip);
        super::apply_rows(&mut e, rho, &flip);
        super::apply_rows(&mut q, rho, &flip);
        super::apply_cols(&mut a, 0, &zw);
        super::apply_cols(&mut e, 0, &zw);
        super::apply_cols(&mut z, 0, &zw);
        for r in rho..k {
            for c in 0..r {
                a[(r, c)] = 0.0;
            }
            if a[(r, r)].abs() <= rank_tol * scale {
                return Err(Error::SingularPencil);
            }
        }
        for r in rho..k {
            for c in 0..k {
                e[(r, c)] = 0.0;
            }
        }
        k = rho;
    }
    Ok(FiniteInfiniteSplit {
        q,
        z,
        a,
        e,
        n_finite: k,
        n_infinite: n - k,
    })
}
