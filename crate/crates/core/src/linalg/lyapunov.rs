use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::system::Domain;

fn pencil_eigenvalues(a: &DMatrix<f64>, e: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let k = a.nrows();
    let einv = e
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularBlock("E22 is singular".into()))?;
    let m = einv * a;
    if k == 1 {
        return Ok(vec![Complex64::new(m[(0, 0)], 0.0)]);
    }
    let half_tr = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = Complex64::new(half_tr * half_tr - det, 0.0).sqrt();
    Ok(vec![half_tr + disc, half_tr - disc])
}

/// Applies the Lyapunov (continuous) or Stein (discrete) operator to a symmetric `Y`.
fn lyap_op(a: &DMatrix<f64>, e: &DMatrix<f64>, y: &DMatrix<f64>, domain: Domain) -> DMatrix<f64> {
    match domain {
        Domain::Continuous => a * y * e.transpose() + e * y * a.transpose(),
        Domain::Discrete => a * y * a.transpose() - e * y * e.transpose(),
    }
}

/// Upper triangular `S` with `Y = S·Sᵀ` solving
/// `A·Y·Eᵀ + E·Y·Aᵀ = B·Bᵀ` (continuous) or `A·Y·Aᵀ − E·Y·Eᵀ = B·Bᵀ` (discrete)
/// for an antistable `1×1` or `2×2` pencil.
pub fn sqrt_lyapunov(
    a: &DMatrix<f64>,
    e: &DMatrix<f64>,
    b: &DMatrix<f64>,
    domain: Domain,
) -> Result<DMatrix<f64>> {
    let k = a.nrows();
    if !(1..=2).contains(&k) || a.shape() != e.shape() || b.nrows() != k {
        return Err(Error::DimensionMismatch(format!(
            "Lyapunov block must be 1x1 or 2x2, got A {:?}, E {:?}, B {:?}",
            a.shape(),
            e.shape(),
            b.shape()
        )));
    }
    for lambda in pencil_eigenvalues(a, e)? {
        let antistable = match domain {
            Domain::Continuous => lambda.re > 0.0,
            Domain::Discrete => lambda.norm() > 1.0,
        };
        if !antistable {
            return Err(Error::BoundaryEigenvalue(format!(
                "eigenvalue {lambda} is not strictly unstable"
            )));
        }
    }
    let bbt = b * b.transpose();
    if k == 1 {
        let (a, e) = (a[(0, 0)], e[(0, 0)]);
        let denom = match domain {
            Domain::Continuous => 2.0 * a * e,
            Domain::Discrete => a * a - e * e,
        };
        let y = bbt[(0, 0)] / denom;
        return Ok(DMatrix::from_element(1, 1, y.max(0.0).sqrt()));
    }
    // Symmetric unknowns (y11, y12, y22).
    let basis = [
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]),
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]),
    ];
    let mut op = Matrix3::<f64>::zeros();
    for (j, yb) in basis.iter().enumerate() {
        let l = lyap_op(a, e, yb, domain);
        op[(0, j)] = l[(0, 0)];
        op[(1, j)] = l[(0, 1)];
        op[(2, j)] = l[(1, 1)];
    }
    let rhs = Vector3::new(bbt[(0, 0)], bbt[(0, 1)], bbt[(1, 1)]);
    let sol = op
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::BoundaryEigenvalue("Lyapunov operator is singular".into()))?;
    let (y11, y12, y22) = (sol[0], sol[1], sol[2]);
    let s22 = y22.max(0.0).sqrt();
    let s12 = if s22 > 0.0 { y12 / s22 } else { 0.0 };
    let s11 = (y11 - s12 * s12).max(0.0).sqrt();
    Ok(DMatrix::from_row_slice(2, 2, &[s11, s12, 0.0, s22]))
}

/// Relative residual of the Lyapunov/Stein equation at `Y = S·Sᵀ`.
pub fn lyapunov_residual(
    a: &DMatrix<f64>,
    e: &DMatrix<f64>,
    b: &DMatrix<f64>,
    s: &DMatrix<f64>,
    domain: Domain,
) -> f64 {
    let y = s * s.transpose();
    let bbt = b * b.transpose();
    let r = lyap_op(a, e, &y, domain) - &bbt;
    let scale = bbt.norm() + 2.0 * a.norm() * e.norm().max(a.norm()) * y.norm();
    r.norm() / scale.max(f64::MIN_POSITIVE)
}

/// `R'` upper triangular with `R'ᵀR' = RᵀR + XᵀX`, one Givens sweep per row of `X`.
pub fn cholesky_update(r: &DMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
    let m = r.nrows();
    let mut r = r.clone();
    for row in x.row_iter() {
        let mut v: Vec<f64> = row.iter().copied().collect();
        for k in 0..m {
            let rkk = r[(k, k)];
            let h = rkk.hypot(v[k]);
            if h == 0.0 {
                continue;
            }
            let (c, s) = (rkk / h, v[k] / h);
            r[(k, k)] = h;
            v[k] = 0.0;
            for j in (k + 1)..m {
                let (rkj, vj) = (r[(k, j)], v[j]);
                r[(k, j)] = c * rkj + s * vj;
                v[j] = c * vj - s * rkj;
            }
        }
    }
    r
}
