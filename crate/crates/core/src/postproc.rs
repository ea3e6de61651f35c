//! Removal of non-dynamic modes, minimal denominator realizations, and left factorizations
//! through the dual system.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::factors::{DislocationLog, LeftFactorRealization, StackedFactorRealization};
use crate::grcf::{grcf_with, GrcfOptions};
use crate::grcfid::grcfid_with;
use crate::linalg::pertranspose;
use crate::region::{RegionSpec, Tolerances};
use crate::system::DescriptorSystem;

/// Eliminates the leading simple infinite eigenvalues by residualization.
pub fn eliminate_nondynamic(f: &StackedFactorRealization) -> Result<StackedFactorRealization> {
    let k = f.n_nondynamic;
    if k == 0 {
        return Ok(f.clone());
    }
    let n = f.order();
    let r = n - k;
    let a_inf = f.a.view((0, 0), (k, k)).clone_owned();
    let a12 = f.a.view((0, k), (k, r)).clone_owned();
    let e12 = f.e.view((0, k), (k, r)).clone_owned();
    let a22 = f.a.view((k, k), (r, r)).clone_owned();
    let e22 = f.e.view((k, k), (r, r)).clone_owned();
    let b1 = f.b.rows(0, k).clone_owned();
    let b2 = f.b.rows(k, r).clone_owned();

    let (x_a, x_b) = if r > 0 {
        let lu = e22.clone().lu();
        let singular = || Error::SingularBlock("E22 of the dynamic part is singular".into());
        (
            lu.solve(&a22).ok_or_else(singular)?,
            lu.solve(&b2).ok_or_else(singular)?,
        )
    } else {
        (DMatrix::zeros(0, 0), DMatrix::zeros(0, f.inputs()))
    };
    let rhs_a = &a12 - &e12 * &x_a;
    let rhs_b = &b1 - &e12 * &x_b;
    let singular = || Error::SingularBlock("A_inf is singular".into());
    let t1 = a_inf.solve_upper_triangular(&rhs_a).ok_or_else(singular)?;
    let t2 = a_inf.solve_upper_triangular(&rhs_b).ok_or_else(singular)?;

    let cn1 = f.cn.columns(0, k);
    let cm1 = f.cm.columns(0, k);
    Ok(StackedFactorRealization {
        cn: f.cn.columns(k, r) - cn1 * &t1,
        dn: &f.dn - cn1 * &t2,
        cm: f.cm.columns(k, r) - cm1 * &t1,
        dm: &f.dm - cm1 * &t2,
        a: a22,
        e: e22,
        b: b2,
        domain: f.domain,
        n_nondynamic: 0,
        den_degree: f.den_degree,
    })
}

/// Number of leading columns of `C̃_M` that are numerically zero, moved back so that no
/// `2×2` diagonal block is split.
pub fn denominator_split(f: &StackedFactorRealization, rank_tol: f64) -> usize {
    let n = f.order();
    let thr = rank_tol * f.cm.norm();
    let mut split = (0..n).find(|&j| f.cm.column(j).norm() > thr).unwrap_or(n);
    if f.cm.norm() == 0.0 {
        split = n;
    }
    if split > 0 && split < n && f.a[(split, split - 1)] != 0.0 {
        split -= 1;
    }
    split
}

/// Minimal realization `(A22 − λE22, B2, C_M2, D_M)` of the denominator.
pub fn minimal_denominator(
    f: &StackedFactorRealization,
    rank_tol: f64,
) -> Result<DescriptorSystem> {
    let n = f.order();
    let j = denominator_split(f, rank_tol);
    let r = n - j;
    DescriptorSystem::new(
        f.a.view((j, j), (r, r)).clone_owned(),
        Some(f.e.view((j, j), (r, r)).clone_owned()),
        f.b.rows(j, r).clone_owned(),
        f.cm.columns(j, r).clone_owned(),
        f.dm.clone(),
        f.domain,
    )
}

/// Which engine computes the factorization of the dual system.
#[derive(Debug, Clone)]
pub enum LeftMethod {
    Proper(RegionSpec),
    Inner,
}

/// `G = M⁻¹·N` from a right factorization of the dual `(Aᵀ − λEᵀ, Cᵀ, Bᵀ, Dᵀ)`.
///
/// When `keep_nondynamic` is false the simple infinite eigenvalues are residualized
/// before the dual is transposed back.
pub fn to_left_factorization(
    sys: &DescriptorSystem,
    method: &LeftMethod,
    tol: &Tolerances,
    opts: &GrcfOptions,
    keep_nondynamic: bool,
) -> Result<(LeftFactorRealization, DislocationLog)> {
    let dual = sys.dual();
    let (mut right, log) = match method {
        LeftMethod::Proper(region) => grcf_with(&dual, region, tol, opts)?,
        LeftMethod::Inner => grcfid_with(&dual, tol, opts)?,
    };
    if !keep_nondynamic {
        right = eliminate_nondynamic(&right)?;
    }
    Ok((left_from_dual(&right), log))
}

/// Pertransposed dual of a stacked right factorization.
pub fn left_from_dual(f: &StackedFactorRealization) -> LeftFactorRealization {
    let reverse_rows = |m: &DMatrix<f64>| {
        let r = m.nrows();
        DMatrix::from_fn(r, m.ncols(), |i, j| m[(r - 1 - i, j)])
    };
    let reverse_cols = |m: &DMatrix<f64>| {
        let c = m.ncols();
        DMatrix::from_fn(m.nrows(), c, |i, j| m[(i, c - 1 - j)])
    };
    LeftFactorRealization {
        a: pertranspose(&f.a),
        e: pertranspose(&f.e),
        bn: reverse_rows(&f.cn.transpose()),
        bm: reverse_rows(&f.cm.transpose()),
        c: reverse_cols(&f.b.transpose()),
        dn: f.dn.transpose(),
        dm: f.dm.transpose(),
        domain: f.domain,
        n_nondynamic: f.n_nondynamic,
        den_degree: f.den_degree,
    }
}

/// Inverse of [`left_from_dual`]: the right factorization of the dual system.
pub fn right_from_left(f: &LeftFactorRealization) -> StackedFactorRealization {
    let reverse_rows = |m: &DMatrix<f64>| {
        let r = m.nrows();
        DMatrix::from_fn(r, m.ncols(), |i, j| m[(r - 1 - i, j)])
    };
    StackedFactorRealization {
        a: pertranspose(&f.a),
        e: pertranspose(&f.e),
        b: reverse_rows(&f.c.transpose()),
        cn: reverse_rows(&f.bn).transpose(),
        cm: reverse_rows(&f.bm).transpose(),
        dn: f.dn.transpose(),
        dm: f.dm.transpose(),
        domain: f.domain,
        n_nondynamic: f.n_nondynamic,
        den_degree: f.den_degree,
    }
}

/// Minimal realization of the left denominator, read from the trailing-state form.
pub fn minimal_left_denominator(
    f: &LeftFactorRealization,
    rank_tol: f64,
) -> Result<DescriptorSystem> {
    let n = f.order();
    let thr = rank_tol * f.bm.norm();
    let mut end = (0..n)
        .rev()
        .find(|&i| f.bm.row(i).norm() > thr)
        .map_or(0, |i| i + 1);
    if f.bm.norm() == 0.0 {
        end = 0;
    }
    if end > 0 && end < n && f.a[(end, end - 1)] != 0.0 {
        end += 1;
    }
    DescriptorSystem::new(
        f.a.view((0, 0), (end, end)).clone_owned(),
        Some(f.e.view((0, 0), (end, end)).clone_owned()),
        f.bm.rows(0, end).clone_owned(),
        f.c.columns(0, end).clone_owned(),
        f.dm.clone(),
        f.domain,
    )
}
