//! Specially ordered generalized real Schur form:
//! `[A∞ | good | bad finite | bad infinite]` along the diagonal.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    apply_cols, apply_rows, column_compress, finite_infinite_split, full_qr, lapack,
};
use crate::linalg::{blocks_from_alphai, clean_structure};
use crate::region::{RegionSpec, Tolerances};
use crate::system::DescriptorSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GrsfDims {
    /// `n − r`: simple infinite eigenvalues (non-dynamic modes).
    pub n_inf_simple: usize,
    pub n_good: usize,
    pub n_bad_finite: usize,
    /// Higher-order infinite eigenvalues.
    pub n_bad_infinite: usize,
}

impl GrsfDims {
    pub fn total(&self) -> usize {
        self.n_inf_simple + self.n_good + self.n_bad_finite + self.n_bad_infinite
    }

    /// First index of the bad region.
    pub fn bad_start(&self) -> usize {
        self.n_inf_simple + self.n_good
    }
}

/// `Atil = Q·A·Z`, `Etil = Q·E·Z` in the specially ordered form.
#[derive(Debug, Clone)]
pub struct OrderedGrsf {
    pub q: DMatrix<f64>,
    pub z: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub e: DMatrix<f64>,
    pub dims: GrsfDims,
    /// Diagonal block sizes from top to bottom.
    pub blocks: Vec<usize>,
}

pub fn gsorsf(
    sys: &DescriptorSystem,
    region: &RegionSpec,
    tol: &Tolerances,
) -> Result<OrderedGrsf> {
    gsorsf_pencil(sys.a(), sys.e_explicit(), region, tol)
}

/// As [`gsorsf`] on a bare pencil; `e = None` means `E = I`.
pub fn gsorsf_pencil(
    a0: &DMatrix<f64>,
    e0: Option<&DMatrix<f64>>,
    region: &RegionSpec,
    tol: &Tolerances,
) -> Result<OrderedGrsf> {
    let n = a0.nrows();
    let mut a = a0.clone();
    let mut e = match e0 {
        Some(e) => e.clone(),
        None => DMatrix::identity(n, n),
    };
    let mut q = DMatrix::<f64>::identity(n, n);
    let mut z = DMatrix::<f64>::identity(n, n);
    let scale = a.norm().max(e.norm()).max(f64::MIN_POSITIVE);

    // Step 1: E·Z1 = [0 | E2].
    let r = match e0 {
        None => n,
        Some(_) => {
            let c = column_compress(&e, tol.rank_tol);
            a = &a * &c.z;
            e = &e * &c.z;
            z = c.z;
            c.rank
        }
    };
    let ninf = n - r;
    for j in 0..ninf {
        for i in 0..n {
            e[(i, j)] = 0.0;
        }
    }

    // Step 2: Q1ᵀ·A1 = [A∞; 0].
    if ninf > 0 {
        let a1 = a.columns(0, ninf).clone_owned();
        let (q1, _) = full_qr(&a1);
        let q1t = q1.transpose();
        a = &q1t * &a;
        e = &q1t * &e;
        q = q1t;
        for j in 0..ninf {
            for i in (j + 1)..n {
                a[(i, j)] = 0.0;
            }
            if a[(j, j)].abs() <= tol.rank_tol * scale {
                return Err(Error::SingularPencil);
            }
        }
    }

    // Step 3: finite / infinite separation of the trailing r×r pencil.
    let a22 = a.view((ninf, ninf), (r, r)).clone_owned();
    let e22 = e.view((ninf, ninf), (r, r)).clone_owned();
    let split = finite_infinite_split(&a22, &e22, tol.rank_tol)?;
    apply_rows(&mut a, ninf, &split.q);
    apply_rows(&mut e, ninf, &split.q);
    apply_rows(&mut q, ninf, &split.q);
    apply_cols(&mut a, ninf, &split.z);
    apply_cols(&mut e, ninf, &split.z);
    apply_cols(&mut z, ninf, &split.z);
    a.view_mut((ninf, ninf), (r, r)).copy_from(&split.a);
    e.view_mut((ninf, ninf), (r, r)).copy_from(&split.e);
    let nf = split.n_finite;
    let nib = split.n_infinite;

    // Step 4: GRSF of the finite part with the good eigenvalues leading.
    let mut fin_blocks = Vec::new();
    let mut n_good = 0;
    if nf > 0 {
        let af = a.view((ninf, ninf), (nf, nf)).clone_owned();
        let ef = e.view((ninf, ninf), (nf, nf)).clone_owned();
        let mut qz = lapack::gges(&af, &ef)?;
        let select = classify(&qz.alphar, &qz.alphai, &qz.beta, region, tol.boundary_tol);
        let out = lapack::tgsen(&mut qz.s, &mut qz.t, &mut qz.ql, &mut qz.zr, &select)?;
        n_good = out.selected;
        fin_blocks = blocks_from_alphai(&out.alphai);
        clean_structure(&mut qz.s, &mut qz.t, &fin_blocks);
        let q3 = qz.ql.transpose();
        apply_rows(&mut a, ninf, &q3);
        apply_rows(&mut e, ninf, &q3);
        apply_rows(&mut q, ninf, &q3);
        apply_cols(&mut a, ninf, &qz.zr);
        apply_cols(&mut e, ninf, &qz.zr);
        apply_cols(&mut z, ninf, &qz.zr);
        a.view_mut((ninf, ninf), (nf, nf)).copy_from(&qz.s);
        e.view_mut((ninf, ninf), (nf, nf)).copy_from(&qz.t);
    }

    let mut blocks = vec![1; ninf];
    blocks.extend(&fin_blocks);
    blocks.extend(std::iter::repeat_n(1, nib));
    clean_structure(&mut a, &mut e, &blocks);
    for j in 0..ninf {
        e[(j, j)] = 0.0;
        for i in 0..n {
            e[(i, j)] = 0.0;
        }
    }
    for j in (ninf + nf)..n {
        e[(j, j)] = 0.0;
    }

    Ok(OrderedGrsf {
        q,
        z,
        a,
        e,
        dims: GrsfDims {
            n_inf_simple: ninf,
            n_good,
            n_bad_finite: nf - n_good,
            n_bad_infinite: nib,
        },
        blocks,
    })
}

/// LAPACK selection flags: `true` for eigenvalues in the good region. Both members of a
/// complex pair share the classification of the pair.
fn classify(
    alphar: &[f64],
    alphai: &[f64],
    beta: &[f64],
    region: &RegionSpec,
    margin: f64,
) -> Vec<bool> {
    let n = alphar.len();
    let mut sel = vec![false; n];
    let mut j = 0;
    while j < n {
        let lambda = if beta[j] != 0.0 {
            Complex64::new(alphar[j] / beta[j], alphai[j] / beta[j])
        } else {
            Complex64::new(f64::INFINITY, 0.0)
        };
        let good = region.contains(lambda, margin);
        if alphai[j] != 0.0 && j + 1 < n {
            sel[j] = good;
            sel[j + 1] = good;
            j += 2;
        } else {
            sel[j] = good;
            j += 1;
        }
    }
    sel
}
