//! Thin safe wrappers over the LAPACK generalized Schur and SVD routines.
//!
//! All matrices are nalgebra column-major, so slices are passed directly with
//! `lda = nrows`. Orthogonal factors follow the LAPACK convention
//! `A = Ql · S · Zrᵀ`.

use std::os::raw::{c_char, c_int};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) struct QzOutput {
    pub s: DMatrix<f64>,
    pub t: DMatrix<f64>,
    pub ql: DMatrix<f64>,
    pub zr: DMatrix<f64>,
    pub alphar: Vec<f64>,
    pub alphai: Vec<f64>,
    pub beta: Vec<f64>,
}

/// `dgges` without sorting.
pub(crate) fn gges(a: &DMatrix<f64>, e: &DMatrix<f64>) -> Result<QzOutput> {
    let n = a.nrows();
    let mut s = a.clone();
    let mut t = e.clone();
    let mut ql = DMatrix::<f64>::zeros(n, n);
    let mut zr = DMatrix::<f64>::zeros(n, n);
    let mut alphar = vec![0.0; n];
    let mut alphai = vec![0.0; n];
    let mut beta = vec![0.0; n];
    if n == 0 {
        return Ok(QzOutput {
            s,
            t,
            ql,
            zr,
            alphar,
            alphai,
            beta,
        });
    }
    let nn = n as c_int;
    let ld = nn.max(1);
    let jobv = b'V' as c_char;
    let sort = b'N' as c_char;
    let mut sdim: c_int = 0;
    let mut bwork: Vec<c_int> = vec![0; n];
    let mut info: c_int = 0;
    let mut query = [0.0f64];
    unsafe {
        lapack_sys::dgges_(
            &jobv,
            &jobv,
            &sort,
            None,
            &nn,
            s.as_mut_slice().as_mut_ptr(),
            &ld,
            t.as_mut_slice().as_mut_ptr(),
            &ld,
            &mut sdim,
            alphar.as_mut_ptr(),
            alphai.as_mut_ptr(),
            beta.as_mut_ptr(),
            ql.as_mut_slice().as_mut_ptr(),
            &ld,
            zr.as_mut_slice().as_mut_ptr(),
            &ld,
            query.as_mut_ptr(),
            &-1,
            bwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "dgges",
            info,
        });
    }
    let lwork = (query[0] as usize).max(8 * n + 16);
    let mut work = vec![0.0; lwork];
    unsafe {
        lapack_sys::dgges_(
            &jobv,
            &jobv,
            &sort,
            None,
            &nn,
            s.as_mut_slice().as_mut_ptr(),
            &ld,
            t.as_mut_slice().as_mut_ptr(),
            &ld,
            &mut sdim,
            alphar.as_mut_ptr(),
            alphai.as_mut_ptr(),
            beta.as_mut_ptr(),
            ql.as_mut_slice().as_mut_ptr(),
            &ld,
            zr.as_mut_slice().as_mut_ptr(),
            &ld,
            work.as_mut_ptr(),
            &(lwork as c_int),
            bwork.as_mut_ptr(),
            &mut info,
        );
    }
    match info {
        0 => Ok(QzOutput {
            s,
            t,
            ql,
            zr,
            alphar,
            alphai,
            beta,
        }),
        i if i > 0 && i <= nn + 1 => Err(Error::IterationFailure(format!("dgges info = {i}"))),
        i => Err(Error::Lapack {
            routine: "dgges",
            info: i,
        }),
    }
}

/// Full SVD `A = U·diag(s)·Vᵀ` by `dgesvd`; `s` is sorted in decreasing order and `U`, `Vᵀ`
/// are square.
pub(crate) struct SvdOutput {
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    pub vt: DMatrix<f64>,
}

pub(crate) fn gesvd(a: &DMatrix<f64>, vectors: bool) -> SvdOutput {
    let (m, n) = a.shape();
    let k = m.min(n);
    if k == 0 {
        return SvdOutput {
            u: DMatrix::identity(m, m),
            s: Vec::new(),
            vt: DMatrix::identity(n, n),
        };
    }
    let mut work_a = a.clone();
    let mut s = vec![0.0; k];
    let (um, vn) = if vectors { (m, n) } else { (1, 1) };
    let mut u = DMatrix::<f64>::zeros(um, um);
    let mut vt = DMatrix::<f64>::zeros(vn, vn);
    let job = if vectors { b'A' } else { b'N' } as c_char;
    let (mm, nn) = (m as c_int, n as c_int);
    let (ldu, ldvt) = (um as c_int, vn as c_int);
    let mut info: c_int = 0;
    let mut query = [0.0f64];
    unsafe {
        lapack_sys::dgesvd_(
            &job,
            &job,
            &mm,
            &nn,
            work_a.as_mut_slice().as_mut_ptr(),
            &mm,
            s.as_mut_ptr(),
            u.as_mut_slice().as_mut_ptr(),
            &ldu,
            vt.as_mut_slice().as_mut_ptr(),
            &ldvt,
            query.as_mut_ptr(),
            &-1,
            &mut info,
        );
    }
    let lwork = (query[0] as usize).max(5 * (m + n) + 16);
    let mut work = vec![0.0; lwork];
    unsafe {
        lapack_sys::dgesvd_(
            &job,
            &job,
            &mm,
            &nn,
            work_a.as_mut_slice().as_mut_ptr(),
            &mm,
            s.as_mut_ptr(),
            u.as_mut_slice().as_mut_ptr(),
            &ldu,
            vt.as_mut_slice().as_mut_ptr(),
            &ldvt,
            work.as_mut_ptr(),
            &(lwork as c_int),
            &mut info,
        );
    }
    assert!(info == 0, "dgesvd failed with info = {info}");
    SvdOutput { u, s, vt }
}

/// Singular values of a complex matrix by `zgesvd`, decreasing.
pub(crate) fn zgesvd_values(a: &DMatrix<Complex64>) -> Vec<f64> {
    let (m, n) = a.shape();
    let k = m.min(n);
    if k == 0 {
        return Vec::new();
    }
    let mut work_a = a.clone();
    let mut s = vec![0.0; k];
    let mut u = [Complex64::new(0.0, 0.0)];
    let mut vt = [Complex64::new(0.0, 0.0)];
    let job = b'N' as c_char;
    let (mm, nn, one) = (m as c_int, n as c_int, 1 as c_int);
    let mut rwork = vec![0.0; 5 * k];
    let mut info: c_int = 0;
    let mut query = [Complex64::new(0.0, 0.0)];
    let cast = |p: *mut Complex64| p.cast::<lapack_sys::__BindgenComplex<f64>>();
    unsafe {
        lapack_sys::zgesvd_(
            &job,
            &job,
            &mm,
            &nn,
            cast(work_a.as_mut_slice().as_mut_ptr()),
            &mm,
            s.as_mut_ptr(),
            cast(u.as_mut_ptr()),
            &one,
            cast(vt.as_mut_ptr()),
            &one,
            cast(query.as_mut_ptr()),
            &-1,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    let lwork = (query[0].re as usize).max(2 * k + m.max(n) + 16);
    let mut work = vec![Complex64::new(0.0, 0.0); lwork];
    unsafe {
        lapack_sys::zgesvd_(
            &job,
            &job,
            &mm,
            &nn,
            cast(work_a.as_mut_slice().as_mut_ptr()),
            &mm,
            s.as_mut_ptr(),
            cast(u.as_mut_ptr()),
            &one,
            cast(vt.as_mut_ptr()),
            &one,
            cast(work.as_mut_ptr()),
            &(lwork as c_int),
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    assert!(info == 0, "zgesvd failed with info = {info}");
    s
}

/// `dtgexc`: moves the block starting at 1-based `ifst` to 1-based `ilst`,
/// accumulating into `ql`, `zr`. Returns the final 1-based position.
pub(crate) fn tgexc(
    s: &mut DMatrix<f64>,
    t: &mut DMatrix<f64>,
    ql: &mut DMatrix<f64>,
    zr: &mut DMatrix<f64>,
    ifst: usize,
    ilst: usize,
) -> Result<usize> {
    let n = s.nrows();
    let nn = n as c_int;
    let ld = nn.max(1);
    let yes: c_int = 1;
    let mut ifst = ifst as c_int;
    let mut ilst = ilst as c_int;
    let lwork = (4 * n + 16).max(64);
    let mut work = vec![0.0; lwork];
    let mut info: c_int = 0;
    unsafe {
        lapack_sys::dtgexc_(
            &yes,
            &yes,
            &nn,
            s.as_mut_slice().as_mut_ptr(),
            &ld,
            t.as_mut_slice().as_mut_ptr(),
            &ld,
            ql.as_mut_slice().as_mut_ptr(),
            &ld,
            zr.as_mut_slice().as_mut_ptr(),
            &ld,
            &mut ifst,
            &mut ilst,
            work.as_mut_ptr(),
            &(lwork as c_int),
            &mut info,
        );
    }
    match info {
        0 => Ok(ilst as usize),
        1 => Err(Error::SwapIllConditioned {
            position: ilst.max(1) as usize - 1,
        }),
        i => Err(Error::Lapack {
            routine: "dtgexc",
            info: i,
        }),
    }
}

pub(crate) struct TgsenOutput {
    pub selected: usize,
    pub alphai: Vec<f64>,
}

/// `dtgsen` with `ijob = 0`: moves the selected eigenvalues to the leading positions.
pub(crate) fn tgsen(
    s: &mut DMatrix<f64>,
    t: &mut DMatrix<f64>,
    ql: &mut DMatrix<f64>,
    zr: &mut DMatrix<f64>,
    select: &[bool],
) -> Result<TgsenOutput> {
    let n = s.nrows();
    if n == 0 {
        return Ok(TgsenOutput {
            selected: 0,
            alphai: Vec::new(),
        });
    }
    let nn = n as c_int;
    let ld = nn.max(1);
    let ijob: c_int = 0;
    let yes: c_int = 1;
    let sel: Vec<c_int> = select.iter().map(|&b| b as c_int).collect();
    let mut alphar = vec![0.0; n];
    let mut alphai = vec![0.0; n];
    let mut beta = vec![0.0; n];
    let mut m: c_int = 0;
    let mut pl = 0.0;
    let mut pr = 0.0;
    let mut dif = [0.0f64; 2];
    let lwork = (4 * n + 16).max(64);
    let mut work = vec![0.0; lwork];
    let liwork = 1;
    let mut iwork = vec![0 as c_int; liwork];
    let mut info: c_int = 0;
    unsafe {
        lapack_sys::dtgsen_(
            &ijob,
            &yes,
            &yes,
            sel.as_ptr(),
            &nn,
            s.as_mut_slice().as_mut_ptr(),
            &ld,
            t.as_mut_slice().as_mut_ptr(),
            &ld,
            alphar.as_mut_ptr(),
            alphai.as_mut_ptr(),
            beta.as_mut_ptr(),
            ql.as_mut_slice().as_mut_ptr(),
            &ld,
            zr.as_mut_slice().as_mut_ptr(),
            &ld,
            &mut m,
            &mut pl,
            &mut pr,
            dif.as_mut_ptr(),
            work.as_mut_ptr(),
            &(lwork as c_int),
            iwork.as_mut_ptr(),
            &(liwork as c_int),
            &mut info,
        );
    }
    match info {
        0 => Ok(TgsenOutput {
            selected: m as usize,
            alphai,
        }),
        1 => Err(Error::SwapIllConditioned { position: 0 }),
        i => Err(Error::Lapack {
            routine: "dtgsen",
            info: i,
        }),
    }
}
