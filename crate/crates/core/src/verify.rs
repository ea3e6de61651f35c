//! Independent checks: transfer-function evaluation, pole classification by rank tests,
//! and quality reports for computed factorizations.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factors::StackedFactorRealization;
use crate::gsorsf::{gsorsf, OrderedGrsf};
use crate::linalg::{
    block_eigenvalues, complex_singular_values, lapack, singular_values, Eigenvalue,
};
use crate::postproc::eliminate_nondynamic;
use crate::region::{PoleMode, RegionSpec, Tolerances};
use crate::system::{DescriptorSystem, Domain};

pub type ComplexMatrix = DMatrix<Complex64>;

fn to_complex(m: &DMatrix<f64>) -> ComplexMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// `G(λ) = C(λE − A)⁻¹B + D` by one complex LU solve.
pub fn eval_tfm(sys: &DescriptorSystem, lambda: Complex64) -> Result<ComplexMatrix> {
    let d = to_complex(sys.d());
    let n = sys.order();
    if n == 0 {
        return Ok(d);
    }
    let pencil = to_complex(&sys.e()) * lambda - to_complex(sys.a());
    let scale = pencil.norm().max(f64::MIN_POSITIVE);
    let lu = pencil.clone().lu();
    let u = lu.u();
    let min_pivot = (0..n)
        .map(|i| u[(i, i)].norm())
        .fold(f64::INFINITY, f64::min);
    if min_pivot <= n as f64 * f64::EPSILON * scale {
        return Err(Error::SingularAtPoint);
    }
    let rhs = to_complex(sys.b());
    let x = lu.solve(&rhs).ok_or(Error::SingularAtPoint)?;
    let g = to_complex(sys.c()) * x + d;
    if g.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::SingularAtPoint);
    }
    Ok(g)
}

/// Finite generalized eigenvalues of `(A, E)`; eigenvalues with `|β| ≤ tol·‖(α, β)‖` count
/// as infinite and are skipped.
pub fn finite_eigenvalues(a: &DMatrix<f64>, e: &DMatrix<f64>) -> Vec<Complex64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let Ok(qz) = lapack::gges(a, e) else {
        return Vec::new();
    };
    let scale = a.norm().max(e.norm()).max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    for j in 0..a.nrows() {
        let (ar, ai, b) = (qz.alphar[j], qz.alphai[j], qz.beta[j]);
        let mag = Complex64::new(ar, ai).norm();
        if b.abs() > 1e3 * f64::EPSILON * scale.max(mag) && b != 0.0 {
            out.push(Complex64::new(ar / b, ai / b));
        }
    }
    out
}

/// Finite eigenvalues of the system pencil `[[A − λE, B], [C, D]]` of a square system.
pub fn transmission_zeros(sys: &DescriptorSystem) -> Vec<Complex64> {
    let (n, m, p) = (sys.order(), sys.inputs(), sys.outputs());
    if m != p {
        return Vec::new();
    }
    let mut a = DMatrix::zeros(n + m, n + m);
    a.view_mut((0, 0), (n, n)).copy_from(sys.a());
    a.view_mut((0, n), (n, m)).copy_from(sys.b());
    a.view_mut((n, 0), (p, n)).copy_from(sys.c());
    a.view_mut((n, n), (p, m)).copy_from(sys.d());
    let mut e = DMatrix::zeros(n + m, n + m);
    e.view_mut((0, 0), (n, n)).copy_from(&sys.e());
    finite_eigenvalues(&a, &e)
}

/// Deterministic pole-avoiding probe points.
///
/// Continuous: `σ + iω` with `σ, ω` uniform on `[−2, 2]·(1 + scale)`. Discrete: uniform
/// angles on circles of radius 0.5, 1.5 and 3.
pub fn probe_points(
    domain: Domain,
    scale: f64,
    avoid: &[Complex64],
    count: usize,
    seed: u64,
) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = 2.0 * (1.0 + scale);
    let radii = [0.5, 1.5, 3.0];
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        let z = match domain {
            Domain::Continuous => Complex64::new(
                rng.random_range(-width..width),
                rng.random_range(-width..width),
            ),
            Domain::Discrete => {
                let r = radii[out.len() % radii.len()];
                Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
            }
        };
        let near = avoid
            .iter()
            .any(|p| (z - p).norm() <= 1e-3 * (1.0 + p.norm()));
        if !near || attempts > 100 * count {
            out.push(z);
        }
    }
    out
}

/// Largest modulus among the finite poles of the pencil, used to size probe regions.
pub fn spectral_scale(poles: &[Complex64]) -> f64 {
    poles.iter().map(|p| p.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleInfo {
    #[serde(serialize_with = "crate::io::serialize_complex")]
    pub value: Complex64,
    pub controllable: bool,
    pub observable: bool,
    pub bad: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleReport {
    pub finite: Vec<PoleInfo>,
    /// Simple infinite eigenvalues (non-dynamic modes).
    pub infinite_simple: usize,
    /// Higher-order infinite eigenvalues.
    pub infinite_higher: usize,
    pub infinite_higher_controllable: usize,
    /// Controllable bad finite eigenvalues plus controllable higher-order infinite ones.
    pub n_bad: usize,
}

impl PoleReport {
    /// Finite poles that are both controllable and observable.
    pub fn minimal_finite(&self) -> Vec<Complex64> {
        self.finite
            .iter()
            .filter(|p| p.controllable && p.observable)
            .map(|p| p.value)
            .collect()
    }
}

const RANK_TEST_TOL: f64 = 1e-8;

fn smallest_singular_value(m: &ComplexMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return f64::INFINITY;
    }
    complex_singular_values(m)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// True if `rank [A − λE, B] = n`.
pub fn is_controllable_at(sys: &DescriptorSystem, lambda: Complex64) -> bool {
    let n = sys.order();
    let m = sys.inputs();
    let e = sys.e();
    let scale = sys.a().norm() + lambda.norm() * e.norm() + sys.b().norm();
    let smallest = if lambda.im == 0.0 {
        let mut mat = DMatrix::zeros(n, n + m);
        mat.view_mut((0, 0), (n, n))
            .copy_from(&(sys.a() - &e * lambda.re));
        mat.view_mut((0, n), (n, m)).copy_from(sys.b());
        singular_values(&mat)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    } else {
        let mut mat = ComplexMatrix::zeros(n, n + m);
        mat.view_mut((0, 0), (n, n))
            .copy_from(&(to_complex(sys.a()) - to_complex(&e) * lambda));
        mat.view_mut((0, n), (n, m)).copy_from(&to_complex(sys.b()));
        smallest_singular_value(&mat)
    };
    smallest > RANK_TEST_TOL * scale
}

/// True if `rank [Aᵀ − λEᵀ, Cᵀ] = n`.
pub fn is_observable_at(sys: &DescriptorSystem, lambda: Complex64) -> bool {
    is_controllable_at(&sys.dual(), lambda)
}

/// Poles with controllability/observability flags; `region` decides good and bad.
pub fn pole_report(
    sys: &DescriptorSystem,
    region: &RegionSpec,
    tol: &Tolerances,
) -> Result<PoleReport> {
    let g = gsorsf(sys, region, tol)?;
    let d = g.dims;
    let dual = sys.dual();
    let mut finite: Vec<PoleInfo> = Vec::new();
    for (value, bad) in ordered_finite(&g) {
        // The rank tests give the same answer at conjugate points.
        let twin = finite
            .last()
            .filter(|p| value.im != 0.0 && p.value == value.conj());
        let (controllable, observable) = match twin {
            Some(p) => (p.controllable, p.observable),
            None => (
                is_controllable_at(sys, value),
                is_controllable_at(&dual, value),
            ),
        };
        finite.push(PoleInfo {
            value,
            controllable,
            observable,
            bad,
        });
    }

    let nib = d.n_bad_infinite;
    let ctrl_inf = if nib == 0 {
        0
    } else {
        let s = d.total() - nib;
        let b = &g.q * sys.b();
        infinite_krylov_rank(
            &g.a.view((s, s), (nib, nib)).clone_owned(),
            &g.e.view((s, s), (nib, nib)).clone_owned(),
            &b.rows(s, nib).clone_owned(),
            sys.b().norm(),
        )
    };
    let n_bad = finite.iter().filter(|p| p.bad && p.controllable).count() + ctrl_inf;
    Ok(PoleReport {
        finite,
        infinite_simple: d.n_inf_simple,
        infinite_higher: nib,
        infinite_higher_controllable: ctrl_inf,
        n_bad,
    })
}

/// Finite eigenvalues of an ordered form with a flag for the bad region.
fn ordered_finite(g: &OrderedGrsf) -> Vec<(Complex64, bool)> {
    let d = g.dims;
    let good_end = d.n_inf_simple + d.n_good;
    let finite_end = good_end + d.n_bad_finite;
    let mut out = Vec::new();
    let mut start = 0;
    for &k in &g.blocks {
        if start >= d.n_inf_simple && start < finite_end {
            for ev in block_eigenvalues(&g.a, &g.e, start, k, 0.0) {
                if let Eigenvalue::Finite(lambda) = ev {
                    out.push((lambda, start >= good_end));
                }
            }
        }
        start += k;
    }
    out
}

/// Finite poles of a realization, with infinite eigenvalues separated structurally
/// rather than by the size of `β`.
pub fn finite_poles(sys: &DescriptorSystem, tol: &Tolerances) -> Result<Vec<Complex64>> {
    let region = RegionSpec::inner(sys.domain());
    let g = gsorsf(sys, &region, tol)?;
    Ok(ordered_finite(&g).into_iter().map(|(z, _)| z).collect())
}

/// Rank of `[A⁻¹B, N·A⁻¹B, …]` with `N = A⁻¹E` nilpotent.
fn infinite_krylov_rank(
    a: &DMatrix<f64>,
    e: &DMatrix<f64>,
    b: &DMatrix<f64>,
    b_scale: f64,
) -> usize {
    let k = a.nrows();
    let Some(ainv) = a.clone().try_inverse() else {
        return 0;
    };
    let n = &ainv * e;
    let mut v = &ainv * b;
    let m = b.ncols();
    let mut krylov = DMatrix::zeros(k, k * m);
    for i in 0..k {
        krylov.columns_mut(i * m, m).copy_from(&v);
        v = &n * v;
    }
    let thr = RANK_TEST_TOL
        * (1.0 + n.norm()).powi(k as i32 - 1)
        * ainv.norm()
        * b_scale.max(f64::MIN_POSITIVE);
    singular_values(&krylov)
        .into_iter()
        .filter(|&s| s > thr)
        .count()
}

/// Eigenvalues of the unobservable part of a realization with invertible `E`.
pub fn unobservable_eigenvalues(sys: &DescriptorSystem) -> Result<Vec<Complex64>> {
    let n = sys.order();
    if n == 0 {
        return Ok(Vec::new());
    }
    let abar = sys
        .e()
        .lu()
        .solve(sys.a())
        .ok_or_else(|| Error::SingularBlock("E is singular".into()))?;
    let scale = abar.norm().max(sys.c().norm()).max(f64::MIN_POSITIVE);
    let thr = RANK_TEST_TOL * scale;
    let mut v = null_space(sys.c(), thr, n);
    loop {
        if v.ncols() == 0 {
            return Ok(Vec::new());
        }
        let av = &abar * &v;
        let resid = &av - &v * (v.transpose() * &av);
        let y = null_space(&resid, thr, v.ncols());
        if y.ncols() == v.ncols() {
            break;
        }
        v = &v * y;
        let q = v.clone().qr().q();
        v = q.columns(0, v.ncols()).clone_owned();
    }
    let restricted = v.transpose() * &abar * &v;
    Ok(finite_eigenvalues(
        &restricted,
        &DMatrix::identity(v.ncols(), v.ncols()),
    ))
}

/// Orthonormal basis of `{x : M·x = 0}` for an `r×n` matrix.
fn null_space(m: &DMatrix<f64>, thr: f64, n: usize) -> DMatrix<f64> {
    if m.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    let svd = lapack::gesvd(m, true);
    let rank = svd.s.iter().filter(|&&s| s > thr).count();
    let cols: Vec<_> = (rank..n).map(|i| svd.vt.row(i).transpose()).collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RcfReport {
    pub max_error: f64,
    #[serde(serialize_with = "crate::io::serialize_complex_vec")]
    pub region_violations: Vec<Complex64>,
    /// Infinite eigenvalues of the factor pencil beyond the simple (non-dynamic) ones.
    pub improper_excess: usize,
    /// `min σ([N(λ); M(λ)]) / ‖[N(λ); M(λ)]‖` over the bad poles of `G`.
    pub min_stacked_sv: Option<f64>,
    pub innerness: Option<f64>,
    pub den_order: usize,
    pub passed: bool,
}

/// Solves `X·M = N` for `X = N·M⁻¹`.
fn right_divide(n: &ComplexMatrix, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let x = m
        .transpose()
        .lu()
        .solve(&n.transpose())
        .ok_or(Error::SingularAtPoint)?;
    Ok(x.transpose())
}

/// Splits a stacked value `[N; M]` after `p` rows.
fn split_stacked(v: &ComplexMatrix, p: usize) -> (ComplexMatrix, ComplexMatrix) {
    let m = v.ncols();
    (v.rows(0, p).clone_owned(), v.rows(p, m).clone_owned())
}

/// Relative reconstruction error `‖G − N·M⁻¹‖ / (1 + ‖G‖)` at one point.
pub fn reconstruction_error(
    g: &DescriptorSystem,
    stacked: &DescriptorSystem,
    lambda: Complex64,
) -> Result<f64> {
    let gv = eval_tfm(g, lambda)?;
    let v = eval_tfm(stacked, lambda)?;
    let (n, m) = split_stacked(&v, g.outputs());
    let x = right_divide(&n, &m)?;
    Ok((gv.clone() - x).norm() / (1.0 + gv.norm()))
}

/// Full-quality check of a right factorization of `g`.
pub fn check_rcf(
    g: &DescriptorSystem,
    f: &StackedFactorRealization,
    region: &RegionSpec,
    tol: &Tolerances,
    samples: usize,
) -> Result<RcfReport> {
    let stacked = f.stacked()?;
    let denominator = f.denominator()?;
    let g_poles = finite_poles(g, tol)?;
    let f_poles = finite_eigenvalues(&f.a, &f.e);
    let mut avoid = g_poles.clone();
    avoid.extend(&f_poles);
    avoid.extend(transmission_zeros(&denominator));
    let scale = spectral_scale(&g_poles).max(spectral_scale(&f_poles));
    let points = probe_points(g.domain(), scale, &avoid, samples, tol.seed);
    let mut max_error: f64 = 0.0;
    for &z in &points {
        let err = match reconstruction_error(g, &stacked, z) {
            Ok(e) => e,
            Err(Error::SingularAtPoint) => continue,
            Err(other) => return Err(other),
        };
        max_error = max_error.max(err);
    }

    let margin = if region.mode() == PoleMode::Inner {
        0.0
    } else {
        tol.boundary_tol
    };
    let region_violations: Vec<Complex64> = f_poles
        .iter()
        .copied()
        .filter(|&z| !region.contains(z, margin))
        .collect();
    let rank_e = if f.order() == 0 {
        0
    } else {
        let thr = 10.0 * tol.rank_tol * f.e.norm().max(f64::MIN_POSITIVE);
        singular_values(&f.e)
            .into_iter()
            .filter(|&s| s > thr)
            .count()
    };
    let infinite = f.order() - f_poles.len();
    let improper_excess = infinite.saturating_sub(f.order() - rank_e);

    let report = pole_report(g, region, tol)?;
    let mut min_sv: Option<f64> = None;
    let mut record = |value: &ComplexMatrix| {
        let s = smallest_singular_value(value) / value.norm().max(f64::MIN_POSITIVE);
        min_sv = Some(min_sv.map_or(s, |m: f64| m.min(s)));
    };
    for p in report
        .finite
        .iter()
        .filter(|p| p.bad && p.controllable && p.observable)
    {
        if let Ok(v) = eval_tfm(&stacked, p.value) {
            record(&v);
        }
    }
    if report.infinite_higher_controllable > 0 {
        let reduced = eliminate_nondynamic(f)?;
        let mut d = DMatrix::zeros(reduced.outputs() + reduced.inputs(), reduced.inputs());
        d.rows_mut(0, reduced.outputs()).copy_from(&reduced.dn);
        d.rows_mut(reduced.outputs(), reduced.inputs())
            .copy_from(&reduced.dm);
        let e_inv_ok = reduced.e.clone().try_inverse().is_some();
        if e_inv_ok {
            record(&to_complex(&d));
        }
    }

    let innerness = if region.mode() == PoleMode::Inner {
        Some(check_inner(&denominator, 64)?)
    } else {
        None
    };
    let den_order = crate::postproc::minimal_denominator(f, tol.rank_tol)?.order();
    let passed = max_error <= tol.eval_tol
        && region_violations.is_empty()
        && improper_excess == 0
        && min_sv.is_none_or(|s| s >= 1e-8)
        && innerness.is_none_or(|e| e <= tol.eval_tol);
    Ok(RcfReport {
        max_error,
        region_violations,
        improper_excess,
        min_stacked_sv: min_sv,
        innerness,
        den_order,
        passed,
    })
}

/// `max ‖M(λ)ᴴM(λ) − I‖_F` over `samples` points of the stability boundary.
pub fn check_inner(m: &DescriptorSystem, samples: usize) -> Result<f64> {
    if m.inputs() != m.outputs() {
        return Err(Error::DimensionMismatch(format!(
            "inner check needs a square system, got {}x{}",
            m.outputs(),
            m.inputs()
        )));
    }
    let k = m.inputs();
    let eye = ComplexMatrix::identity(k, k);
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let mut shift = 0.0;
        for _ in 0..8 {
            let t = (i as f64 + 0.5 + shift) / samples as f64;
            let z = match m.domain() {
                Domain::Continuous => {
                    let theta = std::f64::consts::PI * (t - 0.5);
                    Complex64::new(0.0, theta.tan())
                }
                Domain::Discrete => Complex64::from_polar(1.0, std::f64::consts::TAU * t),
            };
            match eval_tfm(m, z) {
                Ok(v) => {
                    worst = worst.max((v.adjoint() * &v - &eye).norm());
                    break;
                }
                Err(Error::SingularAtPoint) => shift += 0.1,
                Err(other) => return Err(other),
            }
        }
    }
    Ok(worst)
}

/// Column of a complex matrix as a vector, for callers that only need one input channel.
pub fn column(v: &ComplexMatrix, j: usize) -> DVector<Complex64> {
    v.column(j).clone_owned()
}
