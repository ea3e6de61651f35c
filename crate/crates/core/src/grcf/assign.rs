//! Partial feedback gains that move the eigenvalues of a trailing `1×1` or `2×2` block.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::lapack::gesvd;
use crate::linalg::singular_values;

/// The trailing subproblem `(A22 − λE22, B2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockProblem {
    pub a22: DMatrix<f64>,
    pub e22: DMatrix<f64>,
    pub b2: DMatrix<f64>,
}

impl BlockProblem {
    pub fn new(a22: DMatrix<f64>, e22: DMatrix<f64>, b2: DMatrix<f64>) -> Result<Self> {
        let k = a22.nrows();
        if !(1..=2).contains(&k)
            || a22.shape() != (k, k)
            || e22.shape() != (k, k)
            || b2.nrows() != k
        {
            return Err(Error::DimensionMismatch(format!(
                "block problem A22 {:?}, E22 {:?}, B2 {:?}",
                a22.shape(),
                e22.shape(),
                b2.shape()
            )));
        }
        Ok(Self { a22, e22, b2 })
    }

    pub fn k(&self) -> usize {
        self.a22.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b2.ncols()
    }

    pub fn is_infinite(&self) -> bool {
        self.k() == 1 && self.e22[(0, 0)] == 0.0
    }

    /// Finite eigenvalues of the block (empty for an infinite `1×1` block).
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        closed_loop_eigenvalues(&self.a22, &self.e22)
    }
}

/// Eigenvalues of a `1×1` or `2×2` pencil with invertible `E`.
pub fn closed_loop_eigenvalues(a: &DMatrix<f64>, e: &DMatrix<f64>) -> Vec<Complex64> {
    if a.nrows() == 1 {
        if e[(0, 0)] == 0.0 {
            return Vec::new();
        }
        return vec![Complex64::new(a[(0, 0)] / e[(0, 0)], 0.0)];
    }
    let Some(einv) = e.clone().try_inverse() else {
        return Vec::new();
    };
    let m = einv * a;
    let half_tr = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = Complex64::new(half_tr * half_tr - det, 0.0).sqrt();
    let mut v = vec![half_tr + disc, half_tr - disc];
    v.sort_by(|x, y| y.im.total_cmp(&x.im));
    v
}

/// Data of the elementary factor `(A22 + B2F2 − λE22, B2W, F2, W)` or, for an infinite block,
/// `(γ − λη, B2, F2, W)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentResult {
    pub f2: DMatrix<f64>,
    pub w: DMatrix<f64>,
    pub poles: Vec<Complex64>,
    /// `(γ, η)` when the block was infinite.
    pub infinite: Option<(f64, f64)>,
    pub gain_norm: f64,
}

impl AssignmentResult {
    fn finite(f2: DMatrix<f64>, w: DMatrix<f64>, poles: Vec<Complex64>) -> Self {
        let gain_norm = f2.norm();
        Self {
            f2,
            w,
            poles,
            infinite: None,
            gain_norm,
        }
    }
}

/// Orthogonal transformation exposing an uncontrollable trailing `1×1` part of an adjoined
/// `2×2` block: `U·(A22 − λE22)·V` is upper triangular and the last row of `U·B2` is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DeflationRequest {
    pub u: DMatrix<f64>,
    pub v: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PairAssignment {
    Assigned(AssignmentResult),
    Deflate(DeflationRequest),
}

/// `B2 = σ·V1ᵀ` for a `1×m` row.
fn row_rq(b2: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
    let sigma = b2.norm();
    (sigma, b2.transpose() / sigma)
}

/// Least-norm `F2` with `B2F2 = E22γ − A22`, `W = I`.
pub fn assign_real_1x1(block: &BlockProblem, gamma: f64) -> AssignmentResult {
    let m = block.inputs();
    let (sigma, v1) = row_rq(&block.b2);
    let rhs = block.e22[(0, 0)] * gamma - block.a22[(0, 0)];
    let f2 = v1 * (rhs / sigma);
    AssignmentResult::finite(
        f2,
        DMatrix::identity(m, m),
        vec![Complex64::new(gamma, 0.0)],
    )
}

/// `F2 = −V1·A22/σ`, `W = I − V1V1ᵀ` for an infinite block; the new pole is `γ/η`.
pub fn assign_infinite_1x1(block: &BlockProblem, gamma: f64, eta: f64) -> AssignmentResult {
    let m = block.inputs();
    let (sigma, v1) = row_rq(&block.b2);
    let f2 = &v1 * (-block.a22[(0, 0)] / sigma);
    let w = DMatrix::<f64>::identity(m, m) - &v1 * v1.transpose();
    let gain_norm = f2.norm();
    AssignmentResult {
        f2,
        w,
        poles: vec![Complex64::new(gamma / eta, 0.0)],
        infinite: Some((gamma, eta)),
        gain_norm,
    }
}

/// `Θ(θ1, θ2)` with trace `γ1 + γ2` and determinant `γ1γ2`.
pub fn theta_matrix(pair: [Complex64; 2], theta1: f64, theta2: f64) -> Matrix2<f64> {
    let sum = (pair[0] + pair[1]).re;
    let prod = (pair[0] * pair[1]).re;
    Matrix2::new(
        theta1,
        theta2,
        (theta1 * (sum - theta1) - prod) / theta2,
        sum - theta1,
    )
}

/// Least-norm gain map for a rank-2 `B2`: `F2(Θ) = V1·Σ⁻¹·Uᵀ·(E22Θ − A22)`.
pub struct FullRankGain {
    v1: DMatrix<f64>,
    left: Matrix2<f64>,
    e22: Matrix2<f64>,
    a22: Matrix2<f64>,
}

impl FullRankGain {
    pub fn new(block: &BlockProblem) -> Self {
        let svd = gesvd(&block.b2, true);
        let (u, vt, s) = (&svd.u, &svd.vt, &svd.s);
        let ut = Matrix2::new(u[(0, 0)], u[(1, 0)], u[(0, 1)], u[(1, 1)]);
        let sinv = Matrix2::new(1.0 / s[0], 0.0, 0.0, 1.0 / s[1]);
        let to2 = |m: &DMatrix<f64>| Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        Self {
            v1: vt.rows(0, 2).transpose(),
            left: sinv * ut,
            e22: to2(&block.e22),
            a22: to2(&block.a22),
        }
    }

    /// `‖F2(Θ)‖_F`, which equals `‖Σ⁻¹Uᵀ(E22Θ − A22)‖_F`.
    pub fn norm(&self, theta: &Matrix2<f64>) -> f64 {
        (self.left * (self.e22 * theta - self.a22)).norm()
    }

    pub fn gain(&self, theta: &Matrix2<f64>) -> DMatrix<f64> {
        let core = self.left * (self.e22 * theta - self.a22);
        let core = DMatrix::from_row_slice(
            2,
            2,
            &[core[(0, 0)], core[(0, 1)], core[(1, 0)], core[(1, 1)]],
        );
        &self.v1 * core
    }
}

/// Minimizes `‖F2(θ1, θ2)‖_F` over the Θ family: a log-spaced grid followed by a
/// Nelder–Mead refinement in `(θ1, log|θ2|)` for each sign of `θ2`.
pub fn optimize_theta(gain: &FullRankGain, pair: [Complex64; 2]) -> (f64, f64) {
    let center = 0.5 * (pair[0] + pair[1]).re;
    let t2c = pair[0].im.abs().max(0.1 * (1.0 + pair[0].norm()));
    let spread = t2c.max(0.5 * (pair[0] - pair[1]).norm()).max(1e-3);
    let eval = |t1: f64, t2: f64| {
        let v = gain.norm(&theta_matrix(pair, t1, t2));
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut offsets = vec![0.0];
    for i in 0..10 {
        let d = spread * 10f64.powf(-2.0 + 3.0 * i as f64 / 9.0);
        offsets.push(d);
        offsets.push(-d);
    }
    let mut best = (center, t2c, f64::INFINITY);
    let mut best_per_sign = [(center, t2c, f64::INFINITY); 2];
    for (si, sign) in [1.0, -1.0].into_iter().enumerate() {
        for &off in &offsets {
            for j in 0..21 {
                let t2 = sign * t2c * 10f64.powf(-2.0 + 4.0 * j as f64 / 20.0);
                let t1 = center + off;
                let v = eval(t1, t2);
                if v < best_per_sign[si].2 {
                    best_per_sign[si] = (t1, t2, v);
                }
            }
        }
    }
    for (si, sign) in [1.0, -1.0].into_iter().enumerate() {
        let (t1, t2, _) = best_per_sign[si];
        let f = |x: [f64; 2]| eval(x[0], sign * x[1].exp());
        let x = nelder_mead(f, [t1, t2.abs().ln()], [0.1 * spread, 0.3], 100);
        let v = f(x);
        if v < best.2 {
            best = (x[0], sign * x[1].exp(), v);
        }
        if best_per_sign[si].2 < best.2 {
            best = best_per_sign[si];
        }
    }
    (best.0, best.1)
}

fn nelder_mead(
    f: impl Fn([f64; 2]) -> f64,
    x0: [f64; 2],
    step: [f64; 2],
    max_eval: usize,
) -> [f64; 2] {
    let mut simplex = [x0, [x0[0] + step[0], x0[1]], [x0[0], x0[1] + step[1]]];
    let mut vals = simplex.map(&f);
    let mut evals = 3;
    while evals < max_eval {
        let mut idx = [0, 1, 2];
        idx.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        simplex = idx.map(|i| simplex[i]);
        vals = idx.map(|i| vals[i]);
        let spread = (vals[2] - vals[0]).abs();
        if spread <= 1e-12 * vals[0].abs().max(1e-300) {
            break;
        }
        let c = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let along = |t: f64| {
            [
                c[0] + t * (simplex[2][0] - c[0]),
                c[1] + t * (simplex[2][1] - c[1]),
            ]
        };
        let xr = along(-1.0);
        let fr = f(xr);
        evals += 1;
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(xe);
            evals += 1;
            if fe < fr {
                simplex[2] = xe;
                vals[2] = fe;
            } else {
                simplex[2] = xr;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            simplex[2] = xr;
            vals[2] = fr;
        } else {
            let xc = if fr < vals[2] {
                along(-0.5)
            } else {
                along(0.5)
            };
            let fc = f(xc);
            evals += 1;
            if fc < vals[2].min(fr) {
                simplex[2] = xc;
                vals[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = [
                        0.5 * (simplex[0][0] + simplex[i][0]),
                        0.5 * (simplex[0][1] + simplex[i][1]),
                    ];
                    vals[i] = f(simplex[i]);
                }
                evals += 2;
            }
        }
    }
    let mut best = 0;
    for i in 1..3 {
        if vals[i] < vals[best] {
            best = i;
        }
    }
    simplex[best]
}

/// Rank-2 `B2`: least-norm gain over the optimized Θ family.
pub fn assign_pair_full(block: &BlockProblem, pair: [Complex64; 2]) -> AssignmentResult {
    let m = block.inputs();
    let gain = FullRankGain::new(block);
    let (t1, t2) = optimize_theta(&gain, pair);
    let f2 = gain.gain(&theta_matrix(pair, t1, t2));
    AssignmentResult::finite(f2, DMatrix::identity(m, m), pair.to_vec())
}

/// Rank-1 `B2`: companion-type formulas on `(E22⁻¹A22, E22⁻¹B2)`. Returns a deflation
/// request when the pair is not controllable (`|α21| ≤ tol·‖α‖`).
pub fn assign_pair_rank1(
    block: &BlockProblem,
    pair: [Complex64; 2],
    tol: f64,
) -> Result<PairAssignment> {
    let m = block.inputs();
    let einv = block
        .e22
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularBlock("E22 of a 2x2 block is singular".into()))?;
    let eb = &einv * &block.b2;
    let svd = gesvd(&eb, true);
    let u1 = svd.u.column(0).clone_owned();
    let u = DMatrix::from_row_slice(2, 2, &[u1[0], -u1[1], u1[1], u1[0]]);
    let sigma = svd.s[0];
    let v1 = svd.vt.row(0).transpose();
    let alpha = u.transpose() * &einv * &block.a22 * &u;
    let (a11, a12, a21, a22) = (alpha[(0, 0)], alpha[(0, 1)], alpha[(1, 0)], alpha[(1, 1)]);
    if a21.abs() <= tol * alpha.norm().max(f64::MIN_POSITIVE) {
        return Ok(PairAssignment::Deflate(deflation_transform(block)));
    }
    let sum = (pair[0] + pair[1]).re;
    let prod = (pair[0] * pair[1]).re;
    let phi1 = (sum - a11 - a22) / sigma;
    let phi2 = (a22 / a21) * phi1 + (a11 * a22 - a12 * a21 - prod) / (a21 * sigma);
    let ftil = DMatrix::from_row_slice(1, 2, &[phi1, phi2]);
    let f2 = v1 * ftil * u.transpose();
    Ok(PairAssignment::Assigned(AssignmentResult::finite(
        f2,
        DMatrix::identity(m, m),
        pair.to_vec(),
    )))
}

/// `U` from the SVD of `B2` (rows) and `V` from the RQ decomposition of `U·E22`.
fn deflation_transform(block: &BlockProblem) -> DeflationRequest {
    let u1 = gesvd(&block.b2, true).u.column(0).clone_owned();
    let u = DMatrix::from_row_slice(2, 2, &[u1[0], u1[1], -u1[1], u1[0]]);
    let ue = &u * &block.e22;
    let (m21, m22) = (ue[(1, 0)], ue[(1, 1)]);
    let r = m21.hypot(m22);
    let v = if r == 0.0 {
        DMatrix::identity(2, 2)
    } else {
        DMatrix::from_row_slice(2, 2, &[m22 / r, m21 / r, -m21 / r, m22 / r])
    };
    DeflationRequest { u, v }
}

/// Dispatches on the numerical rank of `B2`.
pub fn assign_pair(block: &BlockProblem, pair: [Complex64; 2], tol: f64) -> Result<PairAssignment> {
    let sv = singular_values(&block.b2);
    let rank2 = sv.len() >= 2 && sv[1] > f64::EPSILON.sqrt() * sv[0];
    if rank2 {
        Ok(PairAssignment::Assigned(assign_pair_full(block, pair)))
    } else {
        assign_pair_rank1(block, pair, tol)
    }
}
