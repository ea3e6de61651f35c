//! Stable right coprime factorization with inner denominator: bad poles are reflected
//! across the stability boundary by elementary inner factors.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::factors::{DislocationLog, StackedFactorRealization, StepKind};
use crate::grcf::engine::Engine;
use crate::grcf::{AssignmentResult, BlockProblem, GrcfOptions};
use crate::gsorsf::gsorsf;
use crate::linalg::{cholesky_update, sqrt_lyapunov};
use crate::region::{RegionSpec, Tolerances};
use crate::system::{DescriptorSystem, Domain};

pub fn grcfid(
    sys: &DescriptorSystem,
    tol: &Tolerances,
) -> Result<(StackedFactorRealization, DislocationLog)> {
    grcfid_with(sys, tol, &GrcfOptions::default())
}

pub fn grcfid_with(
    sys: &DescriptorSystem,
    tol: &Tolerances,
    opts: &GrcfOptions,
) -> Result<(StackedFactorRealization, DislocationLog)> {
    tol.validate()?;
    let region = RegionSpec::inner(sys.domain());
    let g = gsorsf(sys, &region, tol)?;
    let mut eng = Engine::new(sys, g, tol, opts.strict_gain);
    while let Some(k) = eng.trailing() {
        if eng.is_uncontrollable(k) {
            eng.deflate(k);
            continue;
        }
        let block = eng.problem(k);
        if eng.is_infinite_trailing() {
            if sys.domain() == Domain::Continuous {
                return Err(Error::NoSolution(
                    "continuous-time system with a controllable higher-order infinite pole".into(),
                ));
            }
            let res = inner_gain_infinite_discrete(&block);
            eng.apply(1, &res, StepKind::Infinite)?;
            eng.settle(1)?;
            continue;
        }
        for lambda in block.eigenvalues() {
            if region.on_stability_boundary(lambda, tol.boundary_tol) {
                return Err(Error::NoSolution(format!(
                    "controllable pole {lambda} on the stability boundary"
                )));
            }
        }
        let res = match sys.domain() {
            Domain::Continuous => inner_gain_continuous(&block),
            Domain::Discrete => inner_gain_discrete(&block),
        }
        .map_err(|err| match err {
            Error::BoundaryEigenvalue(msg) => Error::NoSolution(msg),
            other => other,
        })?;
        eng.apply(k, &res, StepKind::Finite)?;
        let count = if k == 2 {
            eng.standardize_trailing()?
        } else {
            1
        };
        eng.settle(count)?;
    }
    Ok(eng.finish())
}

fn solve_e(block: &BlockProblem, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    block
        .e22
        .clone()
        .lu()
        .solve(m)
        .ok_or_else(|| Error::SingularBlock("E22 is singular".into()))
}

/// `Y⁻¹·x` with `Y = S·Sᵀ` by two triangular solves.
fn solve_gramian(s: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let fail = || Error::SingularBlock("Lyapunov factor is singular".into());
    let y = s.solve_upper_triangular(x).ok_or_else(fail)?;
    s.transpose().solve_lower_triangular(&y).ok_or_else(fail)
}

fn reflect(domain: Domain, lambda: Complex64) -> Complex64 {
    match domain {
        Domain::Continuous => -lambda.conj(),
        Domain::Discrete => Complex64::new(1.0, 0.0) / lambda.conj(),
    }
}

/// `F2 = −B2ᵀ(Y·E22ᵀ)⁻¹`, `W = I`, with `A22·Y·E22ᵀ + E22·Y·A22ᵀ = B2·B2ᵀ`.
pub fn inner_gain_continuous(block: &BlockProblem) -> Result<AssignmentResult> {
    let s = sqrt_lyapunov(&block.a22, &block.e22, &block.b2, Domain::Continuous)?;
    let x = solve_e(block, &block.b2)?;
    let f2 = -solve_gramian(&s, &x)?.transpose();
    let m = block.inputs();
    let poles = block
        .eigenvalues()
        .into_iter()
        .map(|l| reflect(Domain::Continuous, l))
        .collect();
    let gain_norm = f2.norm();
    Ok(AssignmentResult {
        f2,
        w: DMatrix::identity(m, m),
        poles,
        infinite: None,
        gain_norm,
    })
}

/// `F2 = −B2ᵀ(Y·A22ᵀ)⁻¹` and `W = R⁻¹` with `RᵀR = I + XᵀX`, `X = S⁻¹E22⁻¹B2`, where
/// `A22·Y·A22ᵀ − E22·Y·E22ᵀ = B2·B2ᵀ`.
pub fn inner_gain_discrete(block: &BlockProblem) -> Result<AssignmentResult> {
    let s = sqrt_lyapunov(&block.a22, &block.e22, &block.b2, Domain::Discrete)?;
    let ab = block
        .a22
        .clone()
        .lu()
        .solve(&block.b2)
        .ok_or_else(|| Error::SingularBlock("A22 is singular".into()))?;
    let f2 = -solve_gramian(&s, &ab)?.transpose();
    let eb = solve_e(block, &block.b2)?;
    let x = s
        .solve_upper_triangular(&eb)
        .ok_or_else(|| Error::SingularBlock("Lyapunov factor is singular".into()))?;
    let m = block.inputs();
    let r = cholesky_update(&DMatrix::identity(m, m), &x);
    let w = r
        .solve_upper_triangular(&DMatrix::identity(m, m))
        .ok_or_else(|| Error::SingularBlock("Cholesky factor is singular".into()))?;
    let poles = block
        .eigenvalues()
        .into_iter()
        .map(|l| reflect(Domain::Discrete, l))
        .collect();
    let gain_norm = f2.norm();
    Ok(AssignmentResult {
        f2,
        w,
        poles,
        infinite: None,
        gain_norm,
    })
}

/// Reflection of an infinite pole to the origin: `γ = 0`, `η = −A22`.
pub fn inner_gain_infinite_discrete(block: &BlockProblem) -> AssignmentResult {
    crate::grcf::assign_infinite_1x1(block, 0.0, -block.a22[(0, 0)])
}
