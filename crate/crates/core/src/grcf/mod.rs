//! Proper `C_g`-stable right coprime factorization by recursive pole dislocation.

pub mod assign;
pub(crate) mod engine;
pub mod select;

pub use assign::{
    assign_infinite_1x1, assign_pair, assign_pair_full, assign_pair_rank1, assign_real_1x1,
    closed_loop_eigenvalues, AssignmentResult, BlockProblem, DeflationRequest, PairAssignment,
};
pub use select::{stabilize_pair, PolePool};

use crate::error::{Error, Result};
use crate::factors::{DislocationLog, StackedFactorRealization, StepKind};
use crate::gsorsf::gsorsf;
use crate::region::{PoleMode, RegionSpec, Tolerances};
use crate::system::DescriptorSystem;
use engine::Engine;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GrcfOptions {
    /// Fail with [`Error::GainLimitExceeded`] instead of flagging large gains in the log.
    pub strict_gain: bool,
}

/// `G = N·M⁻¹` with `N`, `M` proper and `C_g`-stable and `M` of least McMillan degree
/// (for `C_b`-detectable realizations).
pub fn grcf(
    sys: &DescriptorSystem,
    region: &RegionSpec,
    tol: &Tolerances,
) -> Result<(StackedFactorRealization, DislocationLog)> {
    grcf_with(sys, region, tol, &GrcfOptions::default())
}

pub fn grcf_with(
    sys: &DescriptorSystem,
    region: &RegionSpec,
    tol: &Tolerances,
    opts: &GrcfOptions,
) -> Result<(StackedFactorRealization, DislocationLog)> {
    if region.mode() == PoleMode::Inner {
        return Err(Error::InvalidRegion(
            "inner regions are handled by the inner-denominator factorization".into(),
        ));
    }
    region_matches(sys, region)?;
    tol.validate()?;
    let g = gsorsf(sys, region, tol)?;
    let mut eng = Engine::new(sys, g, tol, opts.strict_gain);
    let mut pool = PolePool::new(region);
    let pair_tol = 100.0 * tol.rank_tol;

    while let Some(k) = eng.trailing() {
        if eng.is_uncontrollable(k) {
            eng.deflate(k);
            continue;
        }
        if eng.is_infinite_trailing() {
            if wants_infinite_pair(&eng, &pool) {
                infinite_pair(&mut eng, &mut pool, pair_tol)?;
                continue;
            }
            let (gamma, eta) = pool.infinite_target();
            let res = assign_infinite_1x1(&eng.problem(1), gamma, eta);
            eng.apply(1, &res, StepKind::Infinite)?;
            eng.settle(1)?;
            continue;
        }
        if k == 1 {
            if !pool.has_real() && pool.has_complex() {
                match eng.previous_bad() {
                    Some(1) if !previous_is_infinite(&eng) => {
                        eng.adjoin_trailing();
                        pair_step(&mut eng, &mut pool, pair_tol, StepKind::Finite)?;
                        continue;
                    }
                    Some(2) => {
                        eng.swap_trailing()?;
                        continue;
                    }
                    _ => {}
                }
            }
            let lambda = eng.problem(1).eigenvalues()[0].re;
            let gamma = pool.real_target(lambda);
            let res = assign_real_1x1(&eng.problem(1), gamma);
            eng.apply(1, &res, StepKind::Finite)?;
            eng.settle(1)?;
            continue;
        }
        pair_step(&mut eng, &mut pool, pair_tol, StepKind::Finite)?;
    }
    Ok(eng.finish())
}

pub(crate) fn region_matches(sys: &DescriptorSystem, region: &RegionSpec) -> Result<()> {
    if sys.domain() != region.domain() {
        return Err(Error::InvalidRegion(format!(
            "region is {} but the system is {}",
            region.domain().as_str(),
            sys.domain().as_str()
        )));
    }
    Ok(())
}

fn previous_is_infinite(eng: &Engine) -> bool {
    let n = eng.n();
    eng.e[(n - 2, n - 2)] == 0.0
}

/// Two trailing infinite blocks and only complex targets left.
fn wants_infinite_pair(eng: &Engine, pool: &PolePool) -> bool {
    !pool.has_real()
        && pool.has_complex()
        && eng.previous_bad() == Some(1)
        && previous_is_infinite(eng)
}

/// Assigns `α` to the last two infinite blocks, then re-assigns the resulting `2×2` block
/// to a complex pair.
fn infinite_pair(eng: &mut Engine, pool: &mut PolePool, pair_tol: f64) -> Result<()> {
    let alpha = pool.alpha();
    let res = assign_infinite_1x1(&eng.problem(1), alpha, 1.0);
    eng.apply(1, &res, StepKind::Infinite)?;
    eng.swap_trailing()?;
    if eng.is_uncontrollable(1) {
        eng.deflate(1);
        return eng.settle(1);
    }
    let res = assign_infinite_1x1(&eng.problem(1), alpha, 1.0);
    eng.apply(1, &res, StepKind::Infinite)?;
    eng.adjoin_trailing();
    pair_step(eng, pool, pair_tol, StepKind::Reassign)
}

fn pair_step(eng: &mut Engine, pool: &mut PolePool, pair_tol: f64, kind: StepKind) -> Result<()> {
    let p = eng.problem(2);
    let eigs = p.eigenvalues();
    if eigs.len() != 2 {
        return Err(Error::SingularBlock(
            "trailing 2x2 block has a singular E22".into(),
        ));
    }
    let saved = pool.clone();
    let targets = pool.pair_target([eigs[0], eigs[1]]);
    match assign_pair(&p, targets, pair_tol)? {
        PairAssignment::Assigned(res) => {
            eng.apply(2, &res, kind)?;
            let count = eng.standardize_trailing()?;
            eng.settle(count)
        }
        PairAssignment::Deflate(req) => {
            *pool = saved;
            if kind == StepKind::Reassign {
                eng.split_trailing();
                eng.settle(2)
            } else {
                eng.deflate_split(&req);
                Ok(())
            }
        }
    }
}
