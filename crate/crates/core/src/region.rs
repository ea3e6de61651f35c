//! Good/bad partitions of the complex plane and numeric tolerances.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{DescriptorSystem, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoleMode {
    /// Minimum shift of bad poles onto the stability-degree boundary.
    Stabilize,
    /// Bad poles are moved to the nearest members of a desired pole set.
    Assign,
    /// Bad poles are reflected across the stability boundary (inner denominators).
    Inner,
}

/// `C_g` for the given domain.
///
/// For `Stabilize`/`Assign`: `{Re s ≤ α}` with `α < 0` (continuous) or `{|z| ≤ α}` with
/// `0 ≤ α < 1` (discrete); the boundary itself belongs to `C_g`. For `Inner` the good region
/// is the open stability domain and `alpha` is unused.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSpec {
    domain: Domain,
    alpha: f64,
    gamma_set: Vec<Complex64>,
    mode: PoleMode,
}

impl RegionSpec {
    pub fn stabilize(domain: Domain, alpha: f64) -> Result<Self> {
        check_alpha(domain, alpha)?;
        Ok(Self {
            domain,
            alpha,
            gamma_set: Vec::new(),
            mode: PoleMode::Stabilize,
        })
    }

    /// Pole-assignment region. `gamma_set` must be closed under conjugation and lie in `C_g`.
    pub fn assign(domain: Domain, alpha: f64, gamma_set: Vec<Complex64>) -> Result<Self> {
        check_alpha(domain, alpha)?;
        let region = Self {
            domain,
            alpha,
            gamma_set,
            mode: PoleMode::Assign,
        };
        for g in &region.gamma_set {
            if !g.re.is_finite() || !g.im.is_finite() {
                return Err(Error::InvalidRegion(format!("non-finite pole {g}")));
            }
            if !region.contains(*g, 0.0) {
                return Err(Error::InvalidRegion(format!(
                    "desired pole {g} lies outside the good region"
                )));
            }
        }
        let mut unmatched: Vec<Complex64> = region
            .gamma_set
            .iter()
            .copied()
            .filter(|g| g.im != 0.0)
            .collect();
        while let Some(g) = unmatched.pop() {
            let pos = unmatched
                .iter()
                .position(|h| (h - g.conj()).norm() <= 1e-12 * (1.0 + g.norm()));
            match pos {
                Some(i) => {
                    unmatched.swap_remove(i);
                }
                None => {
                    return Err(Error::InvalidRegion(format!(
                        "desired pole {g} has no complex conjugate partner"
                    )))
                }
            }
        }
        Ok(region)
    }

    pub fn inner(domain: Domain) -> Self {
        Self {
            domain,
            alpha: match domain {
                Domain::Continuous => 0.0,
                Domain::Discrete => 1.0,
            },
            gamma_set: Vec::new(),
            mode: PoleMode::Inner,
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma_set(&self) -> &[Complex64] {
        &self.gamma_set
    }

    pub fn mode(&self) -> PoleMode {
        self.mode
    }

    /// Membership in `C_g` with `margin` as tie tolerance.
    pub fn contains(&self, lambda: Complex64, margin: f64) -> bool {
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            return false;
        }
        match (self.mode, self.domain) {
            (PoleMode::Inner, Domain::Continuous) => lambda.re < -margin * (1.0 + lambda.norm()),
            (PoleMode::Inner, Domain::Discrete) => lambda.norm() < 1.0 - margin,
            (_, Domain::Continuous) => lambda.re <= self.alpha + margin,
            (_, Domain::Discrete) => lambda.norm() <= self.alpha + margin,
        }
    }

    /// True if `lambda` lies on the stability boundary within `margin`.
    pub fn on_stability_boundary(&self, lambda: Complex64, margin: f64) -> bool {
        match self.domain {
            Domain::Continuous => lambda.re.abs() <= margin * (1.0 + lambda.norm()),
            Domain::Discrete => (lambda.norm() - 1.0).abs() <= margin,
        }
    }
}

fn check_alpha(domain: Domain, alpha: f64) -> Result<()> {
    let ok = match domain {
        Domain::Continuous => alpha < 0.0,
        Domain::Discrete => (0.0..1.0).contains(&alpha),
    };
    if !ok || !alpha.is_finite() {
        return Err(Error::InvalidRegion(format!(
            "stability degree {alpha} not admissible for a {} system",
            domain.as_str()
        )));
    }
    Ok(())
}

/// Numeric thresholds shared by the reduction, the factorization engines and the checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative threshold for rank decisions.
    pub rank_tol: f64,
    /// Absolute margin used when classifying eigenvalues against region boundaries.
    pub boundary_tol: f64,
    /// Gain-size factor: gains above `κ‖A‖/‖B‖` are flagged.
    pub gain_kappa: f64,
    /// Relative error accepted by the evaluation checks.
    pub eval_tol: f64,
    pub seed: u64,
}

impl Tolerances {
    pub fn for_system(sys: &DescriptorSystem) -> Self {
        let dim = sys.order().max(sys.inputs()).max(sys.outputs()).max(1);
        Self {
            rank_tol: dim as f64 * f64::EPSILON,
            boundary_tol: 1e-10 * sys.pencil_scale(),
            gain_kappa: 100.0,
            eval_tol: 1e-7,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.rank_tol,
            self.boundary_tol,
            self.gain_kappa,
            self.eval_tol,
        ];
        if all.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidRegion(format!(
                "tolerances must be strictly positive: {self:?}"
            )))
        }
    }
}
