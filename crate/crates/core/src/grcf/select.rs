//! Choice of the poles assigned at each dislocation step.

use num_complex::Complex64;

use crate::region::{PoleMode, RegionSpec};
use crate::system::Domain;

/// Poles that remain to be assigned, with the fallback rules of the region.
#[derive(Debug, Clone)]
pub struct PolePool {
    region: RegionSpec,
    remaining: Vec<Complex64>,
}

impl PolePool {
    pub fn new(region: &RegionSpec) -> Self {
        let remaining = match region.mode() {
            PoleMode::Assign => region.gamma_set().to_vec(),
            _ => Vec::new(),
        };
        Self {
            region: region.clone(),
            remaining,
        }
    }

    pub fn remaining(&self) -> &[Complex64] {
        &self.remaining
    }

    pub fn alpha(&self) -> f64 {
        self.region.alpha()
    }

    pub fn has_real(&self) -> bool {
        self.remaining.iter().any(|g| g.im == 0.0)
    }

    pub fn has_complex(&self) -> bool {
        self.remaining.iter().any(|g| g.im != 0.0)
    }

    fn take(&mut self, i: usize) -> Complex64 {
        self.remaining.remove(i)
    }

    fn real_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.remaining.len()).filter(|&i| self.remaining[i].im == 0.0)
    }

    /// `(γ, η)` for an infinite block: the real member nearest to the stability boundary,
    /// else `α`.
    pub fn infinite_target(&mut self) -> (f64, f64) {
        let domain = self.region.domain();
        let closeness = |g: Complex64| match domain {
            Domain::Continuous => g.re,
            Domain::Discrete => g.re.abs(),
        };
        let best = self
            .real_indices()
            .max_by(|&i, &j| closeness(self.remaining[i]).total_cmp(&closeness(self.remaining[j])));
        match best {
            Some(i) => (self.take(i).re, 1.0),
            None => (self.alpha(), 1.0),
        }
    }

    /// Nearest real member to `lambda`, removed from the pool.
    pub fn take_nearest_real(&mut self, lambda: f64) -> Option<f64> {
        let best = self.real_indices().min_by(|&i, &j| {
            (self.remaining[i].re - lambda)
                .abs()
                .total_cmp(&(self.remaining[j].re - lambda).abs())
        })?;
        Some(self.take(best).re)
    }

    /// Target for a real `1×1` block when no adjoining is attempted.
    pub fn real_target(&mut self, lambda: f64) -> f64 {
        self.take_nearest_real(lambda).unwrap_or(self.alpha())
    }

    /// Targets for a `2×2` block with eigenvalues `eigs`.
    pub fn pair_target(&mut self, eigs: [Complex64; 2]) -> [Complex64; 2] {
        let upper = if eigs[0].im >= eigs[1].im {
            eigs[0]
        } else {
            eigs[1]
        };
        let complex = (0..self.remaining.len())
            .filter(|&i| self.remaining[i].im > 0.0)
            .min_by(|&i, &j| {
                (self.remaining[i] - upper)
                    .norm()
                    .total_cmp(&(self.remaining[j] - upper).norm())
            });
        if let Some(i) = complex {
            let g = self.take(i);
            let partner = (0..self.remaining.len())
                .filter(|&j| self.remaining[j].im < 0.0)
                .min_by(|&a, &b| {
                    (self.remaining[a] - g.conj())
                        .norm()
                        .total_cmp(&(self.remaining[b] - g.conj()).norm())
                });
            if let Some(j) = partner {
                self.take(j);
            }
            return [g, g.conj()];
        }
        if self.real_indices().count() >= 2 {
            let g1 = self
                .take_nearest_real(eigs[0].re)
                .expect("two reals available");
            let g2 = self
                .take_nearest_real(eigs[1].re)
                .expect("two reals available");
            return [Complex64::new(g1, 0.0), Complex64::new(g2, 0.0)];
        }
        stabilize_pair(self.region.domain(), self.alpha(), upper)
    }
}

/// Minimum-shift targets for a pair `μ ± iτ`.
pub fn stabilize_pair(domain: Domain, alpha: f64, lambda: Complex64) -> [Complex64; 2] {
    let g = match domain {
        Domain::Continuous => Complex64::new(alpha, lambda.im.abs()),
        Domain::Discrete => {
            let r = lambda.norm();
            if r == 0.0 {
                Complex64::new(alpha, 0.0)
            } else {
                let l = Complex64::new(lambda.re, lambda.im.abs());
                l * (alpha / r)
            }
        }
    };
    [g, g.conj()]
}
