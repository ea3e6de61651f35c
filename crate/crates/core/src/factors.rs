//! Realizations of computed factors and the per-step dislocation log.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::system::{DescriptorSystem, Domain, RealMatrix};

/// Shared-state realization of the stacked right factors `[N; M]`:
/// `N = (A − λE, B, C_N, D_N)`, `M = (A − λE, B, C_M, D_M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedFactorRealization {
    pub a: RealMatrix,
    pub e: RealMatrix,
    pub b: RealMatrix,
    pub cn: RealMatrix,
    pub dn: RealMatrix,
    pub cm: RealMatrix,
    pub dm: RealMatrix,
    pub domain: Domain,
    /// Leading simple infinite eigenvalues still present in the pencil.
    pub n_nondynamic: usize,
    /// Number of dislocated eigenvalues (order of the minimal denominator).
    pub den_degree: usize,
}

impl StackedFactorRealization {
    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.cn.nrows()
    }

    pub fn numerator(&self) -> Result<DescriptorSystem> {
        DescriptorSystem::new(
            self.a.clone(),
            Some(self.e.clone()),
            self.b.clone(),
            self.cn.clone(),
            self.dn.clone(),
            self.domain,
        )
    }

    pub fn denominator(&self) -> Result<DescriptorSystem> {
        DescriptorSystem::new(
            self.a.clone(),
            Some(self.e.clone()),
            self.b.clone(),
            self.cm.clone(),
            self.dm.clone(),
            self.domain,
        )
    }

    /// The realization of `[N; M]` as a single system.
    pub fn stacked(&self) -> Result<DescriptorSystem> {
        let (p, m, n) = (self.outputs(), self.inputs(), self.order());
        let mut c = DMatrix::zeros(p + m, n);
        c.rows_mut(0, p).copy_from(&self.cn);
        c.rows_mut(p, m).copy_from(&self.cm);
        let mut d = DMatrix::zeros(p + m, m);
        d.rows_mut(0, p).copy_from(&self.dn);
        d.rows_mut(p, m).copy_from(&self.dm);
        DescriptorSystem::new(
            self.a.clone(),
            Some(self.e.clone()),
            self.b.clone(),
            c,
            d,
            self.domain,
        )
    }
}

/// Left factors `G = M⁻¹·N` sharing the state pencil:
/// `N = (A − λE, B_N, C, D_N)`, `M = (A − λE, B_M, C, D_M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeftFactorRealization {
    pub a: RealMatrix,
    pub e: RealMatrix,
    pub bn: RealMatrix,
    pub bm: RealMatrix,
    pub c: RealMatrix,
    pub dn: RealMatrix,
    pub dm: RealMatrix,
    pub domain: Domain,
    /// Trailing simple infinite eigenvalues still present in the pencil.
    pub n_nondynamic: usize,
    pub den_degree: usize,
}

impl LeftFactorRealization {
    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn numerator(&self) -> Result<DescriptorSystem> {
        DescriptorSystem::new(
            self.a.clone(),
            Some(self.e.clone()),
            self.bn.clone(),
            self.c.clone(),
            self.dn.clone(),
            self.domain,
        )
    }

    pub fn denominator(&self) -> Result<DescriptorSystem> {
        DescriptorSystem::new(
            self.a.clone(),
            Some(self.e.clone()),
            self.bm.clone(),
            self.c.clone(),
            self.dm.clone(),
            self.domain,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Finite,
    Infinite,
    /// Re-assignment of a block that was already dislocated in earlier steps.
    Reassign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub block_size: usize,
    pub kind: StepKind,
    #[serde(with = "crate::io::complex_list")]
    pub poles: Vec<Complex64>,
    pub gain_norm: f64,
    pub gain_warning: bool,
    pub deflated: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DislocationLog {
    pub steps: Vec<StepRecord>,
}

impl DislocationLog {
    /// Poles placed by non-deflated finite and infinite steps, with multiplicity.
    pub fn assigned_pole_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| !s.deflated && s.kind != StepKind::Reassign)
            .map(|s| s.poles.len())
            .sum()
    }

    pub fn deflated_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| s.deflated)
            .map(|s| s.block_size)
            .sum()
    }

    pub fn warnings(&self) -> usize {
        self.steps.iter().filter(|s| s.gain_warning).count()
    }

    /// Current assigned poles, taking re-assignments into account.
    pub fn final_poles(&self) -> Vec<Complex64> {
        let mut poles: Vec<Complex64> = Vec::new();
        for s in self.steps.iter().filter(|s| !s.deflated) {
            if s.kind == StepKind::Reassign {
                let k = s.poles.len().min(poles.len());
                poles.truncate(poles.len() - k);
            }
            poles.extend(&s.poles);
        }
        poles
    }
}
