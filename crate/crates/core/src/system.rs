//! Descriptor system realizations `G(λ) = C (λE − A)⁻¹ B + D`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense real matrix used for every realization matrix in the crate.
pub type RealMatrix = DMatrix<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Continuous,
    Discrete,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Continuous => "continuous",
            Domain::Discrete => "discrete",
        }
    }
}

/// A descriptor realization `(A − λE, B, C, D)`.
///
/// `E` is `None` for standard systems (`E = I`). Construct with [`DescriptorSystem::new`]
/// or [`DescriptorSystem::standard`]; both validate dimensions and finiteness.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorSystem {
    a: RealMatrix,
    e: Option<RealMatrix>,
    b: RealMatrix,
    c: RealMatrix,
    d: RealMatrix,
    domain: Domain,
}

impl DescriptorSystem {
    pub fn new(
        a: RealMatrix,
        e: Option<RealMatrix>,
        b: RealMatrix,
        c: RealMatrix,
        d: RealMatrix,
        domain: Domain,
    ) -> Result<Self> {
        validate_system(Self {
            a,
            e,
            b,
            c,
            d,
            domain,
        })
    }

    pub fn standard(
        a: RealMatrix,
        b: RealMatrix,
        c: RealMatrix,
        d: RealMatrix,
        domain: Domain,
    ) -> Result<Self> {
        Self::new(a, None, b, c, d, domain)
    }

    pub fn a(&self) -> &RealMatrix {
        &self.a
    }

    /// The descriptor matrix if one was given explicitly.
    pub fn e_explicit(&self) -> Option<&RealMatrix> {
        self.e.as_ref()
    }

    /// `E` as a dense matrix (identity for standard systems).
    pub fn e(&self) -> RealMatrix {
        match &self.e {
            Some(e) => e.clone(),
            None => RealMatrix::identity(self.order(), self.order()),
        }
    }

    pub fn b(&self) -> &RealMatrix {
        &self.b
    }

    pub fn c(&self) -> &RealMatrix {
        &self.c
    }

    pub fn d(&self) -> &RealMatrix {
        &self.d
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    pub fn is_standard(&self) -> bool {
        self.e.is_none()
    }

    /// Realization of the transposed TFM, `(Aᵀ − λEᵀ, Cᵀ, Bᵀ, Dᵀ)`.
    pub fn dual(&self) -> Self {
        Self {
            a: self.a.transpose(),
            e: self.e.as_ref().map(|e| e.transpose()),
            b: self.c.transpose(),
            c: self.b.transpose(),
            d: self.d.transpose(),
            domain: self.domain,
        }
    }

    /// Scale used by the default tolerances: `1 + ‖A‖_F + ‖E‖_F`.
    pub fn pencil_scale(&self) -> f64 {
        let e_norm = match &self.e {
            Some(e) => e.norm(),
            None => (self.order() as f64).sqrt(),
        };
        1.0 + self.a.norm() + e_norm
    }

    pub fn into_parts(
        self,
    ) -> (
        RealMatrix,
        Option<RealMatrix>,
        RealMatrix,
        RealMatrix,
        RealMatrix,
        Domain,
    ) {
        (self.a, self.e, self.b, self.c, self.d, self.domain)
    }
}

fn check_finite(name: &'static str, m: &RealMatrix) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(Error::NonFiniteEntry {
                    matrix: name,
                    row: i,
                    col: j,
                });
            }
        }
    }
    Ok(())
}

fn expect_shape(name: &str, m: &RealMatrix, rows: usize, cols: usize) -> Result<()> {
    if m.shape() != (rows, cols) {
        return Err(Error::DimensionMismatch(format!(
            "{name} is {}x{}, expected {rows}x{cols}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Checks dimensional consistency and finiteness. Regularity of the pencil is
/// checked later by the Schur reduction.
pub fn validate_system(sys: DescriptorSystem) -> Result<DescriptorSystem> {
    let n = sys.a.nrows();
    let m = sys.b.ncols();
    let p = sys.c.nrows();
    expect_shape("A", &sys.a, n, n)?;
    if let Some(e) = &sys.e {
        expect_shape("E", e, n, n)?;
    }
    expect_shape("B", &sys.b, n, m)?;
    expect_shape("C", &sys.c, p, n)?;
    expect_shape("D", &sys.d, p, m)?;
    check_finite("A", &sys.a)?;
    if let Some(e) = &sys.e {
        check_finite("E", e)?;
    }
    check_finite("B", &sys.b)?;
    check_finite("C", &sys.c)?;
    check_finite("D", &sys.d)?;
    Ok(sys)
}
