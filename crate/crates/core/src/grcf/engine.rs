//! Shared state of the recursive dislocation: the stacked realization in GRSF, the block
//! structure, the insertion point `q`, and the step log.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::assign::{AssignmentResult, BlockProblem, DeflationRequest};
use crate::error::{Error, Result};
use crate::factors::{DislocationLog, StackedFactorRealization, StepKind, StepRecord};
use crate::gsorsf::OrderedGrsf;
use crate::linalg::{
    apply_cols, apply_rows, block_eigenvalues, standardize_window, swap_window, Window,
};
use crate::region::Tolerances;
use crate::system::{DescriptorSystem, Domain};

pub(crate) struct Engine {
    pub a: DMatrix<f64>,
    pub e: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub cn: DMatrix<f64>,
    pub dn: DMatrix<f64>,
    pub cm: DMatrix<f64>,
    pub dm: DMatrix<f64>,
    pub blocks: Vec<usize>,
    /// Start of the bad part; columns before `q` are final.
    pub q: usize,
    q0: usize,
    n_nondynamic: usize,
    domain: Domain,
    gain_limit: f64,
    strict: bool,
    rank_tol: f64,
    /// Reference size for negligible rows of `B̃`: the norm of the input matrix.
    b_scale: f64,
    pub log: DislocationLog,
}

impl Engine {
    pub fn new(sys: &DescriptorSystem, g: OrderedGrsf, tol: &Tolerances, strict: bool) -> Self {
        let m = sys.inputs();
        let n = sys.order();
        let bnorm = sys.b().norm();
        let gain_limit = if bnorm > 0.0 {
            tol.gain_kappa * sys.a().norm().max(f64::MIN_POSITIVE) / bnorm
        } else {
            f64::INFINITY
        };
        let q = g.dims.bad_start();
        Self {
            b: &g.q * sys.b(),
            cn: sys.c() * &g.z,
            dn: sys.d().clone(),
            cm: DMatrix::zeros(m, n),
            dm: DMatrix::identity(m, m),
            a: g.a,
            e: g.e,
            blocks: g.blocks,
            q,
            q0: q,
            n_nondynamic: g.dims.n_inf_simple,
            domain: sys.domain(),
            gain_limit,
            strict,
            rank_tol: tol.rank_tol,
            b_scale: bnorm,
            log: DislocationLog::default(),
        }
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Size of the trailing block, or `None` once every bad block has been processed.
    pub fn trailing(&self) -> Option<usize> {
        if self.n() > self.q {
            self.blocks.last().copied()
        } else {
            None
        }
    }

    /// Size of the block preceding the trailing one, if it is still bad.
    pub fn previous_bad(&self) -> Option<usize> {
        let len = self.blocks.len();
        if len < 2 {
            return None;
        }
        let k = self.blocks[len - 1];
        let kp = self.blocks[len - 2];
        (self.n() - k - kp >= self.q).then_some(kp)
    }

    pub fn problem(&self, k: usize) -> BlockProblem {
        let n = self.n();
        let j = n - k;
        BlockProblem::new(
            self.a.view((j, j), (k, k)).clone_owned(),
            self.e.view((j, j), (k, k)).clone_owned(),
            self.b.rows(j, k).clone_owned(),
        )
        .expect("trailing block has consistent shape")
    }

    pub fn is_infinite_trailing(&self) -> bool {
        let n = self.n();
        self.blocks.last() == Some(&1) && self.e[(n - 1, n - 1)] == 0.0
    }

    /// True if the trailing `k` rows of `B̃` are numerically zero.
    pub fn is_uncontrollable(&self, k: usize) -> bool {
        let n = self.n();
        let b2 = self.b.rows(n - k, k).norm();
        let scale = self.b_scale.max(self.b.norm()).max(f64::MIN_POSITIVE);
        b2 <= 100.0 * self.rank_tol * scale
    }

    fn trailing_eigenvalues(&self, k: usize) -> Vec<Complex64> {
        let n = self.n();
        block_eigenvalues(&self.a, &self.e, n - k, k, 0.0)
            .into_iter()
            .filter_map(|ev| ev.finite())
            .collect()
    }

    /// Drops the trailing `k` uncontrollable states.
    pub fn deflate(&mut self, k: usize) {
        let poles = self.trailing_eigenvalues(k);
        let infinite = self.is_infinite_trailing();
        let r = self.n() - k;
        self.a = self.a.view((0, 0), (r, r)).clone_owned();
        self.e = self.e.view((0, 0), (r, r)).clone_owned();
        self.b = self.b.rows(0, r).clone_owned();
        self.cn = self.cn.columns(0, r).clone_owned();
        self.cm = self.cm.columns(0, r).clone_owned();
        let mut left = k;
        while left > 0 {
            left -= self
                .blocks
                .pop()
                .expect("block list covers the deflated states");
        }
        self.log.steps.push(StepRecord {
            block_size: k,
            kind: if infinite {
                StepKind::Infinite
            } else {
                StepKind::Finite
            },
            poles,
            gain_norm: 0.0,
            gain_warning: false,
            deflated: true,
        });
    }

    /// Splits an adjoined trailing `2×2` block so that its last state is uncontrollable,
    /// then removes that state.
    pub fn deflate_split(&mut self, req: &DeflationRequest) {
        let n = self.n();
        let j = n - 2;
        apply_rows(&mut self.a, j, &req.u);
        apply_rows(&mut self.e, j, &req.u);
        apply_rows(&mut self.b, j, &req.u);
        apply_cols(&mut self.a, j, &req.v);
        apply_cols(&mut self.e, j, &req.v);
        apply_cols(&mut self.cn, j, &req.v);
        apply_cols(&mut self.cm, j, &req.v);
        self.a[(n - 1, n - 2)] = 0.0;
        self.e[(n - 1, n - 2)] = 0.0;
        self.b.row_mut(n - 1).fill(0.0);
        self.split_trailing();
        self.deflate(1);
    }

    fn check_gain(&self, gain: f64) -> Result<bool> {
        let exceeded = gain > self.gain_limit;
        if exceeded && self.strict {
            return Err(Error::GainLimitExceeded {
                step: self.log.steps.len(),
                gain,
                limit: self.gain_limit,
            });
        }
        Ok(exceeded)
    }

    /// Applies the elementary factor of `res` to the trailing `k×k` block.
    pub fn apply(&mut self, k: usize, res: &AssignmentResult, kind: StepKind) -> Result<()> {
        let warning = self.check_gain(res.gain_norm)?;
        let n = self.n();
        let j = n - k;
        let bf = &self.b * &res.f2;
        let dnf = &self.dn * &res.f2;
        let dmf = &self.dm * &res.f2;
        match res.infinite {
            Some((gamma, eta)) => {
                let rows = j;
                let upd = bf.rows(0, rows).clone_owned();
                let mut col = self.a.view_mut((0, j), (rows, 1));
                col += upd;
                self.a[(j, j)] = gamma;
                self.e[(j, j)] = eta;
                let b1 = self.b.rows(0, rows) * &res.w;
                self.b.rows_mut(0, rows).copy_from(&b1);
            }
            None => {
                let mut cols = self.a.columns_mut(j, k);
                cols += bf;
                self.b = &self.b * &res.w;
            }
        }
        let mut cn = self.cn.columns_mut(j, k);
        cn += dnf;
        let mut cm = self.cm.columns_mut(j, k);
        cm += dmf;
        self.dn = &self.dn * &res.w;
        self.dm = &self.dm * &res.w;
        self.log.steps.push(StepRecord {
            block_size: k,
            kind,
            poles: res.poles.clone(),
            gain_norm: res.gain_norm,
            gain_warning: warning,
            deflated: false,
        });
        Ok(())
    }

    fn apply_window(&mut self, w: &Window) {
        w.apply_pencil(&mut self.a, &mut self.e);
        w.apply_rows(&mut self.b);
        w.apply_cols(&mut self.cn);
        w.apply_cols(&mut self.cm);
    }

    /// Treats the last two `1×1` blocks as one `2×2` block.
    pub fn adjoin_trailing(&mut self) {
        let len = self.blocks.len();
        debug_assert!(self.blocks[len - 1] == 1 && self.blocks[len - 2] == 1);
        self.blocks.pop();
        self.blocks[len - 2] = 2;
    }

    /// Interchanges the last two diagonal blocks.
    pub fn swap_trailing(&mut self) -> Result<()> {
        let len = self.blocks.len();
        let (k1, k2) = (self.blocks[len - 2], self.blocks[len - 1]);
        let start = self.n() - k1 - k2;
        let w = swap_window(&self.a, &self.e, start, k1, k2)?;
        self.apply_window(&w);
        self.blocks[len - 2] = w.blocks[0];
        self.blocks[len - 1] = w.blocks[1];
        Ok(())
    }

    /// Restores the GRSF of the trailing `2×2` block; real eigenvalues give two `1×1` blocks.
    /// Returns the number of resulting blocks.
    pub fn standardize_trailing(&mut self) -> Result<usize> {
        let start = self.n() - 2;
        let w = standardize_window(&self.a, &self.e, start, 2)?;
        self.apply_window(&w);
        self.blocks.pop();
        self.blocks.extend(&w.blocks);
        Ok(w.blocks.len())
    }

    /// Undoes [`Engine::adjoin_trailing`].
    pub fn split_trailing(&mut self) {
        let len = self.blocks.len();
        debug_assert_eq!(self.blocks[len - 1], 2);
        self.blocks[len - 1] = 1;
        self.blocks.push(1);
    }

    /// Moves the trailing `count` blocks, in order, to the insertion point `q`.
    pub fn settle(&mut self, count: usize) -> Result<()> {
        for remaining in (1..=count).rev() {
            self.move_to_q(self.blocks.len() - remaining)?;
        }
        Ok(())
    }

    /// Moves block `idx` upwards until it starts at `q`, then advances `q`.
    fn move_to_q(&mut self, mut idx: usize) -> Result<()> {
        let mut start: usize = self.blocks[..idx].iter().sum();
        while start > self.q {
            let kp = self.blocks[idx - 1];
            let k = self.blocks[idx];
            let s0 = start - kp;
            let w = swap_window(&self.a, &self.e, s0, kp, k)?;
            self.apply_window(&w);
            self.blocks[idx - 1] = w.blocks[0];
            self.blocks[idx] = w.blocks[1];
            idx -= 1;
            start = s0;
        }
        self.q += self.blocks[idx];
        Ok(())
    }

    pub fn finish(self) -> (StackedFactorRealization, DislocationLog) {
        let den_degree = self.q - self.q0;
        (
            StackedFactorRealization {
                a: self.a,
                e: self.e,
                b: self.b,
                cn: self.cn,
                dn: self.dn,
                cm: self.cm,
                dm: self.dm,
                domain: self.domain,
                n_nondynamic: self.n_nondynamic,
                den_degree,
            },
            self.log,
        )
    }
}
