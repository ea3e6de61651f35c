use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{apply_cols, apply_rows, lapack};
use crate::error::{Error, Result};

/// A generalized eigenvalue of a real pencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eigenvalue {
    Finite(Complex64),
    Infinite,
}

impl Eigenvalue {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            Eigenvalue::Finite(z) => Some(z),
            Eigenvalue::Infinite => None,
        }
    }
}

/// `S = Q·A·Z`, `T = Q·E·Z` in generalized real Schur form.
#[derive(Debug, Clone)]
pub struct SchurPair {
    pub s: DMatrix<f64>,
    pub t: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub z: DMatrix<f64>,
    /// Diagonal block sizes (1 or 2) from top to bottom.
    pub blocks: Vec<usize>,
}

impl SchurPair {
    pub fn order(&self) -> usize {
        self.s.nrows()
    }

    /// Eigenvalues block by block. A 1×1 block with `|t| ≤ inf_tol` is infinite.
    pub fn eigenvalues(&self, inf_tol: f64) -> Vec<Eigenvalue> {
        let mut out = Vec::with_capacity(self.order());
        let mut j = 0;
        for &k in &self.blocks {
            out.extend(block_eigenvalues(&self.s, &self.t, j, k, inf_tol));
            j += k;
        }
        out
    }
}

/// Eigenvalues of the diagonal block of size `k` starting at `j`.
pub(crate) fn block_eigenvalues(
    s: &DMatrix<f64>,
    t: &DMatrix<f64>,
    j: usize,
    k: usize,
    inf_tol: f64,
) -> Vec<Eigenvalue> {
    if k == 1 {
        let tj = t[(j, j)];
        if tj.abs() <= inf_tol {
            return vec![Eigenvalue::Infinite];
        }
        return vec![Eigenvalue::Finite(Complex64::new(s[(j, j)] / tj, 0.0))];
    }
    let (t11, t12, t22) = (t[(j, j)], t[(j, j + 1)], t[(j + 1, j + 1)]);
    if t11.abs() <= inf_tol || t22.abs() <= inf_tol {
        return vec![Eigenvalue::Infinite, Eigenvalue::Infinite];
    }
    // M = T⁻¹S for the 2×2 window.
    let (s11, s12, s21, s22) = (s[(j, j)], s[(j, j + 1)], s[(j + 1, j)], s[(j + 1, j + 1)]);
    let m21 = s21 / t22;
    let m22 = s22 / t22;
    let m11 = (s11 - t12 * m21) / t11;
    let m12 = (s12 - t12 * m22) / t11;
    let half_tr = 0.5 * (m11 + m22);
    let det = m11 * m22 - m12 * m21;
    let disc = Complex64::new(half_tr * half_tr - det, 0.0).sqrt();
    let h = Complex64::new(half_tr, 0.0);
    let mut pair = [h + disc, h - disc];
    if pair[0].im < pair[1].im {
        pair.swap(0, 1);
    }
    pair.iter().map(|&z| Eigenvalue::Finite(z)).collect()
}

/// Block sizes from the imaginary parts reported by LAPACK.
pub(crate) fn blocks_from_alphai(alphai: &[f64]) -> Vec<usize> {
    let mut blocks = Vec::new();
    let mut j = 0;
    while j < alphai.len() {
        if alphai[j] != 0.0 && j + 1 < alphai.len() {
            blocks.push(2);
            j += 2;
        } else {
            blocks.push(1);
            j += 1;
        }
    }
    blocks
}

fn block_starts(blocks: &[usize]) -> Vec<usize> {
    let mut starts = Vec::with_capacity(blocks.len());
    let mut j = 0;
    for &k in blocks {
        starts.push(j);
        j += k;
    }
    starts
}

/// Sets every entry below the block diagonal of `s` and below the diagonal of `t` to zero.
pub(crate) fn clean_structure(s: &mut DMatrix<f64>, t: &mut DMatrix<f64>, blocks: &[usize]) {
    let n = s.nrows();
    let mut j = 0;
    for &k in blocks {
        for c in j..j + k {
            for r in (j + k)..n {
                s[(r, c)] = 0.0;
            }
            for r in (c + 1)..n {
                t[(r, c)] = 0.0;
            }
        }
        j += k;
    }
}

/// Generalized real Schur form of `(A, E)`.
pub fn grsf(a: &DMatrix<f64>, e: &DMatrix<f64>) -> Result<SchurPair> {
    if a.shape() != e.shape() || a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "pencil blocks are {:?} and {:?}",
            a.shape(),
            e.shape()
        )));
    }
    let out = lapack::gges(a, e)?;
    let blocks = blocks_from_alphai(&out.alphai);
    let mut s = out.s;
    let mut t = out.t;
    clean_structure(&mut s, &mut t, &blocks);
    Ok(SchurPair {
        s,
        t,
        q: out.ql.transpose(),
        z: out.zr,
        blocks,
    })
}

/// A local orthogonal equivalence on the diagonal window starting at `start`:
/// the window becomes `s`, `t` and `q`, `z` act on the surrounding rows/columns.
#[derive(Debug, Clone)]
pub(crate) struct Window {
    pub start: usize,
    pub q: DMatrix<f64>,
    pub z: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub t: DMatrix<f64>,
    /// New block sizes inside the window.
    pub blocks: Vec<usize>,
}

impl Window {
    pub fn size(&self) -> usize {
        self.q.nrows()
    }

    /// Applies the window transformation to a full upper block-triangular pencil.
    pub fn apply_pencil(&self, a: &mut DMatrix<f64>, e: &mut DMatrix<f64>) {
        let j = self.start;
        let w = self.size();
        let n = a.nrows();
        for m in [&mut *a, &mut *e] {
            let right = m.view((j, j + w), (w, n - j - w)).clone_owned();
            m.view_mut((j, j + w), (w, n - j - w))
                .copy_from(&(&self.q * right));
            let above = m.view((0, j), (j, w)).clone_owned();
            m.view_mut((0, j), (j, w)).copy_from(&(above * &self.z));
        }
        a.view_mut((j, j), (w, w)).copy_from(&self.s);
        e.view_mut((j, j), (w, w)).copy_from(&self.t);
    }

    /// `m[rows] ← q·m[rows]` for an input matrix.
    pub fn apply_rows(&self, m: &mut DMatrix<f64>) {
        apply_rows(m, self.start, &self.q);
    }

    /// `m[:, cols] ← m[:, cols]·z` for an output matrix or column accumulator.
    pub fn apply_cols(&self, m: &mut DMatrix<f64>) {
        apply_cols(m, self.start, &self.z);
    }
}

fn is_infinite_1x1(t: &DMatrix<f64>, j: usize, k: usize) -> bool {
    k == 1 && t[(j, j)] == 0.0
}

/// Swaps the adjacent diagonal blocks of sizes `k1` (at `start`) and `k2`.
///
/// Exact zeros on the diagonal of `T` (infinite eigenvalues) are restored after the swap.
pub(crate) fn swap_window(
    s: &DMatrix<f64>,
    t: &DMatrix<f64>,
    start: usize,
    k1: usize,
    k2: usize,
) -> Result<Window> {
    let w = k1 + k2;
    let mut sw = s.view((start, start), (w, w)).clone_owned();
    let mut tw = t.view((start, start), (w, w)).clone_owned();
    let first_inf = is_infinite_1x1(&tw, 0, k1);
    let second_inf = is_infinite_1x1(&tw, k1, k2);
    let mut ql = DMatrix::<f64>::identity(w, w);
    let mut zr = DMatrix::<f64>::identity(w, w);
    lapack::tgexc(&mut sw, &mut tw, &mut ql, &mut zr, k1 + 1, 1).map_err(|err| match err {
        Error::SwapIllConditioned { .. } => Error::SwapIllConditioned { position: start },
        other => other,
    })?;
    let blocks = vec![k2, k1];
    clean_structure(&mut sw, &mut tw, &blocks);
    if second_inf {
        tw[(0, 0)] = 0.0;
    }
    if first_inf {
        tw[(k2, k2)] = 0.0;
    }
    Ok(Window {
        start,
        q: ql.transpose(),
        z: zr,
        s: sw,
        t: tw,
        blocks,
    })
}

/// Re-standardizes the `k×k` diagonal window at `start` (k ≤ 2): a 2×2 window with real
/// eigenvalues splits into two 1×1 blocks.
pub(crate) fn standardize_window(
    s: &DMatrix<f64>,
    t: &DMatrix<f64>,
    start: usize,
    k: usize,
) -> Result<Window> {
    let sw = s.view((start, start), (k, k)).clone_owned();
    let tw = t.view((start, start), (k, k)).clone_owned();
    let out = lapack::gges(&sw, &tw)?;
    let blocks = blocks_from_alphai(&out.alphai);
    let mut s2 = out.s;
    let mut t2 = out.t;
    clean_structure(&mut s2, &mut t2, &blocks);
    Ok(Window {
        start,
        q: out.ql.transpose(),
        z: out.zr,
        s: s2,
        t: t2,
        blocks,
    })
}

/// Moves the blocks whose eigenvalues satisfy `selector` to the leading positions,
/// keeping the relative order inside both groups.
pub fn reorder_blocks(
    pair: &SchurPair,
    inf_tol: f64,
    selector: impl Fn(Eigenvalue) -> bool,
) -> Result<SchurPair> {
    let mut out = pair.clone();
    let n = out.order();
    let mut blocks = out.blocks.clone();
    let mut selected: Vec<bool> = Vec::with_capacity(blocks.len());
    let starts = block_starts(&blocks);
    for (&j, &k) in starts.iter().zip(&blocks) {
        let ev = block_eigenvalues(&out.s, &out.t, j, k, inf_tol);
        selected.push(selector(ev[0]));
    }
    let mut placed = 0;
    for idx in 0..blocks.len() {
        if !selected[idx] {
            continue;
        }
        let mut cur = idx;
        while cur > placed {
            let start: usize = blocks[..cur - 1].iter().sum();
            let win = swap_window(&out.s, &out.t, start, blocks[cur - 1], blocks[cur])?;
            win.apply_pencil(&mut out.s, &mut out.t);
            win.apply_rows(&mut out.q);
            win.apply_cols(&mut out.z);
            blocks.swap(cur - 1, cur);
            selected.swap(cur - 1, cur);
            cur -= 1;
        }
        placed += 1;
    }
    debug_assert_eq!(blocks.iter().sum::<usize>(), n);
    out.blocks = blocks;
    Ok(out)
}
